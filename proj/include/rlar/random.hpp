#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rlar {

// Engine keyed by (seed, stream). Distribution helpers below avoid the
// std:: distributions so that draws are identical across standard libraries.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

/// Uniform integer in [0, bound), unbiased by rejection.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& rng);

/// Draws `count` distinct values from [0, population) in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::mt19937_64& rng, std::size_t population,
                                                    std::size_t count);

}  // namespace rlar

namespace rlar {

/// Independent child seed for sub-experiments (splitmix64 of seed and stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rlar
