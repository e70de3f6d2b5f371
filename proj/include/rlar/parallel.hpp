#pragma once

#include <cstddef>
#include <functional>

#include "rlar/random.hpp"

namespace rlar {

/// Hardware concurrency, capped by the RLAR_THREADS environment variable.
int worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = worker_count()).
/// Rethrows the exception of the lowest failing index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int workers = 0);

}  // namespace rlar
