#pragma once

// Brute-force references used only by the tests. None of these call into the
// code paths they check.

#include <cmath>
#include <bit>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rlar/dataset.hpp"

namespace rlar::testing {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0,
                                     double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
    return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
    return random_matrix(rng, n, 1, lo, hi).col(0);
}

/// Random normalized dataset with `per_class[i]` samples of class i+1, class
/// means spread along the feature axes.
inline LabeledDataset random_dataset(std::mt19937_64& rng, Eigen::Index d, const std::vector<int>& per_class,
                                     double spread = 0.15) {
    std::normal_distribution<double> noise(0.0, spread);
    std::vector<int> labels;
    for (std::size_t i = 0; i < per_class.size(); ++i)
        for (int j = 0; j < per_class[i]; ++j) labels.push_back(static_cast<int>(i) + 1);
    Eigen::MatrixXd x(d, static_cast<Eigen::Index>(labels.size()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const int label = labels[static_cast<std::size_t>(j)];
        for (Eigen::Index k = 0; k < d; ++k)
            x(k, j) = 0.5 + 0.3 * std::cos(1.7 * label * (k + 1)) + noise(rng);
    }
    auto ds = LabeledDataset::from_columns(std::move(x), std::move(labels), static_cast<int>(per_class.size()));
    return normalize_min_max(ds);
}

/// Pairwise distances by explicit coordinate sums.
inline double naive_distance(const Eigen::MatrixXd& a, Eigen::Index j, Eigen::Index k) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < a.rows(); ++r) s += (a(r, j) - a(r, k)) * (a(r, j) - a(r, k));
    return std::sqrt(s);
}

/// Minimum of sum_k v_k g_k over all 0/1 vectors with v_self = 0 and k_eff ones.
inline double enumerate_min_selection(const Eigen::VectorXd& g_row, Eigen::Index self, int k_eff) {
    const Eigen::Index m = g_row.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (mask & (1u << self)) continue;
        if (std::popcount(mask) != k_eff) continue;
        double cost = 0.0;
        for (Eigen::Index k = 0; k < m; ++k)
            if (mask & (1u << k)) cost += g_row(k);
        best = std::min(best, cost);
    }
    return best;
}

/// Regression rows, L2,1 penalty and locality term summed term by term.
inline double naive_objective(const Eigen::MatrixXd& X, const std::vector<int>& labels, const Eigen::MatrixXd& W,
                              const Eigen::VectorXd& b, const Eigen::MatrixXd& T, const Eigen::MatrixXd& V_dense,
                              int K, double alpha, double beta) {
    const Eigen::Index n = X.cols(), d = X.rows(), c = W.cols();
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double sq = 0.0;
        for (Eigen::Index j = 0; j < c; ++j) {
            double y = b(j);
            for (Eigen::Index k = 0; k < d; ++k) y += X(k, i) * W(k, j);
            sq += (y - T(i, j)) * (y - T(i, j));
        }
        loss += std::sqrt(sq);
    }
    double reg = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        double sq = 0.0;
        for (Eigen::Index j = 0; j < c; ++j) sq += W(k, j) * W(k, j);
        reg += std::sqrt(sq);
    }
    double loc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = 0; l < n; ++l) {
            if (V_dense(j, l) == 0.0 || labels[static_cast<std::size_t>(j)] != labels[static_cast<std::size_t>(l)])
                continue;
            double sq = 0.0;
            for (Eigen::Index r = 0; r < c; ++r) {
                double pj = 0.0, pl = 0.0;
                for (Eigen::Index k = 0; k < d; ++k) {
                    pj += W(k, r) * X(k, j);
                    pl += W(k, r) * X(k, l);
                }
                sq += (pj - pl) * (pj - pl);
            }
            loc += V_dense(j, l) / (2.0 * K) * std::sqrt(sq);
        }
    return loss + alpha * reg + beta * loc;
}

/// Dense centering matrix H = D - D 1 1^T D / (1^T D 1).
inline Eigen::MatrixXd centering(const Eigen::VectorXd& d_hat) {
    const Eigen::MatrixXd D = d_hat.asDiagonal();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d_hat.size());
    return D - D * ones * ones.transpose() * D / (ones.transpose() * D * ones).value();
}

/// W by explicit inverse of the full system with a dense Laplacian.
inline Eigen::MatrixXd explicit_inverse_w(const Eigen::MatrixXd& X, const Eigen::MatrixXd& T,
                                          const Eigen::VectorXd& d_hat, const Eigen::VectorXd& d_tilde,
                                          const Eigen::MatrixXd& L, double alpha, double beta) {
    const Eigen::MatrixXd H = centering(d_hat);
    const Eigen::MatrixXd A = X * H * X.transpose() + alpha * Eigen::MatrixXd(d_tilde.asDiagonal()) +
                              beta * X * L * X.transpose();
    return A.inverse() * X * H * T;
}

/// Reweighted quadratic surrogate at fixed D^, D~, L.
inline double surrogate(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                        const Eigen::MatrixXd& T, const Eigen::VectorXd& d_hat, const Eigen::VectorXd& d_tilde,
                        const Eigen::MatrixXd& L, double alpha, double beta) {
    Eigen::MatrixXd R = X.transpose() * W;
    R.rowwise() += b.transpose();
    R -= T;
    return (R.transpose() * d_hat.asDiagonal() * R).trace() + alpha * (W.transpose() * d_tilde.asDiagonal() * W).trace() +
           beta * (W.transpose() * X * L * X.transpose() * W).trace();
}

/// Central-difference gradient of `f` over the entries of `p`.
template <typename F>
Eigen::VectorXd finite_difference(F&& f, Eigen::VectorXd p, double h = 1e-6) {
    Eigen::VectorXd g(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double saved = p(i);
        p(i) = saved + h;
        const double up = f(p);
        p(i) = saved - h;
        const double down = f(p);
        p(i) = saved;
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

/// Row cost of a target step, written out from the target definition.
inline double step_cost(const Eigen::VectorXd& y, int label, double delta) {
    const Eigen::Index l = label - 1;
    double sq = delta * delta;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        if (j == l) continue;
        const double v = y(j) + 1.0 - y(l);
        const double gap = std::min(delta - v, 0.0);
        sq += gap * gap;
    }
    return std::sqrt(sq);
}

/// Golden-section minimization of the (convex) step cost on [lo, hi].
inline double golden_section_step(const Eigen::VectorXd& y, int label, double lo, double hi) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
        const double c = b - ratio * (b - a);
        const double d = a + ratio * (b - a);
        if (step_cost(y, label, c) <= step_cost(y, label, d))
            b = d;
        else
            a = c;
    }
    return 0.5 * (a + b);
}

/// Nearest neighbor by explicit double loop, lowest index on ties.
inline std::vector<int> naive_knn1(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                                   const Eigen::MatrixXd& test) {
    std::vector<int> out;
    for (Eigen::Index t = 0; t < test.cols(); ++t) {
        double best = std::numeric_limits<double>::infinity();
        int label = -1;
        for (Eigen::Index j = 0; j < train.cols(); ++j) {
            double sq = 0.0;
            for (Eigen::Index r = 0; r < train.rows(); ++r) sq += (train(r, j) - test(r, t)) * (train(r, j) - test(r, t));
            if (sq < best) {
                best = sq;
                label = labels[static_cast<std::size_t>(j)];
            }
        }
        out.push_back(label);
    }
    return out;
}

}  // namespace rlar::testing
