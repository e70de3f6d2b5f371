#pragma once

#include <span>

#include <Eigen/Dense>

namespace rlar {

/// Per-row diagnostics of the target update. `violations` and `active` list
/// the wrong classes j != label in ascending order.
struct RetargetRowResult {
    double delta = 0.0;
    Eigen::VectorXd violations;  // v_j = y_j + 1 - y_label
    Eigen::VectorXi active;      // 1 where v_j is inside the optimal active set
};

struct RetargetedRow {
    Eigen::VectorXd target;
    RetargetRowResult diag;
};

/// Closest point (Euclidean) to `y` whose entry at `label` (1-based) beats
/// every other entry by at least 1.
///
/// With g(x) = x + sum_k min(x - v_k, 0), a wrong class is active iff
/// g(v_j) > 0. Since g is strictly increasing the active set is a prefix of
/// the violations sorted in descending order, and delta is the root of g,
/// sum(active v) / (1 + |active|).
RetargetedRow retarget_row(const Eigen::Ref<const Eigen::VectorXd>& y, int label);

/// Applies retarget_row to every row of Y (n x c).
Eigen::MatrixXd retarget(const Eigen::MatrixXd& Y, std::span<const int> labels);

/// Zero-one indicator rows.
Eigen::MatrixXd init_targets(std::span<const int> labels, int num_classes);

/// t[label] - max_{j != label} t[j].
double target_margin(const Eigen::Ref<const Eigen::VectorXd>& t, int label);

}  // namespace rlar
