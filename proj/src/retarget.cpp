#include "rlar/retarget.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "rlar/errors.hpp"

namespace rlar {

RetargetedRow retarget_row(const Eigen::Ref<const Eigen::VectorXd>& y, int label) {
    const Eigen::Index c = y.size();
    if (c < 2) throw ArgumentError("retargeting needs at least two classes");
    if (label < 1 || label > c) throw ArgumentError("label outside 1..c");
    const Eigen::Index l = label - 1;

    RetargetedRow out;
    auto& diag = out.diag;
    diag.violations.resize(c - 1);
    diag.active = Eigen::VectorXi::Zero(c - 1);
    for (Eigen::Index j = 0, r = 0; j < c; ++j) {
        if (j == l) continue;
        diag.violations(r++) = y(j) + 1.0 - y(l);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(c - 1));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return diag.violations(a) > diag.violations(b); });

    // g(v_(m)) = m * v_(m) - sum_{k<m} v_(k) along the descending order.
    double prefix = 0.0;
    double active_sum = 0.0;
    int active_count = 0;
    for (std::size_t m = 0; m < order.size(); ++m) {
        const double v = diag.violations(order[m]);
        const double g = static_cast<double>(m + 1) * v - prefix;
        if (!(g > 0.0)) break;
        diag.active(order[m]) = 1;
        active_sum += v;
        ++active_count;
        prefix += v;
    }
    diag.delta = active_count == 0 ? 0.0 : active_sum / (1.0 + active_count);

    out.target = y;
    out.target(l) = y(l) + diag.delta;
    for (Eigen::Index j = 0, r = 0; j < c; ++j) {
        if (j == l) continue;
        out.target(j) = y(j) + std::min(diag.delta - diag.violations(r++), 0.0);
    }
    return out;
}

Eigen::MatrixXd retarget(const Eigen::MatrixXd& Y, std::span<const int> labels) {
    if (static_cast<Eigen::Index>(labels.size()) != Y.rows())
        throw ArgumentError("label count does not match regression output rows");
    Eigen::MatrixXd T(Y.rows(), Y.cols());
    for (Eigen::Index i = 0; i < Y.rows(); ++i)
        T.row(i) = retarget_row(Y.row(i).transpose(), labels[static_cast<std::size_t>(i)]).target.transpose();
    return T;
}

Eigen::MatrixXd init_targets(std::span<const int> labels, int num_classes) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > num_classes) throw ArgumentError("label outside 1..c");
        T(static_cast<Eigen::Index>(i), labels[i] - 1) = 1.0;
    }
    return T;
}

double target_margin(const Eigen::Ref<const Eigen::VectorXd>& t, int label) {
    double best_other = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < t.size(); ++j)
        if (j != label - 1) best_other = std::max(best_other, t(j));
    return t(label - 1) - best_other;
}

}  // namespace rlar
