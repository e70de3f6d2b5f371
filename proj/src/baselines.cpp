#include "rlar/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "rlar/errors.hpp"

namespace rlar {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> scatter_matrices(const LabeledDataset& ds) {
    const Index d = ds.dim();
    const Eigen::VectorXd mean = ds.features.rowwise().mean();
    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d, d);
    for (const auto& members : ds.class_index) {
        Eigen::MatrixXd xc(d, static_cast<Index>(members.size()));
        for (std::size_t r = 0; r < members.size(); ++r) xc.col(static_cast<Index>(r)) = ds.features.col(members[r]);
        const Eigen::VectorXd class_mean = xc.rowwise().mean();
        xc.colwise() -= class_mean;
        sw.noalias() += xc * xc.transpose();
        const Eigen::VectorXd shift = class_mean - mean;
        sb.noalias() += static_cast<double>(members.size()) * shift * shift.transpose();
    }
    return {0.5 * (sw + sw.transpose()), 0.5 * (sb + sb.transpose())};
}

double fisher_ratio(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Sw, const Eigen::MatrixXd& Sb) {
    return (W.transpose() * Sb * W).trace() / (W.transpose() * Sw * W).trace();
}

LdaModel fit_lda(const LabeledDataset& ds, int out_dim) {
    const int c = ds.num_classes();
    if (out_dim == 0) out_dim = c - 1;
    if (out_dim < 1 || out_dim > c - 1) throw ArgumentError("LDA output dimension must lie in 1..c-1");
    if (out_dim > ds.dim()) out_dim = static_cast<int>(ds.dim());
    for (int i = 1; i <= c; ++i)
        if (ds.class_size(i) < 2) throw DataError("LDA needs at least two samples per class");

    LdaModel model;
    std::tie(model.Sw, model.Sb) = scatter_matrices(ds);
    const Index d = ds.dim();
    double ridge = 1e-6 * model.Sw.trace() / static_cast<double>(d);
    if (!(ridge > 0.0)) ridge = 1e-12;
    Eigen::MatrixXd regularized = model.Sw;
    regularized.diagonal().array() += ridge;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.Sb, regularized);
    if (solver.info() != Eigen::Success) throw NumericalError("LDA generalized eigensolver failed");
    // eigenvalues ascending; keep the largest
    model.W = solver.eigenvectors().rightCols(out_dim).rowwise().reverse();
    return model;
}

RidgeModel fit_ridge(const LabeledDataset& ds, double lambda) {
    if (!(lambda >= 0.0)) throw ArgumentError("ridge lambda must be nonnegative");
    const Index n = ds.size();
    const int c = ds.num_classes();
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, c);
    for (Index j = 0; j < n; ++j) targets(j, ds.labels[static_cast<std::size_t>(j)] - 1) = 1.0;

    const Eigen::VectorXd x_mean = ds.features.rowwise().mean();
    const Eigen::RowVectorXd y_mean = targets.colwise().mean();
    const Eigen::MatrixXd xc = ds.features.colwise() - x_mean;
    const Eigen::MatrixXd yc = targets.rowwise() - y_mean;

    Eigen::MatrixXd system = xc * xc.transpose();
    system.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) throw NumericalError("ridge system is singular");

    RidgeModel model;
    model.lambda = lambda;
    model.W = llt.solve(xc * yc);
    if (lambda == 0.0) {
        // LLT accepts some semidefinite matrices; reject rank deficiency explicitly.
        const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
        if (diag.minCoeff() <= 1e-10 * std::max(1.0, diag.maxCoeff()))
            throw NumericalError("ridge system is singular");
    }
    if (!model.W.allFinite()) throw NumericalError("ridge solution is not finite");
    model.b = y_mean.transpose() - model.W.transpose() * x_mean;
    return model;
}

ScatterIdentity pairwise_scatter_identity_check(const Eigen::MatrixXd& class_samples) {
    ScatterIdentity out;
    const Index n = class_samples.cols();
    if (n == 0) return out;
    const Eigen::VectorXd mean = class_samples.rowwise().mean();
    out.lhs = (class_samples.colwise() - mean).colwise().squaredNorm().sum();
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) out.rhs += (class_samples.col(j) - class_samples.col(k)).squaredNorm();
    out.rhs /= 2.0 * static_cast<double>(n);
    return out;
}

double retarget_cost(double delta, const Eigen::VectorXd& violations) {
    double sq = delta * delta;
    for (Index j = 0; j < violations.size(); ++j) {
        const double gap = std::min(delta - violations(j), 0.0);
        sq += gap * gap;
    }
    return std::sqrt(sq);
}

double brute_force_retarget_row(const Eigen::VectorXd& y, int label, int resolution) {
    if (resolution < 2) throw ArgumentError("grid resolution must be at least 2");
    const Index c = y.size();
    Eigen::VectorXd v(c - 1);
    for (Index j = 0, r = 0; j < c; ++j)
        if (j != label - 1) v(r++) = y(j) + 1.0 - y(label - 1);
    const double upper = std::max(v.maxCoeff(), 0.0) + 1.0;
    const double step = upper / (resolution - 1);
    double best = 0.0;
    double best_cost = retarget_cost(0.0, v);
    for (int i = 1; i < resolution; ++i) {
        const double delta = step * i;
        const double cost = retarget_cost(delta, v);
        if (cost < best_cost) {
            best_cost = cost;
            best = delta;
        }
    }
    return best;
}

}  // namespace rlar
