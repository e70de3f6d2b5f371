#pragma once

#include <Eigen/Dense>

#include "rlar/dataset.hpp"

namespace rlar {

struct LdaModel {
    Eigen::MatrixXd W;   // d x out_dim
    Eigen::MatrixXd Sw;  // within-class scatter
    Eigen::MatrixXd Sb;  // between-class scatter
};

/// Fisher LDA. Columns of W are the leading generalized eigenvectors of
/// (Sb, Sw + r I) with r = 1e-6 * trace(Sw) / d; out_dim = 0 means c - 1.
LdaModel fit_lda(const LabeledDataset& ds, int out_dim = 0);

/// Within- and between-class scatter matrices.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> scatter_matrices(const LabeledDataset& ds);

/// Tr(W^T Sb W) / Tr(W^T Sw W).
double fisher_ratio(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Sw, const Eigen::MatrixXd& Sb);

struct RidgeModel {
    Eigen::MatrixXd W;  // d x c
    Eigen::VectorXd b;
    double lambda = 0.0;
};

/// Centered ridge regression onto zero-one indicator targets:
/// min sum_i ||W^T x_i + b - y_i||^2 + lambda ||W||_F^2.
RidgeModel fit_ridge(const LabeledDataset& ds, double lambda);

struct ScatterIdentity {
    double lhs = 0.0;  // sum_j ||x_j - mean||^2
    double rhs = 0.0;  // sum_{j,k} ||x_j - x_k||^2 / (2 n)
};

/// Both sides of the point-to-mean / pairwise scatter identity for one class (d x n_i).
ScatterIdentity pairwise_scatter_identity_check(const Eigen::MatrixXd& class_samples);

/// sqrt(delta^2 + sum_j min(delta - v_j, 0)^2), the row cost of a target step.
double retarget_cost(double delta, const Eigen::VectorXd& violations);

/// Grid argmin of retarget_cost over [0, max(v, 0) + 1] with `resolution`
/// evenly spaced points. Test oracle for retarget_row.
double brute_force_retarget_row(const Eigen::VectorXd& y, int label, int resolution = 10000);

}  // namespace rlar
