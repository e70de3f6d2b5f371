#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rlar/dataset.hpp"
#include "rlar/locality_graph.hpp"

namespace rlar {

struct HyperParams {
    double alpha = 1.0;  // row-sparsity penalty on W
    double beta = 1.0;   // weight of the locality term
    int k = 3;           // neighbors per sample
    int max_iter = 30;
    double eps = 1e-8;   // reweighting guard
    double tol = 0.0;    // relative objective change for early stop, 0 disables

    void validate() const;
};

/// IRLS diagonals for the two L2,1 terms.
struct ReweightState {
    Eigen::VectorXd d_hat;    // per sample: 1 / (||residual_i|| + eps)
    Eigen::VectorXd d_tilde;  // per feature: 1 / (||W_i|| + eps)
};

struct RlarModel {
    Eigen::MatrixXd W;  // d x c
    Eigen::VectorXd b;  // c
    Eigen::MatrixXd T;  // n x c learned targets
    LocalityGraph graph;
    HyperParams params;
    double final_objective = 0.0;
};

struct FitTrace {
    std::vector<double> objective;
    std::vector<Eigen::VectorXd> row_norms;  // ||W_i|| after each iteration
    std::vector<double> wall_ms;
};

struct FitResult {
    RlarModel model;
    FitTrace trace;
};

/// Regression outputs X^T W + 1 b^T (n x c).
Eigen::MatrixXd regression_output(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, const Eigen::VectorXd& b);

/// sum_i ||X^T W + 1b^T - T||_row + alpha * sum_i ||W_i|| + beta * sum V_jk/(2K) ||W^T x_j - W^T x_k||.
double objective(const LabeledDataset& ds, const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                 const Eigen::MatrixXd& T, const LocalityGraph& graph, double alpha, double beta);

/// Weighted mean offset: (T^T - W^T X) D 1 / (1^T D 1).
Eigen::VectorXd update_b(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, const Eigen::MatrixXd& T,
                         const Eigen::VectorXd& d_hat);

/// Solves (X H X^T + alpha D~ + beta X L X^T) W = X H T with
/// H = D^ - D^11^T D^ / (1^T D^ 1). `locality` is X L X^T.
/// Throws NumericalError if the system is not positive definite or the
/// solution is not finite.
Eigen::MatrixXd update_w(const Eigen::MatrixXd& X, const Eigen::MatrixXd& T, const Eigen::VectorXd& d_hat,
                         const Eigen::VectorXd& d_tilde, const Eigen::MatrixXd& locality, double alpha, double beta);

ReweightState update_reweights(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                               const Eigen::MatrixXd& T, double eps);

/// Alternating minimization. Expects normalized features and at least two
/// samples per class.
FitResult fit(const LabeledDataset& ds, const HyperParams& params);

/// W^T X_new (c x m); the bias is a rigid shift and is left out.
Eigen::MatrixXd transform(const RlarModel& model, const Eigen::MatrixXd& X_new);

}  // namespace rlar
