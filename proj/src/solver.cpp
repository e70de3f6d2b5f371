#include "rlar/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "rlar/errors.hpp"
#include "rlar/retarget.hpp"

namespace rlar {

void HyperParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be positive");
    if (k < 1) throw ArgumentError("K must be positive");
    if (max_iter < 1) throw ArgumentError("max_iter must be positive");
    if (!(eps > 0.0)) throw ArgumentError("eps must be positive");
    if (!(tol >= 0.0)) throw ArgumentError("tol must be nonnegative");
}

Eigen::MatrixXd regression_output(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, const Eigen::VectorXd& b) {
    Eigen::MatrixXd Y = X.transpose() * W;
    Y.rowwise() += b.transpose();
    return Y;
}

double objective(const LabeledDataset& ds, const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                 const Eigen::MatrixXd& T, const LocalityGraph& graph, double alpha, double beta) {
    const double loss = (regression_output(ds.features, W, b) - T).rowwise().norm().sum();
    const double sparsity = W.rowwise().norm().sum();
    const Eigen::MatrixXd projected = W.transpose() * ds.features;
    const double locality = connected_distance_sum(graph, projected) / (2.0 * graph.k);
    return loss + alpha * sparsity + beta * locality;
}

Eigen::VectorXd update_b(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, const Eigen::MatrixXd& T,
                         const Eigen::VectorXd& d_hat) {
    const Eigen::MatrixXd residual = T.transpose() - W.transpose() * X;  // c x n
    return residual * d_hat / d_hat.sum();
}

Eigen::MatrixXd update_w(const Eigen::MatrixXd& X, const Eigen::MatrixXd& T, const Eigen::VectorXd& d_hat,
                         const Eigen::VectorXd& d_tilde, const Eigen::MatrixXd& locality, double alpha, double beta) {
    const double mass = d_hat.sum();
    const Eigen::MatrixXd xd = X * d_hat.asDiagonal();  // X D^
    const Eigen::VectorXd xd1 = xd.rowwise().sum();     // X D^ 1
    const Eigen::RowVectorXd td1 = d_hat.transpose() * T;  // 1^T D^ T

    Eigen::MatrixXd system = xd * X.transpose();
    system.noalias() -= xd1 * xd1.transpose() / mass;
    system += beta * locality;
    system.diagonal() += alpha * d_tilde;
    system = 0.5 * (system + system.transpose());

    Eigen::MatrixXd rhs = xd * T;
    rhs.noalias() -= xd1 * td1 / mass;

    if (!system.allFinite() || !rhs.allFinite()) throw NumericalError("non-finite entries in the W system");

    // The reweights span many orders of magnitude; solve the symmetrically
    // scaled system S A S (S^-1 W) = S B with S = diag(A)^-1/2.
    const Eigen::VectorXd scale = system.diagonal().cwiseSqrt().cwiseInverse();
    if (!scale.allFinite()) throw NumericalError("W system has a non-positive diagonal");
    const Eigen::MatrixXd scaled = scale.asDiagonal() * system * scale.asDiagonal();
    const Eigen::MatrixXd scaled_rhs = scale.asDiagonal() * rhs;

    Eigen::MatrixXd W;
    Eigen::LLT<Eigen::MatrixXd> llt(scaled);
    if (llt.info() == Eigen::Success) {
        W = scale.asDiagonal() * llt.solve(scaled_rhs);
    } else {
        // PD in exact arithmetic; rounding can still defeat plain Cholesky
        Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
        if (ldlt.info() != Eigen::Success) throw NumericalError("W system factorization failed");
        W = scale.asDiagonal() * ldlt.solve(scaled_rhs);
    }
    if (!W.allFinite()) throw NumericalError("W solve produced non-finite values");
    return W;
}

ReweightState update_reweights(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, const Eigen::VectorXd& b,
                               const Eigen::MatrixXd& T, double eps) {
    ReweightState state;
    const Eigen::VectorXd residual_norms = (regression_output(X, W, b) - T).rowwise().norm();
    state.d_hat = (residual_norms.array() + eps).inverse();
    state.d_tilde = (W.rowwise().norm().array() + eps).inverse();
    return state;
}

FitResult fit(const LabeledDataset& ds, const HyperParams& params) {
    params.validate();
    for (int i = 1; i <= ds.num_classes(); ++i)
        if (ds.class_size(i) < 2)
            throw DataError("class " + ds.class_names[static_cast<std::size_t>(i - 1)] +
                            " has a single sample; the locality graph needs at least two per class");

    const Eigen::MatrixXd& X = ds.features;
    const int c = ds.num_classes();
    using Clock = std::chrono::steady_clock;

    FitResult result;
    RlarModel& model = result.model;
    model.params = params;
    model.graph = LocalityGraph::for_dataset(ds, params.k);
    init_distances(model.graph, ds);
    model.T = init_targets(ds.labels, c);
    model.W = Eigen::MatrixXd::Zero(ds.dim(), c);
    model.b = Eigen::VectorXd::Zero(c);

    ReweightState weights{Eigen::VectorXd::Ones(ds.size()), Eigen::VectorXd::Ones(ds.dim())};

    for (int iter = 0; iter < params.max_iter; ++iter) {
        const auto start = Clock::now();
        try {
            update_connections(model.graph);
            update_affinity(model.graph, params.eps);
            const GraphLaplacian lap = build_laplacian(model.graph);
            const Eigen::MatrixXd locality = locality_scatter(X, model.graph, lap);

            model.W = update_w(X, model.T, weights.d_hat, weights.d_tilde, locality, params.alpha, params.beta);
            model.b = update_b(X, model.W, model.T, weights.d_hat);
            model.T = retarget(regression_output(X, model.W, model.b), ds.labels);
            weights = update_reweights(X, model.W, model.b, model.T, params.eps);
            update_distances(model.graph, model.W, ds);
        } catch (const NumericalError& e) {
            throw NumericalError("iteration " + std::to_string(iter + 1) + ": " + e.what());
        }

        const double value = objective(ds, model.W, model.b, model.T, model.graph, params.alpha, params.beta);
        if (!std::isfinite(value))
            throw NumericalError("iteration " + std::to_string(iter + 1) + ": objective is not finite");
        result.trace.objective.push_back(value);
        result.trace.row_norms.push_back(model.W.rowwise().norm());
        result.trace.wall_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());

        const auto& obj = result.trace.objective;
        if (params.tol > 0.0 && obj.size() >= 2) {
            const double prev = obj[obj.size() - 2];
            if (std::abs(prev - value) <= params.tol * std::max(std::abs(prev), 1e-300)) break;
        }
    }
    model.final_objective = result.trace.objective.back();
    return result;
}

Eigen::MatrixXd transform(const RlarModel& model, const Eigen::MatrixXd& X_new) {
    if (X_new.rows() != model.W.rows())
        throw ArgumentError("expected " + std::to_string(model.W.rows()) + " features, got " +
                            std::to_string(X_new.rows()));
    return model.W.transpose() * X_new;
}

}  // namespace rlar
