#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "rlar/dataset.hpp"

namespace rlar {

/// One class's share of the intra-class KNN graph. Local row/column r
/// corresponds to dataset column members[r].
struct ClassBlock {
    std::vector<Index> members;
    int k_eff = 0;                  // min(K, n_i - 1)
    Eigen::MatrixXd connections;    // V, binary
    Eigen::MatrixXd distances;      // G = K * projected distance, zero diagonal
    Eigen::MatrixXd affinity;       // S = V / max(G, K eps)
};

/// Block-diagonal graph over a labeled dataset; blocks follow class order.
struct LocalityGraph {
    int k = 1;
    std::vector<ClassBlock> blocks;

    /// Allocates one zero block per class of `ds`.
    static LocalityGraph for_dataset(const LabeledDataset& ds, int k);

    Index size() const;
    /// Dense n x n views, for tests and dumps only.
    Eigen::MatrixXd dense_connections(Index n) const;
    Eigen::MatrixXd dense_affinity(Index n) const;
};

/// Per-class blocks of D and L = D - (S + S^T)/2.
struct GraphLaplacian {
    std::vector<Eigen::VectorXd> degree;
    std::vector<Eigen::MatrixXd> laplacian;

    Eigen::MatrixXd dense(const LocalityGraph& graph, Index n) const;
};

// Block-level primitives.

/// K * pairwise Euclidean distances between the columns of `projected`.
Eigen::MatrixXd scaled_distances(const Eigen::MatrixXd& projected, int k);

/// Binary rows selecting the k_eff smallest off-diagonal entries of each row
/// of `distances`; ties go to the lower column index.
Eigen::MatrixXd select_neighbors(const Eigen::MatrixXd& distances, int k_eff);

/// V / max(G, k * eps) elementwise: 0 where V = 0, 1/(k * eps) for a connected
/// pair at distance 0. The guard matches the one on the IRLS reweights and
/// keeps S bounded when the projection collapses.
Eigen::MatrixXd affinity_from(const Eigen::MatrixXd& connections, const Eigen::MatrixXd& distances, int k,
                              double eps);

/// Degree vector and Laplacian of a nonnegative affinity block.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> laplacian_from(const Eigen::MatrixXd& affinity);

// Graph-level updates used by the solver.

/// G from the projection W (d x c): G[j,k] = K * ||W^T x_j - W^T x_k|| within each class.
void update_distances(LocalityGraph& graph, const Eigen::MatrixXd& W, const LabeledDataset& ds);
/// G from raw features, i.e. W = I.
void init_distances(LocalityGraph& graph, const LabeledDataset& ds);
void update_connections(LocalityGraph& graph);
void update_affinity(LocalityGraph& graph, double eps);
GraphLaplacian build_laplacian(const LocalityGraph& graph);

/// X L X^T (d x d) accumulated class by class.
Eigen::MatrixXd locality_scatter(const Eigen::MatrixXd& X, const LocalityGraph& graph, const GraphLaplacian& lap);

/// Sum over blocks of V[j,k] * ||z_j - z_k|| for projected samples z = W^T X.
double connected_distance_sum(const LocalityGraph& graph, const Eigen::MatrixXd& projected);

enum class GraphMatrix { Connections, Affinity };

/// Nonzero entries as "row,col,value" lines with dataset column indices.
void write_coo_csv(std::ostream& out, const LocalityGraph& graph, GraphMatrix which);

}  // namespace rlar
