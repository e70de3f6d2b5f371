#include "rlar/locality_graph.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "rlar/errors.hpp"

namespace rlar {

LocalityGraph LocalityGraph::for_dataset(const LabeledDataset& ds, int k) {
    if (k < 1) throw ArgumentError("neighbor count K must be positive");
    LocalityGraph graph;
    graph.k = k;
    graph.blocks.reserve(ds.class_index.size());
    for (const auto& members : ds.class_index) {
        ClassBlock block;
        block.members = members;
        const auto n_i = static_cast<Index>(members.size());
        block.k_eff = static_cast<int>(std::min<Index>(k, n_i - 1));
        block.connections = Eigen::MatrixXd::Zero(n_i, n_i);
        block.distances = Eigen::MatrixXd::Zero(n_i, n_i);
        block.affinity = Eigen::MatrixXd::Zero(n_i, n_i);
        graph.blocks.push_back(std::move(block));
    }
    return graph;
}

Index LocalityGraph::size() const {
    Index n = 0;
    for (const auto& b : blocks) n += static_cast<Index>(b.members.size());
    return n;
}

namespace {

Eigen::MatrixXd scatter_dense(const LocalityGraph& graph, Index n, Eigen::MatrixXd ClassBlock::*field) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (const auto& b : graph.blocks) {
        const auto& m = b.*field;
        for (std::size_t r = 0; r < b.members.size(); ++r)
            for (std::size_t s = 0; s < b.members.size(); ++s)
                out(b.members[r], b.members[s]) = m(static_cast<Index>(r), static_cast<Index>(s));
    }
    return out;
}

}  // namespace

Eigen::MatrixXd LocalityGraph::dense_connections(Index n) const {
    return scatter_dense(*this, n, &ClassBlock::connections);
}

Eigen::MatrixXd LocalityGraph::dense_affinity(Index n) const {
    return scatter_dense(*this, n, &ClassBlock::affinity);
}

Eigen::MatrixXd GraphLaplacian::dense(const LocalityGraph& graph, Index n) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t c = 0; c < graph.blocks.size(); ++c) {
        const auto& members = graph.blocks[c].members;
        for (std::size_t r = 0; r < members.size(); ++r)
            for (std::size_t s = 0; s < members.size(); ++s)
                out(members[r], members[s]) = laplacian[c](static_cast<Index>(r), static_cast<Index>(s));
    }
    return out;
}

Eigen::MatrixXd scaled_distances(const Eigen::MatrixXd& projected, int k) {
    const Index m = projected.cols();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (Index j = 0; j < m; ++j) {
        for (Index l = j + 1; l < m; ++l) {
            const double dist = k * (projected.col(j) - projected.col(l)).norm();
            g(j, l) = dist;
            g(l, j) = dist;
        }
    }
    return g;
}

Eigen::MatrixXd select_neighbors(const Eigen::MatrixXd& distances, int k_eff) {
    const Index m = distances.rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, m);
    if (m < 2 || k_eff < 1) return v;
    const auto take = static_cast<std::size_t>(std::min<Index>(k_eff, m - 1));
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(m - 1));
    for (Index j = 0; j < m; ++j) {
        order.clear();
        for (Index l = 0; l < m; ++l)
            if (l != j) order.push_back(l);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](Index a, Index b) {
                              const double da = distances(j, a);
                              const double db = distances(j, b);
                              return da < db || (da == db && a < b);
                          });
        for (std::size_t t = 0; t < take; ++t) v(j, order[t]) = 1.0;
    }
    return v;
}

Eigen::MatrixXd affinity_from(const Eigen::MatrixXd& connections, const Eigen::MatrixXd& distances, int k,
                              double eps) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(connections.rows(), connections.cols());
    for (Index j = 0; j < connections.rows(); ++j) {
        for (Index l = 0; l < connections.cols(); ++l) {
            if (connections(j, l) == 0.0) continue;
            s(j, l) = connections(j, l) / std::max(distances(j, l), k * eps);
        }
    }
    return s;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> laplacian_from(const Eigen::MatrixXd& affinity) {
    const Eigen::MatrixXd sym = 0.5 * (affinity + affinity.transpose());
    Eigen::VectorXd degree = sym.rowwise().sum();
    Eigen::MatrixXd lap = -sym;
    lap.diagonal() += degree;
    return {std::move(degree), std::move(lap)};
}

void update_distances(LocalityGraph& graph, const Eigen::MatrixXd& W, const LabeledDataset& ds) {
    if (W.rows() != ds.dim()) throw ArgumentError("projection rows do not match feature dimension");
    for (auto& block : graph.blocks) {
        Eigen::MatrixXd projected(W.cols(), static_cast<Index>(block.members.size()));
        for (std::size_t r = 0; r < block.members.size(); ++r)
            projected.col(static_cast<Index>(r)) = W.transpose() * ds.features.col(block.members[r]);
        block.distances = scaled_distances(projected, graph.k);
    }
}

void init_distances(LocalityGraph& graph, const LabeledDataset& ds) {
    for (auto& block : graph.blocks) {
        Eigen::MatrixXd raw(ds.dim(), static_cast<Index>(block.members.size()));
        for (std::size_t r = 0; r < block.members.size(); ++r)
            raw.col(static_cast<Index>(r)) = ds.features.col(block.members[r]);
        block.distances = scaled_distances(raw, graph.k);
    }
}

void update_connections(LocalityGraph& graph) {
    for (auto& block : graph.blocks) block.connections = select_neighbors(block.distances, block.k_eff);
}

void update_affinity(LocalityGraph& graph, double eps) {
    for (auto& block : graph.blocks) block.affinity = affinity_from(block.connections, block.distances, graph.k, eps);
}

GraphLaplacian build_laplacian(const LocalityGraph& graph) {
    GraphLaplacian lap;
    lap.degree.reserve(graph.blocks.size());
    lap.laplacian.reserve(graph.blocks.size());
    for (const auto& block : graph.blocks) {
        auto [degree, l] = laplacian_from(block.affinity);
        lap.degree.push_back(std::move(degree));
        lap.laplacian.push_back(std::move(l));
    }
    return lap;
}

Eigen::MatrixXd locality_scatter(const Eigen::MatrixXd& X, const LocalityGraph& graph, const GraphLaplacian& lap) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), X.rows());
    for (std::size_t c = 0; c < graph.blocks.size(); ++c) {
        const auto& members = graph.blocks[c].members;
        Eigen::MatrixXd xc(X.rows(), static_cast<Index>(members.size()));
        for (std::size_t r = 0; r < members.size(); ++r) xc.col(static_cast<Index>(r)) = X.col(members[r]);
        out.noalias() += xc * lap.laplacian[c] * xc.transpose();
    }
    return 0.5 * (out + out.transpose());
}

double connected_distance_sum(const LocalityGraph& graph, const Eigen::MatrixXd& projected) {
    double total = 0.0;
    for (const auto& block : graph.blocks) {
        const auto m = static_cast<Index>(block.members.size());
        for (Index j = 0; j < m; ++j)
            for (Index l = 0; l < m; ++l)
                if (block.connections(j, l) != 0.0)
                    total += block.connections(j, l) *
                             (projected.col(block.members[static_cast<std::size_t>(j)]) -
                              projected.col(block.members[static_cast<std::size_t>(l)]))
                                 .norm();
    }
    return total;
}

void write_coo_csv(std::ostream& out, const LocalityGraph& graph, GraphMatrix which) {
    out << "row,col,value\n";
    const auto old_precision = out.precision(17);
    for (const auto& block : graph.blocks) {
        const auto& m = which == GraphMatrix::Connections ? block.connections : block.affinity;
        for (Index j = 0; j < m.rows(); ++j)
            for (Index l = 0; l < m.cols(); ++l)
                if (m(j, l) != 0.0)
                    out << block.members[static_cast<std::size_t>(j)] << ',' << block.members[static_cast<std::size_t>(l)]
                        << ',' << m(j, l) << '\n';
    }
    out.precision(old_precision);
}

}  // namespace rlar
