#include <doctest.h>

#include <sstream>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "rlar/locality_graph.hpp"

using namespace rlar;

namespace {

LabeledDataset line_class(std::initializer_list<double> xs) {
    Eigen::MatrixXd x(1, static_cast<Index>(xs.size()));
    Index j = 0;
    for (double v : xs) x(0, j++) = v;
    return LabeledDataset::from_columns(x, std::vector<int>(xs.size(), 1), 1);
}

}  // namespace

TEST_CASE("update_distances") {
    SUBCASE("identity projection, K = 1") {
        Eigen::MatrixXd x(2, 2);
        x << 0, 2,
             1, 1;
        const auto ds = LabeledDataset::from_columns(x, {1, 1}, 1);
        auto graph = LocalityGraph::for_dataset(ds, 1);
        update_distances(graph, Eigen::MatrixXd::Identity(2, 2), ds);
        CHECK(graph.blocks[0].distances(0, 1) == doctest::Approx(2.0));
        CHECK(graph.blocks[0].distances(0, 0) == 0.0);
    }
    SUBCASE("null projection") {
        std::mt19937_64 rng(2);
        const auto ds = testing::random_dataset(rng, 4, {5, 3});
        auto graph = LocalityGraph::for_dataset(ds, 2);
        update_distances(graph, Eigen::MatrixXd::Zero(4, 2), ds);
        for (const auto& b : graph.blocks) CHECK(b.distances.isZero());
    }
    SUBCASE("matches per-pair norms on a random class") {
        std::mt19937_64 rng(4);
        const auto ds = testing::random_dataset(rng, 6, {5, 4});
        const Eigen::MatrixXd W = testing::random_matrix(rng, 6, 2);
        const int K = 3;
        auto graph = LocalityGraph::for_dataset(ds, K);
        update_distances(graph, W, ds);
        const Eigen::MatrixXd z = W.transpose() * ds.features;
        for (const auto& b : graph.blocks) {
            for (std::size_t r = 0; r < b.members.size(); ++r)
                for (std::size_t s = 0; s < b.members.size(); ++s) {
                    const double expected = K * testing::naive_distance(z, b.members[r], b.members[s]);
                    CHECK(std::abs(b.distances(static_cast<Index>(r), static_cast<Index>(s)) - expected) <= 1e-12);
                }
        }
    }
}

TEST_CASE("update_connections") {
    SUBCASE("points on a line, K = 1") {
        const auto ds = line_class({0.0, 1.0, 3.0});
        auto graph = LocalityGraph::for_dataset(ds, 1);
        init_distances(graph, ds);
        update_connections(graph);
        const auto& v = graph.blocks[0].connections;
        CHECK(v(0, 1) == 1.0);
        CHECK(v(2, 1) == 1.0);
        CHECK(v.rowwise().sum().isOnes());
    }
    SUBCASE("K clipped to n_i - 1") {
        const auto ds = line_class({0.0, 1.0});
        auto graph = LocalityGraph::for_dataset(ds, 7);
        CHECK(graph.blocks[0].k_eff == 1);
        init_distances(graph, ds);
        update_connections(graph);
        CHECK(graph.blocks[0].connections(0, 1) == 1.0);
        CHECK(graph.blocks[0].connections(1, 0) == 1.0);
    }
    SUBCASE("equidistant triple breaks ties by lowest index") {
        Eigen::MatrixXd g = Eigen::MatrixXd::Constant(3, 3, 1.0);
        g.diagonal().setZero();
        const auto v = select_neighbors(g, 1);
        CHECK(v(0, 1) == 1.0);
        CHECK(v(1, 0) == 1.0);
        CHECK(v(2, 0) == 1.0);
    }
    SUBCASE("row sums, zero diagonal, block structure") {
        std::mt19937_64 rng(8);
        const auto ds = testing::random_dataset(rng, 3, {6, 2, 9});
        auto graph = LocalityGraph::for_dataset(ds, 3);
        init_distances(graph, ds);
        update_connections(graph);
        for (const auto& b : graph.blocks) {
            CHECK(b.connections.diagonal().isZero());
            for (Index j = 0; j < b.connections.rows(); ++j) CHECK(b.connections.row(j).sum() == b.k_eff);
        }
        const Eigen::MatrixXd dense = graph.dense_connections(ds.size());
        for (Index j = 0; j < ds.size(); ++j)
            for (Index l = 0; l < ds.size(); ++l)
                if (ds.labels[static_cast<std::size_t>(j)] != ds.labels[static_cast<std::size_t>(l)])
                    CHECK(dense(j, l) == 0.0);
    }
    SUBCASE("attains the enumerated optimum") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 50; ++trial) {
            const Index m = 2 + static_cast<Index>(rng() % 7);
            Eigen::MatrixXd g = testing::random_matrix(rng, m, m, 0.0, 1.0);
            g = (g + g.transpose()).eval();
            g.diagonal().setZero();
            const int k_eff = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m - 1));
            const auto v = select_neighbors(g, k_eff);
            for (Index j = 0; j < m; ++j) {
                const double got = v.row(j).dot(g.row(j));
                CHECK(got == doctest::Approx(testing::enumerate_min_selection(g.row(j).transpose(), j, k_eff)).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("update_affinity") {
    Eigen::MatrixXd v(2, 2), g(2, 2);
    v << 0, 1,
         0, 0;
    g << 0, 0.5,
         0, 0;
    const auto s = affinity_from(v, g, 1, 1e-8);
    CHECK(s(0, 1) == 2.0);
    CHECK(s(1, 0) == 0.0);
    CHECK(s(0, 0) == 0.0);

    g(0, 1) = 0.0;
    CHECK(affinity_from(v, g, 1, 1e-8)(0, 1) == doctest::Approx(1e8));
    CHECK(affinity_from(v, g, 4, 1e-8)(0, 1) == doctest::Approx(0.25e8));
}

TEST_CASE("build_laplacian") {
    SUBCASE("empty graph") {
        const auto [deg, lap] = laplacian_from(Eigen::MatrixXd::Zero(3, 3));
        CHECK(lap.isZero());
        CHECK(deg.isZero());
    }
    SUBCASE("two nodes") {
        Eigen::MatrixXd s(2, 2);
        s << 0, 1,
             1, 0;
        const auto [deg, lap] = laplacian_from(s);
        Eigen::MatrixXd expected(2, 2);
        expected << 1, -1,
                   -1, 1;
        CHECK(lap == expected);
    }
    SUBCASE("quadratic form, symmetry, null vector, semidefiniteness") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            const Index m = 2 + static_cast<Index>(rng() % 9);
            Eigen::MatrixXd s = testing::random_matrix(rng, m, m, 0.0, 3.0);
            s.diagonal().setZero();
            const auto [deg, lap] = laplacian_from(s);
            const Eigen::VectorXd x = testing::random_vector(rng, m);
            const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
            double expected = 0.0;
            for (Index j = 0; j < m; ++j)
                for (Index l = 0; l < m; ++l) expected += 0.5 * sym(j, l) * (x(j) - x(l)) * (x(j) - x(l));
            CHECK(std::abs(x.dot(lap * x) - expected) <= 1e-10 * std::max(1.0, expected));
            CHECK((lap - lap.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK((lap * Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff() <= 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        }
    }
}

TEST_CASE("locality scatter matches the weighted pairwise sum") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ds = testing::random_dataset(rng, 5, {4, 6, 3});
        const Eigen::MatrixXd W = testing::random_matrix(rng, 5, 3);
        auto graph = LocalityGraph::for_dataset(ds, 2);
        init_distances(graph, ds);
        update_connections(graph);
        update_affinity(graph, 1e-8);
        const auto lap = build_laplacian(graph);
        const double trace = (W.transpose() * locality_scatter(ds.features, graph, lap) * W).trace();

        const Eigen::MatrixXd s = graph.dense_affinity(ds.size());
        const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
        const Eigen::MatrixXd z = W.transpose() * ds.features;
        double expected = 0.0;
        for (Index j = 0; j < ds.size(); ++j)
            for (Index l = 0; l < ds.size(); ++l)
                expected += 0.5 * sym(j, l) * std::pow(testing::naive_distance(z, j, l), 2);
        CHECK(std::abs(trace - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
        CHECK((lap.dense(graph, ds.size()) * Eigen::VectorXd::Ones(ds.size())).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("coordinate-list dump") {
    const auto ds = line_class({0.0, 1.0, 3.0});
    auto graph = LocalityGraph::for_dataset(ds, 1);
    init_distances(graph, ds);
    update_connections(graph);
    update_affinity(graph, 1e-8);
    std::ostringstream os;
    write_coo_csv(os, graph, GraphMatrix::Connections);
    CHECK(os.str() == "row,col,value\n0,1,1\n1,0,1\n2,1,1\n");
}
