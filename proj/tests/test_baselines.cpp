#include <doctest.h>

#include "oracles.hpp"
#include "rlar/baselines.hpp"
#include "rlar/errors.hpp"
#include "rlar/retarget.hpp"

using namespace rlar;

namespace {

LabeledDataset iris() {
    CsvOptions opts;
    opts.has_header = true;
    return normalize_min_max(load_csv(std::string(RLAR_DATA_DIR) + "/iris.csv", opts));
}

// cosines of the principal angles between the column spans of A and B
Eigen::VectorXd principal_cosines(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const Eigen::MatrixXd qa = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ() *
                               Eigen::MatrixXd::Identity(A.rows(), A.cols());
    const Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(B).householderQ() *
                               Eigen::MatrixXd::Identity(B.rows(), B.cols());
    return Eigen::JacobiSVD<Eigen::MatrixXd>(qa.transpose() * qb).singularValues();
}

}  // namespace

TEST_CASE("LDA on two classes separated along one axis") {
    Eigen::MatrixXd x(2, 6);
    x << 0.0, 0.1, 0.2, 1.0, 1.1, 1.2,
         0.0, 1.0, 0.0, 0.0, 1.0, 0.0;
    const auto ds = LabeledDataset::from_columns(x, {1, 1, 1, 2, 2, 2}, 2);
    const auto lda = fit_lda(ds);
    REQUIRE(lda.W.cols() == 1);
    const Eigen::VectorXd w = lda.W.col(0).normalized();
    CHECK(std::abs(w(0)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("LDA on Iris") {
    const auto ds = iris();
    const auto lda = fit_lda(ds);
    CHECK(lda.W.rows() == 4);
    CHECK(lda.W.cols() == 2);
    CHECK(fit_lda(ds, 1).W.cols() == 1);
}

TEST_CASE("LDA direction beats random projections on the Fisher ratio") {
    std::mt19937_64 rng(3);
    const auto ds = testing::random_dataset(rng, 5, {12, 12}, 0.2);
    const auto lda = fit_lda(ds);
    const auto [Sw, Sb] = scatter_matrices(ds);
    const double best = fisher_ratio(lda.W, Sw, Sb);
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100; ++t) {
        const Eigen::MatrixXd w = testing::random_matrix(rng, 5, 1);
        worst_gap = std::min(worst_gap, best - fisher_ratio(w, Sw, Sb));
    }
    CHECK(worst_gap >= -1e-9 * best);
}

TEST_CASE("LDA subspace is invariant to relabeling classes") {
    std::mt19937_64 rng(5);
    const auto ds = testing::random_dataset(rng, 6, {8, 9, 10});
    std::vector<int> permuted = ds.labels;
    for (int& l : permuted) l = l % 3 + 1;
    const auto relabeled = LabeledDataset::from_columns(ds.features, permuted, 3);
    const Eigen::VectorXd cosines = principal_cosines(fit_lda(ds).W, fit_lda(relabeled).W);
    CHECK((Eigen::VectorXd::Ones(cosines.size()) - cosines).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("ridge limits") {
    std::mt19937_64 rng(7);
    const auto ds = testing::random_dataset(rng, 3, {6, 6, 6});
    const Eigen::MatrixXd Y = init_targets(ds.labels, 3);

    SUBCASE("huge lambda shrinks W and b tends to the class proportions") {
        const auto m = fit_ridge(ds, 1e12);
        CHECK(m.W.cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((m.b - Y.colwise().mean().transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("exact fit with lambda = 0") {
        const auto two = testing::random_dataset(rng, 3, {5, 5});
        // ridge fits onto the indicator targets, so build features that reproduce them exactly
        Eigen::MatrixXd X(2, 10);
        for (Index j = 0; j < 10; ++j) {
            X(0, j) = two.labels[static_cast<std::size_t>(j)] == 1 ? 1.0 : 0.0;
            X(1, j) = 0.3 * static_cast<double>(j);
        }
        const auto exact = LabeledDataset::from_columns(X, two.labels, 2);
        const auto m = fit_ridge(exact, 0.0);
        Eigen::MatrixXd pred = X.transpose() * m.W;
        pred.rowwise() += m.b.transpose();
        CHECK((pred - init_targets(two.labels, 2)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("gradient vanishes at the solution") {
        const double lambda = 0.7;
        const auto m = fit_ridge(ds, lambda);
        const Eigen::MatrixXd& X = ds.features;
        const auto f = [&](const Eigen::VectorXd& p) {
            const Eigen::MatrixXd W = Eigen::Map<const Eigen::MatrixXd>(p.data(), 3, 3);
            const Eigen::VectorXd b = p.tail(3);
            Eigen::MatrixXd R = X.transpose() * W;
            R.rowwise() += b.transpose();
            return (R - Y).squaredNorm() + lambda * W.squaredNorm();
        };
        Eigen::VectorXd p(12);
        p.head(9) = Eigen::Map<const Eigen::VectorXd>(m.W.data(), 9);
        p.tail(3) = m.b;
        CHECK(testing::finite_difference(f, p).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("singular system without regularization") {
        Eigen::MatrixXd X(3, 6);
        X.row(0) << 0.1, 0.2, 0.3, 0.6, 0.7, 0.9;
        X.row(1) = 2.0 * X.row(0);
        X.row(2) << 0.5, 0.1, 0.4, 0.2, 0.8, 0.3;
        const auto sing = LabeledDataset::from_columns(X, {1, 1, 1, 2, 2, 2}, 2);
        CHECK_THROWS_AS(fit_ridge(sing, 0.0), NumericalError);
        CHECK_NOTHROW(fit_ridge(sing, 0.1));
    }
}

TEST_CASE("pairwise scatter identity") {
    SUBCASE("two points") {
        Eigen::MatrixXd x(1, 2);
        x << 0.0, 2.0;
        const auto s = pairwise_scatter_identity_check(x);
        CHECK(s.lhs == doctest::Approx(2.0));
        CHECK(s.rhs == doctest::Approx(2.0));
    }
    SUBCASE("single point") {
        const auto s = pairwise_scatter_identity_check(Eigen::MatrixXd::Constant(3, 1, 0.4));
        CHECK(s.lhs == 0.0);
        CHECK(s.rhs == 0.0);
    }
    SUBCASE("random classes") {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> size(1, 20), dim(1, 8);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const auto s = pairwise_scatter_identity_check(testing::random_matrix(rng, dim(rng), size(rng), -3.0, 3.0));
            worst = std::max(worst, std::abs(s.lhs - s.rhs) / std::max(1.0, s.lhs));
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("brute-force retarget oracle") {
    SUBCASE("satisfied row needs no step") {
        Eigen::VectorXd y(3);
        y << 0.0, 2.0, 0.5;
        CHECK(brute_force_retarget_row(y, 2) == doctest::Approx(0.0));
    }
    SUBCASE("single violation splits the gap") {
        Eigen::VectorXd y(2);
        y << 0.0, 0.0;
        CHECK(brute_force_retarget_row(y, 2) == doctest::Approx(0.5).epsilon(1e-3));
    }
    SUBCASE("agrees with the closed form on random rows") {
        std::mt19937_64 rng(13);
        std::uniform_int_distribution<int> classes(2, 6);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const int c = classes(rng);
            const Eigen::VectorXd y = testing::random_vector(rng, c, -2.0, 2.0);
            const int label = std::uniform_int_distribution<int>(1, c)(rng);
            const auto exact = retarget_row(y, label).diag;
            const double grid = brute_force_retarget_row(y, label);
            const double spacing = (std::max(exact.violations.maxCoeff(), 0.0) + 1.0) / 9999.0;
            worst = std::max(worst, std::abs(grid - exact.delta) / spacing);
            CHECK(retarget_cost(exact.delta, exact.violations) <= retarget_cost(grid, exact.violations) + 1e-12);
        }
        CHECK(worst <= 2.0);
    }
}
