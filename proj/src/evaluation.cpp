#include "rlar/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rlar/baselines.hpp"
#include "rlar/errors.hpp"
#include "rlar/parallel.hpp"
#include "rlar/random.hpp"

namespace rlar {

std::string to_string(Method method) {
    switch (method) {
        case Method::Rlar: return "rlar";
        case Method::Lda: return "lda";
        case Method::Ridge: return "ridge";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "rlar") return Method::Rlar;
    if (name == "lda") return Method::Lda;
    if (name == "ridge") return Method::Ridge;
    throw ArgumentError("unknown method '" + name + "' (expected rlar, lda or ridge)");
}

std::vector<int> knn1_classify(const Eigen::MatrixXd& train_emb, const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_emb) {
    if (train_emb.cols() == 0) throw ArgumentError("1-NN needs a non-empty training set");
    if (static_cast<Index>(train_labels.size()) != train_emb.cols())
        throw ArgumentError("training label count does not match embeddings");
    if (train_emb.rows() != test_emb.rows()) throw ArgumentError("embedding dimensions differ");

    std::vector<int> predicted(static_cast<std::size_t>(test_emb.cols()));
    for (Index t = 0; t < test_emb.cols(); ++t) {
        Index best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < train_emb.cols(); ++j) {
            const double dist = (train_emb.col(j) - test_emb.col(t)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        predicted[static_cast<std::size_t>(t)] = train_labels[static_cast<std::size_t>(best)];
    }
    return predicted;
}

Projection fit_projection(const LabeledDataset& train, const MethodParams& params) {
    Projection out;
    switch (params.method) {
        case Method::Rlar: {
            auto result = fit(train, params.rlar);
            out.W = std::move(result.model.W);
            out.trace = std::move(result.trace);
            break;
        }
        case Method::Lda: out.W = fit_lda(train, params.lda_dim).W; break;
        case Method::Ridge: out.W = fit_ridge(train, params.ridge_lambda).W; break;
    }
    return out;
}

HoldoutScore holdout_score(const LabeledDataset& train, const LabeledDataset& test, const MethodParams& params,
                           Projection* fitted) {
    Projection proj = fit_projection(train, params);
    const auto predicted =
        knn1_classify(proj.W.transpose() * train.features, train.labels, proj.W.transpose() * test.features);
    HoldoutScore score;
    score.total = test.size();
    for (std::size_t t = 0; t < predicted.size(); ++t) score.correct += predicted[t] == test.labels[t];
    if (fitted) *fitted = std::move(proj);
    return score;
}

std::vector<double> GridSpec::default_values() {
    return {0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1, 10, 100, 1000};
}

namespace {

MethodParams with_cell(MethodParams params, const GridCell& cell) {
    if (params.method == Method::Rlar) {
        params.rlar.alpha = cell.alpha;
        params.rlar.beta = cell.beta;
    } else if (params.method == Method::Ridge) {
        params.ridge_lambda = cell.alpha;
    }
    return params;
}

}  // namespace

GridResult grid_search(const LabeledDataset& train, const MethodParams& base, const GridSpec& grid, int threads) {
    GridResult result;
    switch (base.method) {
        case Method::Rlar:
            if (grid.alphas.empty() || grid.betas.empty()) throw ArgumentError("grid needs alpha and beta values");
            for (double a : grid.alphas)
                for (double b : grid.betas) result.surface.push_back({a, b, 0.0});
            break;
        case Method::Ridge:
            if (grid.alphas.empty()) throw ArgumentError("ridge grid needs lambda values");
            for (double a : grid.alphas) result.surface.push_back({a, 0.0, 0.0});
            break;
        case Method::Lda: result.surface.push_back({0.0, 0.0, 0.0}); break;
    }
    if (grid.inner_repetitions < 1) throw ArgumentError("inner repetitions must be positive");

    const auto inner = SplitSpec::fraction(grid.inner_fraction, grid.seed, grid.inner_repetitions);
    std::vector<Split> folds;
    for (int r = 0; r < grid.inner_repetitions; ++r) folds.push_back(stratified_split(train, inner, r));

    parallel_for(
        result.surface.size(),
        [&](std::size_t i) {
            auto& cell = result.surface[i];
            const auto params = with_cell(base, cell);
            double total = 0.0;
            for (const auto& fold : folds) total += holdout_score(fold.train, fold.test, params).accuracy();
            cell.accuracy = total / static_cast<double>(folds.size());
        },
        threads);

    // surface is already in ascending (alpha, beta) order when the grids are sorted;
    // compare explicitly so unsorted grids tie-break the same way
    result.best = result.surface.front();
    for (const auto& cell : result.surface) {
        const bool better = cell.accuracy > result.best.accuracy;
        const bool tie_smaller = cell.accuracy == result.best.accuracy &&
                                 (cell.alpha < result.best.alpha ||
                                  (cell.alpha == result.best.alpha && cell.beta < result.best.beta));
        if (better || tie_smaller) result.best = cell;
    }
    result.best_params = with_cell(base, result.best);
    return result;
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

BenchmarkReport run_trials(const LabeledDataset& ds, const MethodParams& params, const SplitSpec& split,
                           const TrialOptions& options) {
    split.validate();
    if (options.corruption) options.corruption->validate();
    const auto start = std::chrono::steady_clock::now();

    BenchmarkReport report;
    report.method = to_string(params.method);
    report.params = params;
    report.split = split;
    report.corruption = options.corruption;
    report.tuned = options.tuning.has_value();
    report.trials.resize(static_cast<std::size_t>(split.trials));

    // With tuning the grid cells carry the parallelism; otherwise the trials do.
    const int trial_threads = options.tuning ? 1 : options.threads;
    const int grid_threads = options.tuning ? options.threads : 1;

    parallel_for(
        report.trials.size(),
        [&](std::size_t t) {
            const int trial = static_cast<int>(t);
            try {
                Split parts = stratified_split(ds, split, trial);
                if (options.normalize_on_train) {
                    const auto scaler = MinMaxScaler::fit(parts.train.features);
                    parts.train.features = scaler.apply(parts.train.features);
                    parts.test.features = scaler.apply(parts.test.features);
                }
                if (options.corruption) {
                    auto spec = *options.corruption;
                    spec.seed = derive_seed(spec.seed, t);
                    parts.train = inject_outliers(parts.train, spec);
                }
                MethodParams trial_params = params;
                if (options.tuning) {
                    auto grid = *options.tuning;
                    grid.seed = derive_seed(grid.seed, t);
                    trial_params = grid_search(parts.train, params, grid, grid_threads).best_params;
                }

                Projection proj;
                auto& rec = report.trials[t];
                rec.trial = trial;
                const auto score = holdout_score(parts.train, parts.test, trial_params, &proj);
                rec.correct = score.correct;
                rec.total = score.total;
                rec.accuracy = score.accuracy();
                rec.train_size = parts.train.size();
                rec.params = trial_params;
                if (proj.trace) rec.objective_trace = proj.trace->objective;
            } catch (const DataError& e) {
                throw DataError("trial " + std::to_string(trial) + ": " + e.what());
            } catch (const ArgumentError& e) {
                throw ArgumentError("trial " + std::to_string(trial) + ": " + e.what());
            } catch (const Error& e) {
                throw NumericalError("trial " + std::to_string(trial) + ": " + e.what());
            }
        },
        trial_threads);

    std::vector<double> accuracies;
    for (const auto& rec : report.trials) accuracies.push_back(rec.accuracy);
    std::tie(report.mean_accuracy, report.std_accuracy) = mean_and_std(accuracies);
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string format_accuracy(double mean, double std) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f±%.2f", 100.0 * mean, 100.0 * std);
    return buf;
}

}  // namespace rlar
