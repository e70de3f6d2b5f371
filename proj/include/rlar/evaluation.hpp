#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlar/dataset.hpp"
#include "rlar/solver.hpp"

namespace rlar {

enum class Method { Rlar, Lda, Ridge };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct MethodParams {
    Method method = Method::Rlar;
    HyperParams rlar;
    double ridge_lambda = 1.0;
    int lda_dim = 0;  // 0 = c - 1
};

/// Labels each test column with the label of its Euclidean-nearest training
/// column; ties go to the lowest training index.
std::vector<int> knn1_classify(const Eigen::MatrixXd& train_emb, const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_emb);

struct Projection {
    Eigen::MatrixXd W;             // d x r; embeddings are W^T X
    std::optional<FitTrace> trace;  // RLAR only
};

Projection fit_projection(const LabeledDataset& train, const MethodParams& params);

struct HoldoutScore {
    Index correct = 0;
    Index total = 0;
    double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

/// Fits on `train`, embeds both sets, and scores 1-NN on `test`.
HoldoutScore holdout_score(const LabeledDataset& train, const LabeledDataset& test, const MethodParams& params,
                           Projection* fitted = nullptr);

struct GridSpec {
    std::vector<double> alphas;
    std::vector<double> betas;
    int inner_repetitions = 3;
    double inner_fraction = 0.5;
    std::uint64_t seed = 0;

    /// {0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1, 10, 100, 1000}
    static std::vector<double> default_values();
};

struct GridCell {
    double alpha = 0.0;
    double beta = 0.0;
    double accuracy = 0.0;
};

struct GridResult {
    std::vector<GridCell> surface;  // alpha-major order
    GridCell best;
    MethodParams best_params;
};

/// Scores every cell by mean validation accuracy over repeated inner splits
/// of `train`. For ridge the alphas are the lambda values and betas are
/// ignored; LDA has a single cell. Ties go to the lexicographically smaller
/// (alpha, beta).
GridResult grid_search(const LabeledDataset& train, const MethodParams& base, const GridSpec& grid, int threads = 0);

struct TrialReport {
    int trial = 0;
    double accuracy = 0.0;
    Index correct = 0;
    Index total = 0;
    Index train_size = 0;
    MethodParams params;
    std::vector<double> objective_trace;
};

struct TrialOptions {
    std::optional<CorruptionSpec> corruption;
    std::optional<GridSpec> tuning;
    bool normalize_on_train = false;
    int threads = 0;
};

struct BenchmarkReport {
    std::string method;
    MethodParams params;
    SplitSpec split;
    std::optional<CorruptionSpec> corruption;
    bool tuned = false;
    std::vector<TrialReport> trials;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population
    double wall_ms = 0.0;
};

/// Mean and population standard deviation.
std::pair<double, double> mean_and_std(const std::vector<double>& values);

/// For each trial: split, optionally corrupt the training part, optionally
/// grid-tune on it, fit, and score 1-NN on the test part.
BenchmarkReport run_trials(const LabeledDataset& ds, const MethodParams& params, const SplitSpec& split,
                           const TrialOptions& options = {});

/// "96.58±1.54": mean and std in percent.
std::string format_accuracy(double mean, double std);

}  // namespace rlar
