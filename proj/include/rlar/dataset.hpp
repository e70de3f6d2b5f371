#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rlar {

using Index = Eigen::Index;

/// Column-per-sample labeled data. Labels run 1..c; class_index[i] lists the
/// columns of class i+1 in ascending order.
struct LabeledDataset {
    Eigen::MatrixXd features;  // d x n
    std::vector<int> labels;
    std::vector<std::vector<Index>> class_index;
    std::vector<std::string> class_names;

    /// Validates labels against `num_classes` and builds class_index.
    /// Throws DataError if any label is out of range or a class is empty.
    static LabeledDataset from_columns(Eigen::MatrixXd features, std::vector<int> labels,
                                       int num_classes, std::vector<std::string> class_names = {});

    Index dim() const { return features.rows(); }
    Index size() const { return features.cols(); }
    int num_classes() const { return static_cast<int>(class_index.size()); }
    Index class_size(int label) const {
        return static_cast<Index>(class_index.at(static_cast<std::size_t>(label - 1)).size());
    }

    /// Columns `cols` in the given order, same class count and names.
    LabeledDataset subset(const std::vector<Index>& cols) const;
};

struct CsvOptions {
    bool has_header = false;
    /// Negative values count from the end; -1 is the last column.
    int label_column = -1;
};

/// Integer labels are mapped to 1..c in ascending numeric order, any other
/// label set by order of first appearance.
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
LabeledDataset parse_csv(std::istream& in, const CsvOptions& options = {});

/// Per-feature affine map onto [0, 1]. Constant features map to 0.
struct MinMaxScaler {
    Eigen::VectorXd min;
    Eigen::VectorXd max;

    static MinMaxScaler fit(const Eigen::MatrixXd& features);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
};

LabeledDataset normalize_min_max(const LabeledDataset& ds);

struct SplitSpec {
    enum class Mode { PerClassCount, PerClassFraction };
    Mode mode = Mode::PerClassFraction;
    double value = 0.2;
    std::uint64_t seed = 0;
    int trials = 10;

    static SplitSpec count(int per_class, std::uint64_t seed, int trials = 1);
    static SplitSpec fraction(double per_class, std::uint64_t seed, int trials = 1);

    /// Training samples drawn from a class of size n_i. Throws DataError when
    /// fewer than one test sample would remain.
    Index train_count(Index class_size) const;
    void validate() const;
};

struct Split {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<Index> train_columns;
    std::vector<Index> test_columns;
};

/// Per class, draws the requested number of training columns without
/// replacement from an engine keyed by (seed, trial). Both halves keep the
/// original column order.
Split stratified_split(const LabeledDataset& ds, const SplitSpec& spec, int trial);

struct CorruptionSpec {
    /// Fraction of each class's samples to corrupt.
    double fraction = 0.0;
    /// Fraction of features replaced in a corrupted sample.
    double feature_fraction = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Replaces features of selected samples with uniform [0, 1) noise. Labels unchanged.
LabeledDataset inject_outliers(const LabeledDataset& train, const CorruptionSpec& spec);

}  // namespace rlar
