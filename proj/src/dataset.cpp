#include "rlar/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "rlar/errors.hpp"
#include "rlar/random.hpp"

namespace rlar {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_long(const std::string& s, long long& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

LabeledDataset LabeledDataset::from_columns(Eigen::MatrixXd features, std::vector<int> labels,
                                            int num_classes, std::vector<std::string> class_names) {
    if (static_cast<Index>(labels.size()) != features.cols())
        throw DataError("label count " + std::to_string(labels.size()) + " does not match " +
                        std::to_string(features.cols()) + " samples");
    if (num_classes < 1) throw DataError("dataset needs at least one class");

    LabeledDataset ds;
    ds.class_index.resize(static_cast<std::size_t>(num_classes));
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const int label = labels[j];
        if (label < 1 || label > num_classes)
            throw DataError("label " + std::to_string(label) + " outside 1.." +
                            std::to_string(num_classes));
        ds.class_index[static_cast<std::size_t>(label - 1)].push_back(static_cast<Index>(j));
    }
    for (int i = 0; i < num_classes; ++i) {
        if (ds.class_index[static_cast<std::size_t>(i)].empty())
            throw DataError("class " + std::to_string(i + 1) + " has no samples");
    }
    if (class_names.empty()) {
        for (int i = 1; i <= num_classes; ++i) class_names.push_back(std::to_string(i));
    } else if (static_cast<int>(class_names.size()) != num_classes) {
        throw DataError("class name count does not match class count");
    }
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    ds.class_names = std::move(class_names);
    return ds;
}

LabeledDataset LabeledDataset::subset(const std::vector<Index>& cols) const {
    Eigen::MatrixXd sub(dim(), static_cast<Index>(cols.size()));
    std::vector<int> sub_labels;
    sub_labels.reserve(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        sub.col(static_cast<Index>(j)) = features.col(cols[j]);
        sub_labels.push_back(labels[static_cast<std::size_t>(cols[j])]);
    }
    return from_columns(std::move(sub), std::move(sub_labels), num_classes(), class_names);
}

LabeledDataset parse_csv(std::istream& in, const CsvOptions& options) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::size_t arity = 0;
    std::size_t line_no = 0;
    std::string line;
    bool header_pending = options.has_header;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        auto fields = split_fields(line);
        if (arity == 0) {
            arity = fields.size();
            if (arity < 2) throw DataError("line " + std::to_string(line_no) + ": need at least one feature and a label");
        } else if (fields.size() != arity) {
            throw DataError("ragged rows: line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " + std::to_string(arity));
        }
        const int label_col = options.label_column < 0
                                  ? static_cast<int>(arity) + options.label_column
                                  : options.label_column;
        if (label_col < 0 || label_col >= static_cast<int>(arity))
            throw DataError("label column " + std::to_string(options.label_column) + " out of range");

        std::vector<double> values;
        values.reserve(arity - 1);
        for (std::size_t k = 0; k < arity; ++k) {
            if (static_cast<int>(k) == label_col) {
                if (fields[k].empty()) throw DataError("line " + std::to_string(line_no) + ": empty label");
                raw_labels.push_back(fields[k]);
                continue;
            }
            double v = 0.0;
            if (!parse_double(fields[k], v) || !std::isfinite(v))
                throw DataError("line " + std::to_string(line_no) + ": cannot parse feature '" + fields[k] + "'");
            values.push_back(v);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError("empty file");

    // Integer label sets keep their numeric order; anything else maps by first appearance.
    std::vector<std::string> names;
    std::map<std::string, int> code;
    std::vector<long long> numeric(raw_labels.size());
    bool all_integer = true;
    for (std::size_t j = 0; j < raw_labels.size() && all_integer; ++j)
        all_integer = parse_long(raw_labels[j], numeric[j]);
    if (all_integer) {
        std::vector<long long> distinct(numeric);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t i = 0; i < distinct.size(); ++i) names.push_back(std::to_string(distinct[i]));
    } else {
        for (const auto& raw : raw_labels) {
            if (code.emplace(raw, static_cast<int>(names.size()) + 1).second) names.push_back(raw);
        }
    }
    code.clear();
    for (std::size_t i = 0; i < names.size(); ++i) code[names[i]] = static_cast<int>(i) + 1;
    if (names.size() < 2) throw DataError("need at least 2 classes, found " + std::to_string(names.size()));

    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (std::size_t j = 0; j < raw_labels.size(); ++j)
        labels.push_back(code.at(all_integer ? std::to_string(numeric[j]) : raw_labels[j]));

    const auto d = static_cast<Index>(arity - 1);
    const auto n = static_cast<Index>(rows.size());
    Eigen::MatrixXd features(d, n);
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < d; ++k) features(k, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];

    const auto num_classes = static_cast<int>(names.size());
    return LabeledDataset::from_columns(std::move(features), std::move(labels), num_classes, std::move(names));
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return parse_csv(in, options);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd& features) {
    MinMaxScaler s;
    if (features.cols() == 0) {
        s.min = Eigen::VectorXd::Zero(features.rows());
        s.max = Eigen::VectorXd::Zero(features.rows());
        return s;
    }
    s.min = features.rowwise().minCoeff();
    s.max = features.rowwise().maxCoeff();
    return s;
}

Eigen::MatrixXd MinMaxScaler::apply(const Eigen::MatrixXd& features) const {
    if (features.rows() != min.size())
        throw DataError("scaler expects " + std::to_string(min.size()) + " features, got " +
                        std::to_string(features.rows()));
    Eigen::MatrixXd out(features.rows(), features.cols());
    for (Index k = 0; k < features.rows(); ++k) {
        const double range = max(k) - min(k);
        if (range > 0.0)
            out.row(k) = (features.row(k).array() - min(k)) / range;
        else
            out.row(k).setZero();
    }
    return out;
}

LabeledDataset normalize_min_max(const LabeledDataset& ds) {
    LabeledDataset out = ds;
    out.features = MinMaxScaler::fit(ds.features).apply(ds.features);
    return out;
}

SplitSpec SplitSpec::count(int per_class, std::uint64_t seed, int trials) {
    return {Mode::PerClassCount, static_cast<double>(per_class), seed, trials};
}

SplitSpec SplitSpec::fraction(double per_class, std::uint64_t seed, int trials) {
    return {Mode::PerClassFraction, per_class, seed, trials};
}

void SplitSpec::validate() const {
    if (trials < 1) throw ArgumentError("trials must be positive");
    if (mode == Mode::PerClassCount) {
        if (value < 1.0 || value != std::floor(value))
            throw ArgumentError("per-class training count must be a positive integer");
    } else if (!(value > 0.0 && value < 1.0)) {
        throw ArgumentError("per-class training fraction must lie in (0, 1)");
    }
}

Index SplitSpec::train_count(Index class_size) const {
    validate();
    Index count = mode == Mode::PerClassCount
                      ? static_cast<Index>(value)
                      : std::max<Index>(1, static_cast<Index>(std::llround(value * static_cast<double>(class_size))));
    if (count > class_size - 1)
        throw DataError("class of size " + std::to_string(class_size) + " cannot supply " +
                        std::to_string(count) + " training samples and keep one for testing");
    return count;
}

Split stratified_split(const LabeledDataset& ds, const SplitSpec& spec, int trial) {
    auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(trial));
    std::vector<char> is_train(static_cast<std::size_t>(ds.size()), 0);
    for (int i = 1; i <= ds.num_classes(); ++i) {
        const auto& members = ds.class_index[static_cast<std::size_t>(i - 1)];
        const auto count = spec.train_count(static_cast<Index>(members.size()));
        for (auto pick : sample_without_replacement(rng, members.size(), static_cast<std::size_t>(count)))
            is_train[static_cast<std::size_t>(members[pick])] = 1;
    }
    Split split;
    for (Index j = 0; j < ds.size(); ++j)
        (is_train[static_cast<std::size_t>(j)] ? split.train_columns : split.test_columns).push_back(j);
    split.train = ds.subset(split.train_columns);
    split.test = ds.subset(split.test_columns);
    return split;
}

void CorruptionSpec::validate() const {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw ArgumentError("corruption fraction must lie in [0, 1]");
    if (!(feature_fraction >= 0.0 && feature_fraction <= 1.0))
        throw ArgumentError("corrupted feature fraction must lie in [0, 1]");
}

LabeledDataset inject_outliers(const LabeledDataset& train, const CorruptionSpec& spec) {
    spec.validate();
    LabeledDataset out = train;
    if (spec.fraction == 0.0 || spec.feature_fraction == 0.0) return out;

    auto rng = make_rng(spec.seed, 0x6f75746c696572ull);
    const auto d = static_cast<std::size_t>(train.dim());
    const auto features_hit = static_cast<std::size_t>(std::llround(spec.feature_fraction * static_cast<double>(d)));
    for (const auto& members : train.class_index) {
        const auto samples_hit =
            static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(members.size())));
        for (auto pick : sample_without_replacement(rng, members.size(), samples_hit)) {
            const Index col = members[pick];
            for (auto k : sample_without_replacement(rng, d, features_hit))
                out.features(static_cast<Index>(k), col) = uniform01(rng);
        }
    }
    return out;
}

}  // namespace rlar
