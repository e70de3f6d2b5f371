#include "commands.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rlar/dataset.hpp"
#include "rlar/baselines.hpp"
#include "rlar/errors.hpp"
#include "rlar/evaluation.hpp"
#include "rlar/locality_graph.hpp"
#include "rlar/random.hpp"
#include "rlar/serialize.hpp"
#include "rlar/solver.hpp"

namespace rlar::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string command;
    std::string data;
    bool header = false;
    int label_column = -1;
    std::string normalize = "full";
    std::string methods = "rlar";
    std::string params_file;
    std::string model_file;

    double alpha = 0.1;
    double beta = 0.1;
    int k = 0;  // 0 = pick from the per-class training size
    int iters = 30;
    double eps = 1e-8;
    double tol = 0.0;
    double lambda = 1.0;

    int trials = 10;
    std::optional<double> train_frac;
    std::optional<int> train_count;
    std::uint64_t seed = 0;

    std::optional<double> corrupt_frac;
    double corrupt_features = 1.0;

    std::string alphas;
    std::string betas;
    int inner_reps = 3;
    bool tune = false;
    bool dump_graph = false;

    std::string out = "runs";
    std::string run_name;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse grid value '" + item + "'");
        }
    }
    if (values.empty()) throw ArgumentError("empty grid list");
    return values;
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> names;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) names.push_back(item);
    return names;
}

class RunWriter {
public:
    RunWriter(const RunConfig& cfg, std::ostream& out) : out_(out) {
        std::string name = cfg.run_name;
        if (name.empty()) {
            const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            std::tm tm{};
            gmtime_r(&now, &tm);
            std::ostringstream os;
            os << std::put_time(&tm, "%Y%m%dT%H%M%SZ") << "-seed" << cfg.seed;
            name = os.str();
        }
        dir_ = fs::path(cfg.out) / name;
        fs::create_directories(dir_);
        out_ << "run directory: " << dir_.string() << '\n';
    }

    template <typename Fn>
    void write(const std::string& file, Fn&& body) {
        std::ofstream os(dir_ / file);
        if (!os) throw DataError("cannot write " + (dir_ / file).string());
        body(os);
    }

    void write_json(const std::string& file, const json& j) {
        write(file, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }

    const fs::path& dir() const { return dir_; }

private:
    std::ostream& out_;
    fs::path dir_;
};

struct LoadedData {
    LabeledDataset raw;
    LabeledDataset normalized;
    MinMaxScaler scaler;
};

LoadedData load(const RunConfig& cfg) {
    LoadedData d;
    d.raw = load_csv(cfg.data, CsvOptions{cfg.header, cfg.label_column});
    d.scaler = MinMaxScaler::fit(d.raw.features);
    d.normalized = d.raw;
    d.normalized.features = d.scaler.apply(d.raw.features);
    return d;
}

SplitSpec split_spec(const RunConfig& cfg) {
    if (cfg.train_frac && cfg.train_count) throw ArgumentError("--train-frac and --train-count are exclusive");
    SplitSpec spec = cfg.train_count ? SplitSpec::count(*cfg.train_count, cfg.seed, cfg.trials)
                                     : SplitSpec::fraction(cfg.train_frac.value_or(0.2), cfg.seed, cfg.trials);
    spec.validate();
    return spec;
}

// 7 neighbors when every class keeps more than 10 training samples, else 3.
int default_k(const LabeledDataset& ds, const std::optional<SplitSpec>& split) {
    Index smallest = ds.size();
    for (int i = 1; i <= ds.num_classes(); ++i) {
        const Index n_i = ds.class_size(i);
        smallest = std::min(smallest, split ? split->train_count(n_i) : n_i);
    }
    return smallest > 10 ? 7 : 3;
}

MethodParams method_params(const RunConfig& cfg, Method method, int k) {
    MethodParams p;
    p.method = method;
    p.rlar.alpha = cfg.alpha;
    p.rlar.beta = cfg.beta;
    p.rlar.k = k;
    p.rlar.max_iter = cfg.iters;
    p.rlar.eps = cfg.eps;
    p.rlar.tol = cfg.tol;
    p.ridge_lambda = cfg.lambda;
    if (!cfg.params_file.empty()) {
        std::ifstream in(cfg.params_file);
        if (!in) throw DataError("cannot open " + cfg.params_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw DataError(cfg.params_file + ": " + e.what());
        }
        const auto file_method = j.contains("method") ? parse_method(j.at("method").get<std::string>()) : method;
        if (file_method == method) p = params_from_json(j, p);
    }
    p.method = method;
    if (method == Method::Rlar) p.rlar.validate();
    return p;
}

GridSpec grid_spec(const RunConfig& cfg) {
    GridSpec g;
    g.alphas = cfg.alphas.empty() ? GridSpec::default_values() : parse_list(cfg.alphas);
    g.betas = cfg.betas.empty() ? GridSpec::default_values() : parse_list(cfg.betas);
    g.inner_repetitions = cfg.inner_reps;
    g.seed = derive_seed(cfg.seed, 0x67726964);
    return g;
}

void write_run_meta(RunWriter& writer, const RunConfig& cfg, const std::vector<std::string>& args) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream created;
    created << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    writer.write_json("run.json", {{"command", cfg.command}, {"args", args}, {"seed", cfg.seed},
                                   {"meta", {{"created", created.str()}}}});
}

void cmd_fit(const RunConfig& cfg, RunWriter& writer, std::ostream& out, bool trace_only) {
    const auto data = load(cfg);
    const auto method = parse_method(split_names(cfg.methods).at(0));
    const int k = cfg.k > 0 ? cfg.k : default_k(data.normalized, std::nullopt);
    const auto params = method_params(cfg, method, k);

    SavedModel saved;
    saved.params = params;
    saved.scaler = data.scaler;
    saved.class_names = data.normalized.class_names;

    if (method == Method::Rlar) {
        const auto result = fit(data.normalized, params.rlar);
        saved.W = result.model.W;
        saved.b = result.model.b;
        saved.final_objective = result.model.final_objective;
        writer.write("trace.csv", [&](std::ostream& os) { write_trace_csv(os, result.trace); });
        writer.write("row_norms.csv", [&](std::ostream& os) { write_row_norms_csv(os, result.trace); });
        if (cfg.dump_graph) {
            writer.write("graph_connections.csv",
                         [&](std::ostream& os) { write_coo_csv(os, result.model.graph, GraphMatrix::Connections); });
            writer.write("graph_affinity.csv",
                         [&](std::ostream& os) { write_coo_csv(os, result.model.graph, GraphMatrix::Affinity); });
        }
        if (trace_only) {
            for (std::size_t i = 0; i < result.trace.objective.size(); ++i)
                out << "iteration " << i + 1 << " objective " << format_double(result.trace.objective[i]) << '\n';
            return;
        }
        out << "final objective " << format_double(result.model.final_objective) << '\n';
    } else {
        if (trace_only) throw ArgumentError("trace is only available for rlar");
        auto proj = fit_projection(data.normalized, params);
        saved.W = std::move(proj.W);
        if (method == Method::Ridge)
            saved.b = fit_ridge(data.normalized, params.ridge_lambda).b;
        else
            saved.b = Eigen::VectorXd::Zero(saved.W.cols());
    }
    writer.write_json("model.json", model_to_json(saved));
    out << "model " << (writer.dir() / "model.json").string() << " (" << saved.W.rows() << "x" << saved.W.cols()
        << ")\n";
}

void cmd_transform(const RunConfig& cfg, RunWriter& writer, std::ostream& out) {
    if (cfg.model_file.empty()) throw ArgumentError("transform needs --model");
    std::ifstream in(cfg.model_file);
    if (!in) throw DataError("cannot open " + cfg.model_file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(cfg.model_file + ": " + e.what());
    }
    const auto saved = model_from_json(j);
    const auto raw = load_csv(cfg.data, CsvOptions{cfg.header, cfg.label_column});
    if (raw.dim() != saved.W.rows())
        throw ArgumentError("model expects " + std::to_string(saved.W.rows()) + " features, data has " +
                            std::to_string(raw.dim()));
    const Eigen::MatrixXd emb = saved.W.transpose() * saved.scaler.apply(raw.features);
    writer.write("embedding.csv", [&](std::ostream& os) {
        for (Index r = 0; r < emb.rows(); ++r) os << "z" << r << ',';
        os << "label\n";
        for (Index col = 0; col < emb.cols(); ++col) {
            for (Index r = 0; r < emb.rows(); ++r) os << format_double(emb(r, col)) << ',';
            os << raw.class_names[static_cast<std::size_t>(raw.labels[static_cast<std::size_t>(col)] - 1)] << '\n';
        }
    });
    out << "embedded " << emb.cols() << " samples into " << emb.rows() << " dimensions\n";
}

void cmd_evaluate(const RunConfig& cfg, RunWriter& writer, std::ostream& out) {
    const auto data = load(cfg);
    const auto split = split_spec(cfg);
    const int k = cfg.k > 0 ? cfg.k : default_k(data.normalized, split);
    const bool train_stats = cfg.normalize == "train";
    const LabeledDataset& ds = train_stats ? data.raw : data.normalized;

    TrialOptions options;
    options.normalize_on_train = train_stats;
    if (cfg.tune) options.tuning = grid_spec(cfg);

    for (const auto& name : split_names(cfg.methods)) {
        const auto method = parse_method(name);
        const auto params = method_params(cfg, method, k);

        options.corruption.reset();
        const auto clean = run_trials(ds, params, split, options);
        writer.write_json("report_" + name + ".json", report_to_json(clean));
        out << name << ": " << format_accuracy(clean.mean_accuracy, clean.std_accuracy) << '\n';

        if (cfg.corrupt_frac) {
            options.corruption = CorruptionSpec{*cfg.corrupt_frac, cfg.corrupt_features, derive_seed(cfg.seed, 0x6e6f6973)};
            const auto dirty = run_trials(ds, params, split, options);
            writer.write_json("report_" + name + "_corrupted.json", report_to_json(dirty));
            out << name << " (corrupted): " << format_accuracy(dirty.mean_accuracy, dirty.std_accuracy) << '\n';
        }
    }
}

void cmd_grid(const RunConfig& cfg, RunWriter& writer, std::ostream& out) {
    const auto data = load(cfg);
    auto split = split_spec(cfg);
    const int k = cfg.k > 0 ? cfg.k : default_k(data.normalized, split);
    const auto method = parse_method(split_names(cfg.methods).at(0));
    const auto base = method_params(cfg, method, k);

    // Tune on the training part of the first split; test columns stay untouched.
    const auto parts = stratified_split(data.normalized, split, 0);
    const auto grid = grid_search(parts.train, base, grid_spec(cfg));
    writer.write("surface.csv", [&](std::ostream& os) { write_surface_csv(os, grid); });
    writer.write_json("best_params.json", grid_to_json(grid));
    out << "best alpha=" << format_double(grid.best.alpha) << " beta=" << format_double(grid.best.beta)
        << " validation accuracy " << format_accuracy(grid.best.accuracy, 0.0) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Robust locality-aware regression: fit, transform, evaluate, grid search", "rlar"};
    app.require_subcommand(1);

    auto add_data = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--data", cfg.data, "CSV file, one sample per row");
        if (required) opt->required();
        sub->add_flag("--header", cfg.header, "first line is a header");
        sub->add_option("--label-col", cfg.label_column, "label column, negative counts from the end")
            ->capture_default_str();
    };
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "base output directory")->capture_default_str();
        sub->add_option("--run-name", cfg.run_name, "run directory name (default: timestamp and seed)");
        sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--method", cfg.methods, "rlar, lda or ridge (evaluate accepts a comma list)")
            ->capture_default_str();
        sub->add_option("--params", cfg.params_file, "JSON parameters, e.g. best_params.json from grid")
            ->check(CLI::ExistingFile);
        sub->add_option("--alpha", cfg.alpha, "row-sparsity weight")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--beta", cfg.beta, "locality weight")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--k", cfg.k, "neighbors per sample (default 3, or 7 above 10 training samples per class)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--iters", cfg.iters, "iterations")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--eps", cfg.eps, "reweighting guard")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--tol", cfg.tol, "relative objective change for early stop")->capture_default_str();
        sub->add_option("--lambda", cfg.lambda, "ridge penalty")->capture_default_str()->check(CLI::NonNegativeNumber);
    };
    auto add_split = [&](CLI::App* sub) {
        auto* frac = sub->add_option("--train-frac", cfg.train_frac, "training fraction per class (default 0.2)");
        auto* count = sub->add_option("--train-count", cfg.train_count, "training samples per class");
        frac->excludes(count);
        sub->add_option("--trials", cfg.trials, "random splits")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--normalize", cfg.normalize, "min-max statistics from the full data or the training part")
            ->capture_default_str()
            ->check(CLI::IsMember({"full", "train"}));
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--alphas", cfg.alphas, "comma-separated alpha (or ridge lambda) grid");
        sub->add_option("--betas", cfg.betas, "comma-separated beta grid");
        sub->add_option("--inner-reps", cfg.inner_reps, "inner validation splits per cell")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
    };

    auto* fit_cmd = app.add_subcommand("fit", "fit a model on the whole dataset");
    add_data(fit_cmd, true);
    add_common(fit_cmd);
    add_model(fit_cmd);
    fit_cmd->add_flag("--dump-graph", cfg.dump_graph, "write the final V and S as coordinate lists");

    auto* trace_cmd = app.add_subcommand("trace", "fit rlar and print the objective per iteration");
    add_data(trace_cmd, true);
    add_common(trace_cmd);
    add_model(trace_cmd);

    auto* transform_cmd = app.add_subcommand("transform", "embed a CSV with a saved model");
    add_data(transform_cmd, true);
    add_common(transform_cmd);
    transform_cmd->add_option("--model", cfg.model_file, "model.json from fit")->required()->check(CLI::ExistingFile);

    auto* eval_cmd = app.add_subcommand("evaluate", "repeated random-split 1-NN evaluation");
    add_data(eval_cmd, true);
    add_common(eval_cmd);
    add_model(eval_cmd);
    add_split(eval_cmd);
    add_grid(eval_cmd);
    eval_cmd->add_flag("--tune", cfg.tune, "grid-search alpha/beta on each trial's training part");
    eval_cmd->add_option("--corrupt-frac", cfg.corrupt_frac, "also run with this fraction of training samples corrupted")
        ->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--corrupt-features", cfg.corrupt_features, "fraction of features replaced per corrupted sample")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    auto* grid_cmd = app.add_subcommand("grid", "grid search over alpha and beta");
    add_data(grid_cmd, true);
    add_common(grid_cmd);
    add_model(grid_cmd);
    add_split(grid_cmd);
    add_grid(grid_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kBadArguments;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        RunWriter writer(cfg, out);
        write_run_meta(writer, cfg, args);
        if (cfg.command == "fit") cmd_fit(cfg, writer, out, false);
        else if (cfg.command == "trace") cmd_fit(cfg, writer, out, true);
        else if (cfg.command == "transform") cmd_transform(cfg, writer, out);
        else if (cfg.command == "evaluate") cmd_evaluate(cfg, writer, out);
        else if (cfg.command == "grid") cmd_grid(cfg, writer, out);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kBadArguments;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    }
    return kSuccess;
}

}  // namespace rlar::cli
