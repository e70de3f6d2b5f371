#include "rlar/serialize.hpp"

#include <charconv>
#include <ostream>

#include "rlar/errors.hpp"

namespace rlar {

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Index rows, Index cols) {
    if (static_cast<Index>(j.size()) != rows) throw DataError("matrix has wrong row count");
    Eigen::MatrixXd m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (static_cast<Index>(row.size()) != cols) throw DataError("matrix row has wrong length");
        for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

}  // namespace

json params_to_json(const MethodParams& params) {
    json j;
    j["method"] = to_string(params.method);
    switch (params.method) {
        case Method::Rlar:
            j["alpha"] = params.rlar.alpha;
            j["beta"] = params.rlar.beta;
            j["k"] = params.rlar.k;
            j["max_iter"] = params.rlar.max_iter;
            j["eps"] = params.rlar.eps;
            j["tol"] = params.rlar.tol;
            break;
        case Method::Ridge: j["lambda"] = params.ridge_lambda; break;
        case Method::Lda: j["out_dim"] = params.lda_dim; break;
    }
    return j;
}

MethodParams params_from_json(const json& j, MethodParams defaults) {
    MethodParams p = std::move(defaults);
    if (j.contains("method")) p.method = parse_method(j.at("method").get<std::string>());
    p.rlar.alpha = j.value("alpha", p.rlar.alpha);
    p.rlar.beta = j.value("beta", p.rlar.beta);
    p.rlar.k = j.value("k", p.rlar.k);
    p.rlar.max_iter = j.value("max_iter", p.rlar.max_iter);
    p.rlar.eps = j.value("eps", p.rlar.eps);
    p.rlar.tol = j.value("tol", p.rlar.tol);
    p.ridge_lambda = j.value("lambda", p.ridge_lambda);
    p.lda_dim = j.value("out_dim", p.lda_dim);
    return p;
}

json model_to_json(const SavedModel& model) {
    json j;
    j["format"] = "rlar-model";
    j["method"] = to_string(model.params.method);
    j["params"] = params_to_json(model.params);
    j["d"] = model.W.rows();
    j["c"] = model.W.cols();
    j["W"] = matrix_to_json(model.W);
    j["b"] = vector_to_json(model.b);
    j["final_objective"] = model.final_objective ? json(*model.final_objective) : json(nullptr);
    j["normalization"] = {{"min", vector_to_json(model.scaler.min)}, {"max", vector_to_json(model.scaler.max)}};
    j["class_names"] = model.class_names;
    return j;
}

SavedModel model_from_json(const json& j) {
    try {
        if (j.value("format", std::string()) != "rlar-model") throw DataError("not an rlar model file");
        SavedModel m;
        m.params = params_from_json(j.at("params"));
        const auto d = j.at("d").get<Index>();
        const auto c = j.at("c").get<Index>();
        m.W = matrix_from_json(j.at("W"), d, c);
        m.b = vector_from_json(j.at("b"));
        if (!j.at("final_objective").is_null()) m.final_objective = j.at("final_objective").get<double>();
        m.scaler.min = vector_from_json(j.at("normalization").at("min"));
        m.scaler.max = vector_from_json(j.at("normalization").at("max"));
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        if (m.scaler.min.size() != d || m.scaler.max.size() != d)
            throw DataError("normalization statistics do not match W");
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

json report_to_json(const BenchmarkReport& report) {
    json j;
    j["method"] = report.method;
    j["params"] = params_to_json(report.params);
    j["split"] = {{"mode", report.split.mode == SplitSpec::Mode::PerClassCount ? "per-class-count" : "per-class-fraction"},
                  {"value", report.split.value},
                  {"seed", report.split.seed},
                  {"trials", report.split.trials}};
    if (report.corruption)
        j["corruption"] = {{"fraction", report.corruption->fraction},
                           {"feature_fraction", report.corruption->feature_fraction},
                           {"seed", report.corruption->seed}};
    else
        j["corruption"] = nullptr;
    j["tuned"] = report.tuned;
    j["mean_accuracy"] = report.mean_accuracy;
    j["std_accuracy"] = report.std_accuracy;
    j["std_kind"] = "population";
    json trials = json::array();
    for (const auto& t : report.trials) {
        trials.push_back({{"trial", t.trial},
                          {"accuracy", t.accuracy},
                          {"correct", t.correct},
                          {"total", t.total},
                          {"train_size", t.train_size},
                          {"params", params_to_json(t.params)},
                          {"objective_trace", t.objective_trace}});
    }
    j["trials"] = std::move(trials);
    j["meta"] = {{"wall_ms", report.wall_ms}};
    return j;
}

json grid_to_json(const GridResult& grid) {
    json j = params_to_json(grid.best_params);
    j["validation_accuracy"] = grid.best.accuracy;
    return j;
}

void write_trace_csv(std::ostream& out, const FitTrace& trace) {
    out << "iteration,objective,wall_ms\n";
    for (std::size_t i = 0; i < trace.objective.size(); ++i)
        out << i + 1 << ',' << format_double(trace.objective[i]) << ',' << format_double(trace.wall_ms[i]) << '\n';
}

void write_row_norms_csv(std::ostream& out, const FitTrace& trace) {
    out << "iteration";
    const Index d = trace.row_norms.empty() ? 0 : trace.row_norms.front().size();
    for (Index k = 0; k < d; ++k) out << ",row_" << k;
    out << '\n';
    for (std::size_t i = 0; i < trace.row_norms.size(); ++i) {
        out << i + 1;
        for (Index k = 0; k < d; ++k) out << ',' << format_double(trace.row_norms[i](k));
        out << '\n';
    }
}

void write_surface_csv(std::ostream& out, const GridResult& grid) {
    out << "alpha,beta,accuracy\n";
    for (const auto& cell : grid.surface)
        out << format_double(cell.alpha) << ',' << format_double(cell.beta) << ',' << format_double(cell.accuracy)
            << '\n';
}

}  // namespace rlar
