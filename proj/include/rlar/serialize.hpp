#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rlar/dataset.hpp"
#include "rlar/evaluation.hpp"
#include "rlar/solver.hpp"

namespace rlar {

using json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// A fitted projection together with what is needed to apply it to raw data.
struct SavedModel {
    MethodParams params;
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    std::optional<double> final_objective;
    MinMaxScaler scaler;
    std::vector<std::string> class_names;
};

json params_to_json(const MethodParams& params);
/// Fields absent from `j` keep the values of `defaults`.
MethodParams params_from_json(const json& j, MethodParams defaults = {});

json model_to_json(const SavedModel& model);
SavedModel model_from_json(const json& j);

json report_to_json(const BenchmarkReport& report);
json grid_to_json(const GridResult& grid);

/// iteration,objective,wall_ms
void write_trace_csv(std::ostream& out, const FitTrace& trace);
/// iteration followed by ||W_i|| for each feature row
void write_row_norms_csv(std::ostream& out, const FitTrace& trace);
/// alpha,beta,accuracy
void write_surface_csv(std::ostream& out, const GridResult& grid);

}  // namespace rlar
