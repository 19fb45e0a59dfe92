#include "convmpt/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "convmpt/error.hpp"

namespace convmpt {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json config_to_json(const TrainConfig& config) {
  json j;
  j["c1"] = config.c1;
  j["c2"] = config.c2;
  j["filters"] = config.filter_count;
  j["activation"] = activation_name(config.activation);
  j["outer_iters"] = config.outer_iters;
  j["dual_tol"] = config.dual_tol;
  j["eta"] = config.optimizer.eta;
  j["backtrack_ratio"] = config.optimizer.backtrack_ratio;
  j["max_backtracks"] = config.optimizer.max_backtracks;
  j["steps_per_filter"] = config.optimizer.steps_per_filter;
  j["init_scale"] = config.init_scale;
  j["seed"] = config.seed;
  j["mode"] = mode_name(config.mode);
  return j;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig config;
  config.c1 = j.at("c1").get<double>();
  config.c2 = j.at("c2").get<double>();
  config.filter_count = j.at("filters").get<int>();
  config.activation = parse_activation(j.at("activation").get<std::string>());
  config.outer_iters = j.at("outer_iters").get<int>();
  config.dual_tol = j.at("dual_tol").get<double>();
  config.optimizer.eta = j.at("eta").get<double>();
  config.optimizer.backtrack_ratio = j.at("backtrack_ratio").get<double>();
  config.optimizer.max_backtracks = j.at("max_backtracks").get<int>();
  config.optimizer.steps_per_filter = j.at("steps_per_filter").get<int>();
  config.init_scale = j.at("init_scale").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.mode = parse_mode(j.at("mode").get<std::string>());
  return config;
}

json diagnostics_to_json(const std::vector<IterationDiagnostics>& diagnostics) {
  json rows = json::array();
  for (const auto& d : diagnostics) {
    json row;
    row["iteration"] = d.iteration;
    row["dual_objective"] = d.dual_objective;
    row["dual_objective_at_warm_start"] = d.dual_objective_at_warm_start;
    row["primal_objective"] = d.primal_objective;
    row["train_pos_at_top"] = d.train_pos_at_top;
    row["dual_certified"] = d.dual_certified;
    row["dual_iterations"] = d.dual_iterations;
    row["filter_step_taken"] = d.filter_step_taken;
    row["filter_objective_before"] = d.filter_objective_before;
    row["filter_objective_after"] = d.filter_objective_after;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<IterationDiagnostics> diagnostics_from_json(const json& rows) {
  std::vector<IterationDiagnostics> out;
  for (const auto& row : rows) {
    IterationDiagnostics d;
    d.iteration = row.at("iteration").get<int>();
    d.dual_objective = row.at("dual_objective").get<double>();
    d.dual_objective_at_warm_start =
        row.at("dual_objective_at_warm_start").get<double>();
    d.primal_objective = row.at("primal_objective").get<double>();
    d.train_pos_at_top = row.at("train_pos_at_top").get<double>();
    d.dual_certified = row.at("dual_certified").get<bool>();
    d.dual_iterations = row.at("dual_iterations").get<std::int64_t>();
    d.filter_step_taken = row.at("filter_step_taken").get<bool>();
    d.filter_objective_before = row.at("filter_objective_before").get<double>();
    d.filter_objective_after = row.at("filter_objective_after").get<double>();
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::string model_to_json(const Model& model) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "convmpt-model";
  j["mode"] = mode_name(model.mode());
  j["config"] = config_to_json(model.config);
  if (model.filters) {
    json filters;
    filters["rows"] = model.filters->weights.rows();
    filters["cols"] = model.filters->weights.cols();
    filters["activation"] = activation_name(model.filters->activation);
    json data = json::array();
    for (Eigen::Index r = 0; r < model.filters->weights.rows(); ++r)
      for (Eigen::Index c = 0; c < model.filters->weights.cols(); ++c)
        data.push_back(model.filters->weights(r, c));
    filters["data"] = std::move(data);
    j["filters"] = std::move(filters);
  }
  json u = json::array();
  for (Eigen::Index i = 0; i < model.u.size(); ++i) u.push_back(model.u[i]);
  j["u"] = std::move(u);
  j["theta"] = model.theta;
  j["early_stopped"] = model.early_stopped;
  j["diagnostics"] = diagnostics_to_json(model.diagnostics);
  return j.dump(2) + "\n";
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << model_to_json(model);
}

Model load_model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw DataError("unsupported model format_version");
    if (j.at("kind").get<std::string>() != "convmpt-model")
      throw DataError("not a model file");

    Model model;
    model.config = config_from_json(j.at("config"));
    if (j.contains("filters")) {
      const json& filters = j.at("filters");
      const auto rows = filters.at("rows").get<Eigen::Index>();
      const auto cols = filters.at("cols").get<Eigen::Index>();
      const json& data = filters.at("data");
      if (rows < 1 || cols < 1 ||
          data.size() != static_cast<std::size_t>(rows * cols))
        throw DataError("model filters shape does not match data length");
      FilterBank bank;
      bank.activation = parse_activation(filters.at("activation").get<std::string>());
      bank.weights.resize(rows, cols);
      std::size_t idx = 0;
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
          bank.weights(r, c) = data[idx++].get<double>();
      model.filters = std::move(bank);
    }
    const json& u = j.at("u");
    model.u.resize(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
      model.u[static_cast<Eigen::Index>(i)] = u[i].get<double>();
    model.theta = j.at("theta").get<double>();
    model.early_stopped = j.value("early_stopped", false);
    if (j.contains("diagnostics"))
      model.diagnostics = diagnostics_from_json(j.at("diagnostics"));

    if (model.mode() == RepresentationMode::conv) {
      if (!model.filters) throw DataError("conv model is missing filters");
      if (model.u.size() != model.filters->weights.cols())
        throw DataError("classifier length does not match filter count");
    } else if (model.filters) {
      throw DataError("baseline model must not carry filters");
    }
    if (!std::isfinite(model.theta)) throw DataError("model theta is not finite");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model JSON: ") + e.what());
  }
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_model_from_json(buffer.str());
}

std::string kkt_to_json(const KktReport& report) {
  json j;
  j["lower_bound"] = report.lower_bound;
  j["upper_bound"] = report.upper_bound;
  j["equality"] = report.equality;
  j["stationarity"] = report.stationarity;
  j["complementarity"] = report.complementarity;
  j["lambda"] = report.lambda;
  return j.dump();
}

std::string filter_trace_to_json(const std::vector<FilterStep>& trace) {
  json rows = json::array();
  for (const auto& step : trace) {
    json row;
    row["objective_before"] = step.objective_before;
    row["objective_after"] = step.objective_after;
    row["eta"] = step.eta;
    row["backtracks"] = step.backtracks;
    row["accepted"] = step.accepted;
    rows.push_back(std::move(row));
  }
  return rows.dump();
}

}  // namespace convmpt
