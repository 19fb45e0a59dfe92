#include "convmpt/manifest.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "convmpt/error.hpp"

namespace convmpt {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::string csv_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "convmpt-manifest";
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["seed"] = m.config.seed;

  json config;
  config["c1"] = m.config.c1;
  config["c2"] = m.config.c2;
  config["filters"] = m.config.filter_count;
  config["activation"] = activation_name(m.config.activation);
  config["outer_iters"] = m.config.outer_iters;
  config["dual_tol"] = m.config.dual_tol;
  config["eta"] = m.config.optimizer.eta;
  config["backtrack_ratio"] = m.config.optimizer.backtrack_ratio;
  config["max_backtracks"] = m.config.optimizer.max_backtracks;
  config["steps_per_filter"] = m.config.optimizer.steps_per_filter;
  config["init_scale"] = m.config.init_scale;
  config["mode"] = mode_name(m.config.mode);
  j["config"] = std::move(config);

  json dataset;
  dataset["path"] = m.dataset_path;
  dataset["fingerprint"] = m.dataset_fingerprint;
  dataset["bags"] = m.dataset_bags;
  dataset["dim"] = m.dataset_dim;
  dataset["positives"] = m.dataset_positives;
  j["dataset"] = std::move(dataset);

  if (m.folds > 0) {
    json results;
    results["folds"] = m.folds;
    json rows = json::array();
    for (const auto& fold : m.fold_outcomes) {
      json row;
      row["fold"] = fold.fold;
      row["test_size"] = fold.test_size;
      row["pos_at_top"] = fold.pos_at_top;
      row["c1"] = fold.c1;
      row["c2"] = fold.c2;
      rows.push_back(std::move(row));
    }
    results["per_fold"] = std::move(rows);
    results["mean_pos_at_top"] = m.summary.mean;
    results["stderr"] = m.summary.stderr_;
    if (m.grid_used) {
      results["grid_c1"] = m.grid_c1;
      results["grid_c2"] = m.grid_c2;
    }
    j["results"] = std::move(results);
  } else if (m.train_pos_at_top >= 0.0) {
    json results;
    results["train_pos_at_top"] = m.train_pos_at_top;
    j["results"] = std::move(results);
  }

  json timings;
  for (const auto& [name, seconds] : m.timings) timings[name] = seconds;
  j["timings"] = std::move(timings);
  return j.dump(2) + "\n";
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest file '" + path + "'");
  out << manifest_to_json(manifest);
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();

  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw DataError(path + ": malformed manifest JSON: " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw DataError(path + ": unsupported manifest format_version");
    if (j.at("kind").get<std::string>() != "convmpt-manifest")
      throw DataError(path + ": not a manifest file");

    RunManifest m;
    m.command = j.at("command").get<std::string>();
    if (j.contains("argv")) m.argv = j.at("argv").get<std::vector<std::string>>();
    const json& config = j.at("config");
    m.config.c1 = config.at("c1").get<double>();
    m.config.c2 = config.at("c2").get<double>();
    m.config.filter_count = config.at("filters").get<int>();
    m.config.activation = parse_activation(config.at("activation").get<std::string>());
    m.config.outer_iters = config.at("outer_iters").get<int>();
    m.config.dual_tol = config.at("dual_tol").get<double>();
    m.config.optimizer.eta = config.at("eta").get<double>();
    m.config.optimizer.backtrack_ratio = config.at("backtrack_ratio").get<double>();
    m.config.optimizer.max_backtracks = config.at("max_backtracks").get<int>();
    m.config.optimizer.steps_per_filter = config.at("steps_per_filter").get<int>();
    m.config.init_scale = config.at("init_scale").get<double>();
    m.config.mode = parse_mode(config.at("mode").get<std::string>());
    m.config.seed = j.at("seed").get<std::uint64_t>();

    const json& dataset = j.at("dataset");
    m.dataset_path = dataset.at("path").get<std::string>();
    m.dataset_fingerprint = dataset.at("fingerprint").get<std::string>();
    m.dataset_bags = dataset.at("bags").get<Eigen::Index>();
    m.dataset_dim = dataset.at("dim").get<Eigen::Index>();
    m.dataset_positives = dataset.at("positives").get<Eigen::Index>();

    if (j.contains("results")) {
      const json& results = j.at("results");
      if (results.contains("per_fold")) {
        m.folds = results.at("folds").get<int>();
        for (const auto& row : results.at("per_fold")) {
          FoldOutcome fold;
          fold.fold = row.at("fold").get<int>();
          fold.test_size = row.at("test_size").get<int>();
          fold.pos_at_top = row.at("pos_at_top").get<double>();
          fold.c1 = row.at("c1").get<double>();
          fold.c2 = row.at("c2").get<double>();
          m.fold_outcomes.push_back(fold);
        }
        m.summary.mean = results.at("mean_pos_at_top").get<double>();
        m.summary.stderr_ = results.at("stderr").get<double>();
        if (results.contains("grid_c1")) {
          m.grid_used = true;
          m.grid_c1 = results.at("grid_c1").get<std::vector<double>>();
          m.grid_c2 = results.at("grid_c2").get<std::vector<double>>();
        }
      } else if (results.contains("train_pos_at_top")) {
        m.train_pos_at_top = results.at("train_pos_at_top").get<double>();
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid manifest: " + e.what());
  }
}

Report merge_report(const std::vector<RunManifest>& manifests) {
  if (manifests.empty()) throw DataError("report: no manifests given");
  Report report;
  std::set<std::string> fingerprints;
  for (const auto& m : manifests) {
    if (m.folds <= 0 || m.fold_outcomes.empty())
      throw DataError("report: manifest for command '" + m.command +
                      "' has no fold metrics (need an eval manifest)");
    ReportRow row;
    row.method = mode_name(m.config.mode);
    row.dataset = m.dataset_path;
    row.fingerprint = m.dataset_fingerprint;
    row.folds = m.folds;
    row.mean = m.summary.mean;
    row.stderr_ = m.summary.stderr_;
    report.rows.push_back(std::move(row));
    fingerprints.insert(m.dataset_fingerprint);
  }
  report.fingerprints_consistent = fingerprints.size() <= 1;
  return report;
}

std::string report_to_csv(const Report& report) {
  std::ostringstream out;
  out << "method,dataset,fingerprint,folds,mean_pos_at_top,stderr,fingerprint_mismatch\n";
  for (const auto& row : report.rows) {
    out << row.method << ',' << row.dataset << ',' << row.fingerprint << ','
        << row.folds << ',' << csv_double(row.mean) << ','
        << csv_double(row.stderr_) << ','
        << (report.fingerprints_consistent ? "false" : "true") << '\n';
  }
  return out.str();
}

std::string report_to_json(const Report& report) {
  json j;
  j["kind"] = "convmpt-report";
  j["format_version"] = kFormatVersion;
  j["fingerprints_consistent"] = report.fingerprints_consistent;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["method"] = row.method;
    r["dataset"] = row.dataset;
    r["fingerprint"] = row.fingerprint;
    r["folds"] = row.folds;
    r["mean_pos_at_top"] = row.mean;
    r["stderr"] = row.stderr_;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace convmpt
