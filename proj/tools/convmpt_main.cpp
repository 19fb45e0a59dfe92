// convmpt command line: synthesize bag datasets, train and evaluate Pos@Top
// models, and merge evaluation manifests into comparison tables.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convmpt/data.hpp"
#include "convmpt/dataset_io.hpp"
#include "convmpt/error.hpp"
#include "convmpt/evaluation.hpp"
#include "convmpt/fingerprint.hpp"
#include "convmpt/folds.hpp"
#include "convmpt/manifest.hpp"
#include "convmpt/metrics.hpp"
#include "convmpt/model_io.hpp"
#include "convmpt/synth.hpp"
#include "convmpt/trainer.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

struct CommonTrainFlags {
  std::string data_path;
  std::string format = "jsonl";
  double c1 = 1.0;
  double c2 = 0.01;
  int filters = 8;
  int iters = 20;
  std::uint64_t seed = 42;
  std::string activation = "tanh";
  std::string mode = "conv";
  double eta = 0.002;
  int steps_per_filter = 1;
  double init_scale = 0.5;
  double tol = 1e-6;
};

void add_train_flags(CLI::App* cmd, CommonTrainFlags& flags) {
  cmd->add_option("--data", flags.data_path, "dataset file (or csv directory)")
      ->required();
  cmd->add_option("--format", flags.format, "dataset format: jsonl or csv-dir")
      ->check(CLI::IsMember({"jsonl", "csv-dir"}));
  cmd->add_option("--c1", flags.c1, "slack tradeoff (positive)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--c2", flags.c2, "filter ridge tradeoff (positive)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--filters", flags.filters, "number of filters")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--iters", flags.iters, "outer alternations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "seed for all randomness");
  cmd->add_option("--activation", flags.activation, "tanh, sigmoid or identity")
      ->check(CLI::IsMember({"tanh", "sigmoid", "identity"}));
  cmd->add_option("--mode", flags.mode, "conv or baseline (mean pooling)")
      ->check(CLI::IsMember({"conv", "baseline"}));
  cmd->add_option("--eta", flags.eta, "initial filter step size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--steps-per-filter", flags.steps_per_filter,
                  "descent steps per filter per alternation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--init-scale", flags.init_scale, "filter init scale")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", flags.tol, "dual KKT tolerance")
      ->check(CLI::PositiveNumber);
}

convmpt::TrainConfig to_config(const CommonTrainFlags& flags) {
  convmpt::TrainConfig config;
  config.c1 = flags.c1;
  config.c2 = flags.c2;
  config.filter_count = flags.filters;
  config.activation = convmpt::parse_activation(flags.activation);
  config.outer_iters = flags.iters;
  config.dual_tol = flags.tol;
  config.optimizer.eta = flags.eta;
  config.optimizer.steps_per_filter = flags.steps_per_filter;
  config.init_scale = flags.init_scale;
  config.seed = flags.seed;
  config.mode = convmpt::parse_mode(flags.mode);
  return config;
}

std::vector<std::string> collect_argv(int argc, char** argv) {
  return std::vector<std::string>(argv, argv + argc);
}

void fill_dataset_info(convmpt::RunManifest& manifest, const std::string& path,
                       const std::string& format, const convmpt::Dataset& dataset) {
  manifest.dataset_path = path;
  // csv-dir datasets are directories; fingerprint the manifest file instead.
  manifest.dataset_fingerprint =
      format == "csv-dir"
          ? convmpt::fingerprint_file(
                (std::filesystem::path(path) / "labels.csv").string())
          : convmpt::fingerprint_file(path);
  manifest.dataset_bags = dataset.n();
  manifest.dataset_dim = dataset.d;
  manifest.dataset_positives = dataset.positives();
}

std::string default_manifest_path(const std::string& out_path) {
  std::filesystem::path p(out_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

// --grid tokens look like "c1=0.1,1,10" or "c2=0.001,0.01"; a key left out
// keeps its default grid.
convmpt::GridSpec parse_grid_tokens(const std::vector<std::string>& tokens) {
  convmpt::GridSpec grid;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--grid", "expected key=v1,v2,... in '" + token + "'");
    const std::string key = token.substr(0, eq);
    std::vector<double> values;
    std::stringstream stream(token.substr(eq + 1));
    std::string item;
    while (std::getline(stream, item, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw CLI::ValidationError("--grid", "bad numeric value '" + item + "'");
      }
    }
    if (values.empty())
      throw CLI::ValidationError("--grid", "no values for key '" + key + "'");
    if (key == "c1")
      grid.c1_values = values;
    else if (key == "c2")
      grid.c2_values = values;
    else
      throw CLI::ValidationError("--grid", "unknown key '" + key + "'");
  }
  return grid;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw convmpt::DataError("cannot write file '" + path + "'");
  out << text;
}

std::string csv_double(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

int run_synth(const std::vector<std::string>& argv, int n_pos, int n_neg, int dim,
              const std::string& bag_range, const std::string& signal,
              double strength, std::uint64_t seed, const std::string& out_path,
              const std::string& manifest_path) {
  convmpt::SynthSpec spec;
  spec.n_pos = n_pos;
  spec.n_neg = n_neg;
  spec.d = dim;

  const auto colon = bag_range.find(':');
  try {
    if (colon == std::string::npos) {
      spec.bag_min = spec.bag_max = std::stoi(bag_range);
    } else {
      spec.bag_min = std::stoi(bag_range.substr(0, colon));
      spec.bag_max = std::stoi(bag_range.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("--bag expects LO:HI (e.g. 5:20), got '" +
                                bag_range + "'");
  }

  const auto kind = convmpt::parse_signal_kind(signal);
  spec.signal = kind == convmpt::SynthSignal::Kind::witness_instance
                    ? convmpt::SynthSignal::witness_instance()
                    : convmpt::SynthSignal::mean_shift();
  if (strength > 0) spec.signal.strength = strength;
  spec.seed = seed;

  Timer timer;
  const convmpt::Dataset dataset = convmpt::synth_dataset(spec);
  convmpt::save_dataset(dataset, out_path, convmpt::DatasetFormat::jsonl);
  std::cout << "wrote " << dataset.n() << " bags (d=" << dataset.d << ") to "
            << out_path << "\n";

  if (!manifest_path.empty()) {
    convmpt::RunManifest manifest;
    manifest.command = "synth";
    manifest.argv = argv;
    manifest.config.seed = seed;
    fill_dataset_info(manifest, out_path, "jsonl", dataset);
    manifest.timings["total_seconds"] = timer.seconds();
    convmpt::save_manifest(manifest, manifest_path);
  }
  return 0;
}

int run_train(const std::vector<std::string>& argv, const CommonTrainFlags& flags,
              const std::string& out_path, std::string manifest_path) {
  Timer timer;
  const auto format = convmpt::parse_dataset_format(flags.format);
  const convmpt::Dataset dataset = convmpt::load_dataset(flags.data_path, format);
  if (dataset.labels_remapped)
    std::cerr << "warning: labels {0,1} remapped to {-1,+1}\n";
  const double load_seconds = timer.seconds();

  const convmpt::TrainConfig config = to_config(flags);
  const convmpt::Model model = convmpt::train(dataset, config);
  convmpt::save_model(model, out_path);

  const auto& last = model.diagnostics.back();
  std::cout << "trained " << convmpt::mode_name(config.mode) << " model: "
            << model.diagnostics.size() << " dual solves, train Pos@Top "
            << last.train_pos_at_top << ", primal " << last.primal_objective
            << "\n"
            << "model written to " << out_path << "\n";

  if (manifest_path.empty()) manifest_path = default_manifest_path(out_path);
  convmpt::RunManifest manifest;
  manifest.command = "train";
  manifest.argv = argv;
  manifest.config = config;
  fill_dataset_info(manifest, flags.data_path, flags.format, dataset);
  manifest.train_pos_at_top = last.train_pos_at_top;
  manifest.timings["load_seconds"] = load_seconds;
  manifest.timings["total_seconds"] = timer.seconds();
  convmpt::save_manifest(manifest, manifest_path);
  return 0;
}

int run_eval(const std::vector<std::string>& argv, const CommonTrainFlags& flags,
             int folds, std::uint64_t fold_seed, bool fold_seed_set,
             const std::vector<std::string>& grid_tokens,
             const std::string& table_path, const std::string& manifest_path) {
  const std::optional<convmpt::GridSpec> grid =
      grid_tokens.empty() ? std::nullopt
                          : std::optional(parse_grid_tokens(grid_tokens));

  Timer timer;
  const auto format = convmpt::parse_dataset_format(flags.format);
  const convmpt::Dataset dataset = convmpt::load_dataset(flags.data_path, format);
  if (dataset.labels_remapped)
    std::cerr << "warning: labels {0,1} remapped to {-1,+1}\n";

  const convmpt::TrainConfig config = to_config(flags);
  const std::uint64_t seed = fold_seed_set ? fold_seed : flags.seed;
  const convmpt::CvResult result =
      convmpt::cross_validate(dataset, config, folds, seed, grid);

  std::ostringstream table;
  table << "fold,test_size,pos_at_top,c1,c2\n";
  for (const auto& fold : result.folds)
    table << fold.fold << ',' << fold.test_size << ','
          << csv_double(fold.pos_at_top) << ',' << csv_double(fold.c1) << ','
          << csv_double(fold.c2) << '\n';

  std::cout << "mode " << convmpt::mode_name(config.mode) << ", " << folds
            << "-fold cross-validation on " << flags.data_path << "\n"
            << table.str() << "mean_pos_at_top," << csv_double(result.summary.mean)
            << "\nstderr," << csv_double(result.summary.stderr_) << "\n";

  if (!table_path.empty()) {
    std::ostringstream file_table;
    file_table << table.str() << "mean_pos_at_top,"
               << csv_double(result.summary.mean) << "\nstderr,"
               << csv_double(result.summary.stderr_) << "\n";
    write_text_file(table_path, file_table.str());
  }

  if (!manifest_path.empty()) {
    convmpt::RunManifest manifest;
    manifest.command = "eval";
    manifest.argv = argv;
    manifest.config = config;
    fill_dataset_info(manifest, flags.data_path, flags.format, dataset);
    manifest.folds = folds;
    manifest.fold_outcomes = result.folds;
    manifest.summary = result.summary;
    if (grid) {
      manifest.grid_used = true;
      manifest.grid_c1 = grid->c1_values;
      manifest.grid_c2 = grid->c2_values;
    }
    double fold_total = 0.0;
    for (const auto& fold : result.folds) fold_total += fold.seconds;
    manifest.timings["folds_seconds"] = fold_total;
    manifest.timings["total_seconds"] = timer.seconds();
    convmpt::save_manifest(manifest, manifest_path);
  }
  return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& csv_path,
               const std::string& json_path) {
  std::vector<convmpt::RunManifest> manifests;
  manifests.reserve(inputs.size());
  for (const auto& path : inputs) manifests.push_back(convmpt::load_manifest(path));

  const convmpt::Report report = convmpt::merge_report(manifests);
  const std::string csv = convmpt::report_to_csv(report);
  std::cout << csv;
  if (!report.fingerprints_consistent)
    std::cerr << "warning: manifests cover different dataset fingerprints\n";

  if (!csv_path.empty()) write_text_file(csv_path, csv);
  if (!json_path.empty()) write_text_file(json_path, convmpt::report_to_json(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convmpt: Pos@Top maximization over multi-instance bags"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic bag dataset");
  int n_pos = 50, n_neg = 50, dim = 16;
  std::string bag_range = "5:20", signal = "witness", synth_out = "dataset.jsonl";
  std::string synth_manifest;
  double strength = -1.0;
  std::uint64_t synth_seed = 42;
  synth->add_option("--pos", n_pos, "positive bag count")->check(CLI::PositiveNumber);
  synth->add_option("--neg", n_neg, "negative bag count")->check(CLI::PositiveNumber);
  synth->add_option("--dim", dim, "feature dimension")->check(CLI::PositiveNumber);
  synth->add_option("--bag", bag_range, "bag size range LO:HI");
  synth->add_option("--signal", signal, "witness or mean-shift")
      ->check(CLI::IsMember({"witness", "mean-shift"}));
  synth->add_option("--strength", strength, "signal strength (default per signal)");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output JSONL path");
  synth->add_option("--manifest", synth_manifest, "write a run manifest here");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model on a dataset");
  CommonTrainFlags train_flags;
  std::string model_out = "model.json", train_manifest;
  add_train_flags(train_cmd, train_flags);
  train_cmd->add_option("--out", model_out, "model output path");
  train_cmd->add_option("--manifest", train_manifest,
                        "manifest path (default: model path with .manifest.json)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "k-fold cross-validated Pos@Top");
  CommonTrainFlags eval_flags;
  int folds = 10;
  std::uint64_t fold_seed = 0;
  std::vector<std::string> grid_tokens;
  std::string table_path, eval_manifest;
  add_train_flags(eval_cmd, eval_flags);
  eval_cmd->add_option("--folds", folds, "number of folds (>= 2)")
      ->check(CLI::Range(2, 1000000));
  auto* fold_seed_opt =
      eval_cmd->add_option("--fold-seed", fold_seed, "fold shuffle seed (default --seed)");
  eval_cmd->add_option("--grid", grid_tokens,
                       "hyperparameter grid, e.g. --grid c1=0.1,1,10 c2=0.001,0.01")
      ->expected(1, 2);
  eval_cmd->add_option("--table", table_path, "write the per-fold CSV table here");
  eval_cmd->add_option("--manifest", eval_manifest, "write a run manifest here");

  // report
  auto* report_cmd = app.add_subcommand("report", "merge eval manifests into a table");
  std::vector<std::string> inputs;
  std::string csv_path, json_path;
  report_cmd->add_option("--inputs", inputs, "eval manifest files")
      ->required()
      ->expected(1, -1);
  report_cmd->add_option("--csv", csv_path, "write CSV table here");
  report_cmd->add_option("--json", json_path, "write JSON table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::vector<std::string> argv_echo = collect_argv(argc, argv);
  try {
    if (synth->parsed())
      return run_synth(argv_echo, n_pos, n_neg, dim, bag_range, signal, strength,
                       synth_seed, synth_out, synth_manifest);
    if (train_cmd->parsed())
      return run_train(argv_echo, train_flags, model_out, train_manifest);
    if (eval_cmd->parsed())
      return run_eval(argv_echo, eval_flags, folds, fold_seed,
                      fold_seed_opt->count() > 0, grid_tokens, table_path,
                      eval_manifest);
    if (report_cmd->parsed())
      return run_report(inputs, csv_path, json_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const convmpt::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const convmpt::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
