#ifndef CONVMPT_MANIFEST_HPP
#define CONVMPT_MANIFEST_HPP

#include <map>
#include <string>
#include <vector>

#include "convmpt/evaluation.hpp"
#include "convmpt/trainer.hpp"

namespace convmpt {

/// Record of one CLI run, sufficient to replay it: the command and flags,
/// config, seed, dataset fingerprint and the per-fold metrics. Timings live
/// in their own section and are excluded from any determinism comparison.
struct RunManifest {
  std::string command;            // train | eval | synth
  std::vector<std::string> argv;  // full command line echo
  TrainConfig config;
  std::string dataset_path;
  std::string dataset_fingerprint;
  Eigen::Index dataset_bags = 0;
  Eigen::Index dataset_dim = 0;
  Eigen::Index dataset_positives = 0;
  int folds = 0;  // 0 for train/synth runs
  std::vector<FoldOutcome> fold_outcomes;
  MeanStderr summary;
  bool grid_used = false;
  std::vector<double> grid_c1, grid_c2;
  double train_pos_at_top = -1.0;  // train runs only
  std::map<std::string, double> timings;
};

std::string manifest_to_json(const RunManifest& manifest);
void save_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

/// One row of the merged comparison table (one row per manifest).
struct ReportRow {
  std::string method;   // representation mode
  std::string dataset;  // path as recorded
  std::string fingerprint;
  int folds = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  bool fingerprints_consistent = true;
};

/// Merges eval manifests into a method x dataset table; flags mismatched
/// dataset fingerprints. Throws DataError for manifests without fold
/// metrics or with an unsupported format version.
Report merge_report(const std::vector<RunManifest>& manifests);

std::string report_to_csv(const Report& report);
std::string report_to_json(const Report& report);

}  // namespace convmpt

#endif  // CONVMPT_MANIFEST_HPP
