#ifndef CONVMPT_METRICS_HPP
#define CONVMPT_METRICS_HPP

#include <vector>

#include <Eigen/Core>

namespace convmpt {

struct ScoredSet {
  Eigen::VectorXd scores;
  Eigen::VectorXd labels;  // +-1
};

/// Fraction of positives scored strictly above the best-scoring negative.
/// Ties with the top negative do not count. Requires both classes.
double pos_at_top(const ScoredSet& set);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Arithmetic mean and standard error (sample std / sqrt(k); 0 for k = 1).
MeanStderr mean_fold_metric(const std::vector<double>& values);

struct OvaResult {
  std::vector<double> per_class;
  double macro = 0.0;  // unweighted mean over classes
};

/// One-vs-all: element c of the input holds the scores of class c's scorer
/// with labels +1 for class members and -1 for the rest.
OvaResult ova_pos_at_top(const std::vector<ScoredSet>& per_class_scored);

}  // namespace convmpt

#endif  // CONVMPT_METRICS_HPP
