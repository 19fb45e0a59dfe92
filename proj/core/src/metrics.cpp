#include "convmpt/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace convmpt {

double pos_at_top(const ScoredSet& set) {
  if (set.scores.size() != set.labels.size())
    throw std::invalid_argument("pos_at_top: scores/labels length mismatch");
  if (set.scores.size() == 0)
    throw std::invalid_argument("pos_at_top: empty scored set");

  double top_negative = -std::numeric_limits<double>::infinity();
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < set.scores.size(); ++i) {
    if (set.labels[i] > 0)
      ++positives;
    else
      top_negative = std::max(top_negative, set.scores[i]);
  }
  if (positives == 0)
    throw std::invalid_argument("pos_at_top: no positive examples");
  if (positives == set.scores.size())
    throw std::invalid_argument("pos_at_top: no negative examples");

  Eigen::Index above = 0;
  for (Eigen::Index i = 0; i < set.scores.size(); ++i)
    if (set.labels[i] > 0 && set.scores[i] > top_negative) ++above;
  return static_cast<double>(above) / static_cast<double>(positives);
}

MeanStderr mean_fold_metric(const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("mean_fold_metric: empty value list");
  MeanStderr out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sample_var = ss / static_cast<double>(values.size() - 1);
  out.stderr_ = std::sqrt(sample_var / static_cast<double>(values.size()));
  return out;
}

OvaResult ova_pos_at_top(const std::vector<ScoredSet>& per_class_scored) {
  if (per_class_scored.empty())
    throw std::invalid_argument("ova_pos_at_top: no classes");
  OvaResult out;
  out.per_class.reserve(per_class_scored.size());
  for (const auto& scored : per_class_scored)
    out.per_class.push_back(pos_at_top(scored));
  for (double v : out.per_class) out.macro += v;
  out.macro /= static_cast<double>(out.per_class.size());
  return out;
}

}  // namespace convmpt
