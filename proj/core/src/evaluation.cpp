#include "convmpt/evaluation.hpp"

#include <chrono>
#include <stdexcept>

#include "convmpt/folds.hpp"

namespace convmpt {

Dataset subset(const Dataset& dataset, const std::vector<int>& indices) {
  Dataset out;
  out.d = dataset.d;
  out.labels_remapped = dataset.labels_remapped;
  out.bags.reserve(indices.size());
  for (int idx : indices) {
    if (idx < 0 || idx >= dataset.n())
      throw std::invalid_argument("subset: index out of range");
    out.bags.push_back(dataset.bags[idx]);
  }
  return out;
}

namespace {

double fold_metric(const Model& model, const Dataset& test) {
  return pos_at_top({predict_scores(model, test), test.labels()});
}

}  // namespace

CvResult cross_validate(const Dataset& dataset, const TrainConfig& config,
                        int k, std::uint64_t fold_seed,
                        const std::optional<GridSpec>& grid) {
  validate(config);
  if (grid) {
    if (grid->c1_values.empty() || grid->c2_values.empty())
      throw std::invalid_argument("cross_validate: empty hyperparameter grid");
    if (grid->inner_folds < 2)
      throw std::invalid_argument("cross_validate: inner_folds must be >= 2");
  }

  const auto folds = split_folds(dataset, k, fold_seed);
  CvResult result;
  result.folds.reserve(folds.size());

  std::vector<double> metrics;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto start = std::chrono::steady_clock::now();
    const Dataset train_split = subset(dataset, folds[f].train_indices);
    const Dataset test_split = subset(dataset, folds[f].test_indices);

    TrainConfig fold_config = config;
    if (grid) {
      double best_score = -1.0;
      for (double c1 : grid->c1_values) {
        for (double c2 : grid->c2_values) {
          TrainConfig candidate = config;
          candidate.c1 = c1;
          candidate.c2 = c2;
          const auto inner = split_folds(train_split, grid->inner_folds, fold_seed);
          std::vector<double> inner_values;
          inner_values.reserve(inner.size());
          for (const auto& inner_fold : inner) {
            const Model inner_model =
                train(subset(train_split, inner_fold.train_indices), candidate);
            inner_values.push_back(
                fold_metric(inner_model,
                            subset(train_split, inner_fold.test_indices)));
          }
          const double mean = mean_fold_metric(inner_values).mean;
          if (mean > best_score) {  // strict: earliest combination wins ties
            best_score = mean;
            fold_config = candidate;
          }
        }
      }
    }

    const Model model = train(train_split, fold_config);
    const double metric = fold_metric(model, test_split);
    metrics.push_back(metric);

    FoldOutcome outcome;
    outcome.fold = static_cast<int>(f);
    outcome.test_size = static_cast<int>(folds[f].test_indices.size());
    outcome.pos_at_top = metric;
    outcome.c1 = fold_config.c1;
    outcome.c2 = fold_config.c2;
    outcome.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.folds.push_back(outcome);
  }
  result.summary = mean_fold_metric(metrics);
  return result;
}

}  // namespace convmpt
