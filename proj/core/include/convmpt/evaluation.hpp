#ifndef CONVMPT_EVALUATION_HPP
#define CONVMPT_EVALUATION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "convmpt/data.hpp"
#include "convmpt/metrics.hpp"
#include "convmpt/trainer.hpp"

namespace convmpt {

/// Hyperparameter grid searched on each fold's training split by inner
/// stratified cross-validation. Ties resolve to the earliest combination in
/// (c1, c2) declaration order.
struct GridSpec {
  std::vector<double> c1_values{0.1, 1.0, 10.0};
  std::vector<double> c2_values{1e-3, 1e-2, 1e-1};
  int inner_folds = 3;
};

struct FoldOutcome {
  int fold = 0;
  int test_size = 0;
  double pos_at_top = 0.0;
  double c1 = 0.0;  // values actually used (grid-selected or configured)
  double c2 = 0.0;
  double seconds = 0.0;
};

struct CvResult {
  std::vector<FoldOutcome> folds;
  MeanStderr summary;
};

Dataset subset(const Dataset& dataset, const std::vector<int>& indices);

/// Stratified k-fold evaluation: trains on each fold's training split and
/// scores its test split. Deterministic for fixed inputs; fold timings are
/// informational only.
CvResult cross_validate(const Dataset& dataset, const TrainConfig& config,
                        int k, std::uint64_t fold_seed,
                        const std::optional<GridSpec>& grid = {});

}  // namespace convmpt

#endif  // CONVMPT_EVALUATION_HPP
