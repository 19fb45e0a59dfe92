#ifndef CONVMPT_TRAINER_HPP
#define CONVMPT_TRAINER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "convmpt/data.hpp"
#include "convmpt/filter_opt.hpp"
#include "convmpt/representation.hpp"

namespace convmpt {

enum class RepresentationMode { conv, mean_pool_baseline };

RepresentationMode parse_mode(const std::string& name);
std::string mode_name(RepresentationMode mode);

struct TrainConfig {
  double c1 = 1.0;
  double c2 = 0.01;
  int filter_count = 8;
  Activation activation = Activation::tanh;
  int outer_iters = 20;
  double dual_tol = 1e-6;
  OptimizerConfig optimizer{};
  double init_scale = 0.5;  // keeps initial pre-activations responsive
  std::uint64_t seed = 0;
  RepresentationMode mode = RepresentationMode::conv;
};

void validate(const TrainConfig& config);

/// Per-outer-iteration record. dual_objective_at_warm_start is the value of
/// this iteration's dual at the warm-start point, so the multiplier-step
/// ascent is checkable after the fact; filter_objective_before/after bracket
/// the filter step under the frozen witnesses.
struct IterationDiagnostics {
  int iteration = 0;
  double dual_objective = 0.0;
  double dual_objective_at_warm_start = 0.0;
  double primal_objective = 0.0;
  double train_pos_at_top = 0.0;
  bool dual_certified = false;
  std::int64_t dual_iterations = 0;
  bool filter_step_taken = false;
  double filter_objective_before = 0.0;
  double filter_objective_after = 0.0;
};

struct Model {
  TrainConfig config;
  std::optional<FilterBank> filters;  // absent in mean-pool baseline mode
  Eigen::VectorXd u;
  double theta = 0.0;
  std::vector<IterationDiagnostics> diagnostics;
  bool early_stopped = false;

  RepresentationMode mode() const { return config.mode; }
};

/// Alternating optimization: encode the bags with the current filters
/// (recording witnesses), solve the multiplier QP warm-started from the
/// previous iterate, recover the classifier (u, theta), then lower the
/// per-filter objectives with the witnesses frozen. After the final filter
/// step, (u, theta) are re-derived from the final filters' encoding so the
/// shipped classifier matches the shipped filters. In baseline mode the
/// representation is the per-bag instance mean and no filter step runs.
/// Deterministic for a fixed (dataset, config).
Model train(const Dataset& dataset, const TrainConfig& config);

/// max(0, theta - f_i + 1); callers apply it to positive bags only.
double hinge_loss(double f_i, double theta);

/// The regularized margin objective at the model's classifier: recomputes
/// theta from the current encodings, sums hinge losses over positives, and
/// adds the ridge terms (the filter term is absent in baseline mode).
double primal_objective(const Model& model, const Dataset& dataset, double c1,
                        double c2);

/// Score and thresholded label (+1 iff score > theta, strictly).
std::pair<double, int> predict(const Model& model, const Bag& bag);

/// Scores for every bag in dataset order.
Eigen::VectorXd predict_scores(const Model& model, const Dataset& dataset);

}  // namespace convmpt

#endif  // CONVMPT_TRAINER_HPP
