#include "convmpt/trainer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "convmpt/dual_solver.hpp"
#include "convmpt/error.hpp"
#include "convmpt/metrics.hpp"
#include "convmpt/rng.hpp"

namespace convmpt {

RepresentationMode parse_mode(const std::string& name) {
  if (name == "conv") return RepresentationMode::conv;
  if (name == "baseline" || name == "mean-pool-baseline")
    return RepresentationMode::mean_pool_baseline;
  throw std::invalid_argument("unknown mode '" + name + "' (conv or baseline)");
}

std::string mode_name(RepresentationMode mode) {
  return mode == RepresentationMode::conv ? "conv" : "mean-pool-baseline";
}

void validate(const TrainConfig& config) {
  if (!(config.c1 > 0)) throw std::invalid_argument("train: c1 must be positive");
  if (!(config.c2 > 0)) throw std::invalid_argument("train: c2 must be positive");
  if (config.filter_count < 1)
    throw std::invalid_argument("train: need at least one filter");
  if (config.outer_iters < 1)
    throw std::invalid_argument("train: outer_iters must be >= 1");
  if (!(config.dual_tol > 0))
    throw std::invalid_argument("train: dual tolerance must be positive");
  if (!(config.init_scale > 0))
    throw std::invalid_argument("train: init_scale must be positive");
  validate(config.optimizer);
}

double hinge_loss(double f_i, double theta) {
  return std::max(0.0, theta - f_i + 1.0);
}

namespace {

double relative_change(double current, double previous) {
  return std::abs(current - previous) / std::max(1.0, std::abs(previous));
}

// Eq-style primal value computed from precomputed scores: theta is the top
// negative score, hinge losses are summed over positives.
double primal_from_scores(const Eigen::VectorXd& scores, const Eigen::VectorXd& y,
                          double u_sq_norm, double w_sq_norm, double c1,
                          double c2, bool include_filter_term) {
  double theta = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < y.size(); ++j)
    if (y[j] < 0) theta = std::max(theta, scores[j]);
  double slack = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] > 0) slack += hinge_loss(scores[i], theta);
  double value = 0.5 * u_sq_norm + c1 * slack;
  if (include_filter_term) value += c2 * w_sq_norm;
  return value;
}

FilterBank init_filters(const TrainConfig& config, Eigen::Index d) {
  Rng rng(config.seed);
  FilterBank bank;
  bank.activation = config.activation;
  bank.weights.resize(d, config.filter_count);
  const double scale = config.init_scale / std::sqrt(static_cast<double>(d));
  for (Eigen::Index k = 0; k < bank.weights.cols(); ++k)
    for (Eigen::Index r = 0; r < d; ++r)
      bank.weights(r, k) = scale * rng.gaussian();
  return bank;
}

Model train_baseline(const Dataset& dataset, const TrainConfig& config) {
  const Eigen::VectorXd y = dataset.labels();
  const Eigen::MatrixXd pooled = mean_pool_dataset(dataset);

  DualProblem problem{build_gram(pooled), y, config.c1, config.dual_tol, -1};
  if (!problem.gram.allFinite())
    throw NumericError("train: gram matrix overflowed (baseline mode)");
  const DualSolution solution = solve_dual(problem);

  Model model;
  model.config = config;
  model.u = recover_u(solution.delta, y, pooled);
  model.theta = recover_theta(model.u, pooled, y);

  const Eigen::VectorXd scores = pooled * model.u;
  IterationDiagnostics diag;
  diag.iteration = 0;
  diag.dual_objective = solution.objective;
  diag.dual_objective_at_warm_start = dual_objective(problem, Eigen::VectorXd::Zero(y.size()));
  diag.primal_objective = primal_from_scores(scores, y, model.u.squaredNorm(),
                                             0.0, config.c1, config.c2, false);
  diag.train_pos_at_top = pos_at_top({scores, y});
  diag.dual_certified = solution.certified;
  diag.dual_iterations = solution.iterations;
  model.diagnostics.push_back(diag);
  return model;
}

}  // namespace

Model train(const Dataset& dataset, const TrainConfig& config) {
  validate(config);
  validate_training_dataset(dataset);

  if (config.mode == RepresentationMode::mean_pool_baseline)
    return train_baseline(dataset, config);

  const Eigen::VectorXd y = dataset.labels();
  Model model;
  model.config = config;
  model.filters = init_filters(config, dataset.d);

  Eigen::VectorXd warm = Eigen::VectorXd::Zero(dataset.n());
  bool have_warm = false;

  // outer_iters filter updates, each bracketed by a multiplier solve; one
  // extra solve at the end re-derives (u, theta) for the final filters.
  for (int iter = 0; iter <= config.outer_iters; ++iter) {
    const DatasetEncoding enc = encode_dataset(*model.filters, dataset);
    if (!enc.g.allFinite())
      throw NumericError("train: non-finite encoding at iteration " +
                         std::to_string(iter));

    DualProblem problem{build_gram(enc.g), y, config.c1, config.dual_tol, -1};
    if (!problem.gram.allFinite())
      throw NumericError("train: gram matrix overflowed at iteration " +
                         std::to_string(iter));
    const double warm_objective =
        dual_objective(problem, have_warm ? warm : Eigen::VectorXd::Zero(y.size()));
    const DualSolution solution =
        solve_dual(problem, have_warm ? std::optional<Eigen::VectorXd>(warm)
                                      : std::nullopt);
    if (solution.objective < warm_objective -
                                 1e-9 * std::max(1.0, std::abs(warm_objective)))
      throw NumericError("train: dual objective decreased at iteration " +
                         std::to_string(iter));

    model.u = recover_u(solution.delta, y, enc.g);
    model.theta = recover_theta(model.u, enc.g, y);
    if (!model.u.allFinite() || !std::isfinite(model.theta))
      throw NumericError("train: non-finite classifier at iteration " +
                         std::to_string(iter));

    const Eigen::VectorXd scores = enc.g * model.u;
    IterationDiagnostics diag;
    diag.iteration = iter;
    diag.dual_objective = solution.objective;
    diag.dual_objective_at_warm_start = warm_objective;
    diag.primal_objective = primal_from_scores(
        scores, y, model.u.squaredNorm(), model.filters->weights.squaredNorm(),
        config.c1, config.c2, true);
    diag.train_pos_at_top = pos_at_top({scores, y});
    diag.dual_certified = solution.certified;
    diag.dual_iterations = solution.iterations;
    model.diagnostics.push_back(diag);

    if (iter == config.outer_iters) break;

    // Plateau test: margin fully satisfied and the primal flat for two
    // consecutive iterations.
    const auto& hist = model.diagnostics;
    if (hist.size() >= 3 && hist.back().train_pos_at_top == 1.0 &&
        relative_change(hist[hist.size() - 1].primal_objective,
                        hist[hist.size() - 2].primal_objective) < 1e-6 &&
        relative_change(hist[hist.size() - 2].primal_objective,
                        hist[hist.size() - 3].primal_objective) < 1e-6) {
      model.early_stopped = true;
      break;
    }

    FilterBankUpdate update =
        update_filterbank(*model.filters, solution.delta, y, enc.psi, dataset,
                          config.c2, config.optimizer);
    if (update.objective_after > update.objective_before)
      throw NumericError("train: filter objective increased at iteration " +
                         std::to_string(iter));
    model.diagnostics.back().filter_step_taken = true;
    model.diagnostics.back().filter_objective_before = update.objective_before;
    model.diagnostics.back().filter_objective_after = update.objective_after;
    model.filters = std::move(update.filters);

    warm = solution.delta;
    have_warm = true;
  }
  return model;
}

double primal_objective(const Model& model, const Dataset& dataset, double c1,
                        double c2) {
  const Eigen::VectorXd scores = predict_scores(model, dataset);
  const Eigen::VectorXd y = dataset.labels();
  const bool conv = model.mode() == RepresentationMode::conv;
  const double w_sq = conv ? model.filters->weights.squaredNorm() : 0.0;
  return primal_from_scores(scores, y, model.u.squaredNorm(), w_sq, c1, c2, conv);
}

std::pair<double, int> predict(const Model& model, const Bag& bag) {
  double value = 0.0;
  if (model.mode() == RepresentationMode::conv) {
    value = score(model.u, forward_bag(*model.filters, bag));
  } else {
    if (bag.dim() != model.u.size())
      throw std::invalid_argument("predict: bag dimension mismatch");
    value = model.u.dot(mean_pool(bag));
  }
  return {value, value > model.theta ? 1 : -1};
}

Eigen::VectorXd predict_scores(const Model& model, const Dataset& dataset) {
  Eigen::VectorXd scores(dataset.n());
  if (model.mode() == RepresentationMode::conv) {
    const DatasetEncoding enc = encode_dataset(*model.filters, dataset);
    scores = enc.g * model.u;
  } else {
    scores = mean_pool_dataset(dataset) * model.u;
  }
  return scores;
}

}  // namespace convmpt
