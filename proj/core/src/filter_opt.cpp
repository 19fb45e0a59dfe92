#include "convmpt/filter_opt.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "convmpt/error.hpp"
#include "convmpt/parallel.hpp"

namespace convmpt {

void validate(const OptimizerConfig& config) {
  if (!(config.eta > 0))
    throw std::invalid_argument("optimizer: eta must be positive");
  if (!(config.backtrack_ratio > 0) || !(config.backtrack_ratio < 1))
    throw std::invalid_argument("optimizer: backtrack ratio must be in (0,1)");
  if (config.max_backtracks < 0)
    throw std::invalid_argument("optimizer: max_backtracks must be >= 0");
  if (config.steps_per_filter < 1)
    throw std::invalid_argument("optimizer: steps_per_filter must be >= 1");
}

FilterSubproblem make_filter_subproblem(int filter_index,
                                        const Eigen::VectorXd& delta,
                                        const Eigen::VectorXd& y,
                                        const Eigen::MatrixXi& psi,
                                        const Dataset& dataset, double c2,
                                        Activation activation) {
  const Eigen::Index n = dataset.n();
  if (delta.size() != n || y.size() != n || psi.rows() != n)
    throw std::invalid_argument("filter subproblem: inconsistent sizes");
  if (filter_index < 0 || filter_index >= psi.cols())
    throw std::invalid_argument("filter subproblem: filter index out of range");

  FilterSubproblem sub;
  sub.filter_index = filter_index;
  sub.delta = delta;
  sub.y = y;
  sub.c2 = c2;
  sub.activation = activation;
  sub.witnesses.resize(dataset.d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int witness = psi(i, filter_index);
    if (witness < 0 || witness >= dataset.bags[i].size())
      throw std::invalid_argument("filter subproblem: witness index out of range");
    sub.witnesses.col(i) = dataset.bags[i].instances.col(witness);
  }
  return sub;
}

double filter_objective(const FilterSubproblem& sub, const Eigen::VectorXd& w) {
  if (w.size() != sub.dim())
    throw std::invalid_argument("filter_objective: dimension mismatch");
  const Eigen::VectorXd pre = sub.witnesses.transpose() * w;
  double weighted_sum = 0.0;
  for (Eigen::Index i = 0; i < sub.n(); ++i)
    weighted_sum += sub.delta[i] * sub.y[i] * activate(sub.activation, pre[i]);
  return -0.5 * weighted_sum * weighted_sum + sub.c2 * w.squaredNorm();
}

Eigen::VectorXd filter_gradient(const FilterSubproblem& sub,
                                const Eigen::VectorXd& w) {
  if (w.size() != sub.dim())
    throw std::invalid_argument("filter_gradient: dimension mismatch");
  const Eigen::VectorXd pre = sub.witnesses.transpose() * w;
  double weighted_sum = 0.0;
  Eigen::VectorXd chain = Eigen::VectorXd::Zero(sub.dim());
  for (Eigen::Index i = 0; i < sub.n(); ++i) {
    const double c = sub.delta[i] * sub.y[i];
    weighted_sum += c * activate(sub.activation, pre[i]);
    chain += c * activate_derivative(sub.activation, pre[i]) * sub.witnesses.col(i);
  }
  return -weighted_sum * chain + 2.0 * sub.c2 * w;
}

FilterUpdateResult update_filter(const FilterSubproblem& sub, Eigen::VectorXd w,
                                 const OptimizerConfig& config) {
  validate(config);
  FilterUpdateResult result;
  result.trace.reserve(config.steps_per_filter);

  double current = filter_objective(sub, w);
  for (int step = 0; step < config.steps_per_filter; ++step) {
    if (!std::isfinite(current))
      throw NumericError("filter " + std::to_string(sub.filter_index) +
                         ": non-finite objective");
    const Eigen::VectorXd grad = filter_gradient(sub, w);
    if (!grad.allFinite())
      throw NumericError("filter " + std::to_string(sub.filter_index) +
                         ": non-finite gradient");

    FilterStep record;
    record.objective_before = current;

    double eta = config.eta;
    for (int attempt = 0; attempt <= config.max_backtracks; ++attempt) {
      const Eigen::VectorXd candidate = w - eta * grad;
      const double value = filter_objective(sub, candidate);
      if (value <= current) {  // NaN fails the comparison and keeps backtracking
        w = candidate;
        current = value;
        record.accepted = true;
        record.eta = eta;
        record.backtracks = attempt;
        break;
      }
      eta *= config.backtrack_ratio;
    }
    record.objective_after = current;
    result.trace.push_back(record);
    if (!record.accepted) break;  // no acceptable step length; stop early
  }
  if (!std::isfinite(current))
    throw NumericError("filter " + std::to_string(sub.filter_index) +
                       ": objective diverged");

  result.w = std::move(w);
  return result;
}

FilterBankUpdate update_filterbank(const FilterBank& filters,
                                   const Eigen::VectorXd& delta,
                                   const Eigen::VectorXd& y,
                                   const Eigen::MatrixXi& psi,
                                   const Dataset& dataset, double c2,
                                   const OptimizerConfig& config) {
  validate(config);
  if (psi.cols() != filters.filters() || psi.rows() != dataset.n())
    throw std::invalid_argument("update_filterbank: witness matrix shape mismatch");

  const Eigen::Index m = filters.filters();
  FilterBankUpdate update;
  update.filters = filters;
  Eigen::VectorXd before(m), after(m);

  parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
    const auto ki = static_cast<Eigen::Index>(k);
    const FilterSubproblem sub = make_filter_subproblem(
        static_cast<int>(k), delta, y, psi, dataset, c2, filters.activation);
    const Eigen::VectorXd w0 = filters.weights.col(ki);
    before[ki] = filter_objective(sub, w0);
    FilterUpdateResult result = update_filter(sub, w0, config);
    after[ki] = result.trace.empty() ? before[ki] : result.trace.back().objective_after;
    update.filters.weights.col(ki) = result.w;
  });

  update.objective_before = before.sum();
  update.objective_after = after.sum();
  return update;
}

}  // namespace convmpt
