#include "convmpt/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace convmpt {

namespace {

constexpr double kGuardFactor = 1e6;  // divergence guard on negative multipliers

void check_problem(const DualProblem& p) {
  const Eigen::Index n = p.gram.rows();
  if (p.gram.cols() != n)
    throw std::invalid_argument("solve_dual: gram matrix must be square");
  if (p.y.size() != n)
    throw std::invalid_argument("solve_dual: label vector length mismatch");
  if (!(p.c1 > 0)) throw std::invalid_argument("solve_dual: c1 must be positive");
  if (!(p.tol > 0)) throw std::invalid_argument("solve_dual: tol must be positive");
  if (!p.gram.allFinite())
    throw std::invalid_argument("solve_dual: gram matrix has non-finite entries");

  bool has_pos = false, has_neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.y[i] == 1.0)
      has_pos = true;
    else if (p.y[i] == -1.0)
      has_neg = true;
    else
      throw std::invalid_argument("solve_dual: labels must be exactly +1 or -1");
  }
  if (!has_pos || !has_neg)
    throw std::invalid_argument("solve_dual: need both classes present");

  double asym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      asym = std::max(asym, std::abs(p.gram(i, j) - p.gram(j, i)));
  if (asym > 1e-12 * std::max(1.0, p.gram.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("solve_dual: gram matrix is not symmetric");
}

// q = diag(y) K diag(y) delta, the gradient cache (grad D = eps - q).
Eigen::VectorXd gradient_cache(const DualProblem& p, const Eigen::VectorXd& delta) {
  return p.y.cwiseProduct(p.gram * p.y.cwiseProduct(delta));
}

double upper_bound_of(const DualProblem& p, Eigen::Index i) {
  return p.y[i] > 0 ? p.c1 : kGuardFactor * p.c1;
}

// Most violating pair under the current gradient cache. F_t = y_t (eps_t - q_t);
// "up" collects coordinates movable along +y_t, "down" along -y_t.
struct PairSelection {
  Eigen::Index up = -1;
  Eigen::Index down = -1;
  double gap = 0.0;
};

PairSelection select_pair(const DualProblem& p, const Eigen::VectorXd& delta,
                          const Eigen::VectorXd& q) {
  const Eigen::Index n = delta.size();
  PairSelection sel;
  double up_best = -std::numeric_limits<double>::infinity();
  double down_best = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double eps_t = p.y[t] > 0 ? 1.0 : 0.0;
    const double f = p.y[t] * (eps_t - q[t]);
    const bool movable_up =
        p.y[t] > 0 ? delta[t] < upper_bound_of(p, t) : delta[t] > 0.0;
    const bool movable_down =
        p.y[t] > 0 ? delta[t] > 0.0 : delta[t] < upper_bound_of(p, t);
    if (movable_up && f > up_best) {
      up_best = f;
      sel.up = t;
    }
    if (movable_down && f < down_best) {
      down_best = f;
      sel.down = t;
    }
  }
  if (sel.up >= 0 && sel.down >= 0) sel.gap = up_best - down_best;
  return sel;
}

}  // namespace

double KktReport::worst() const {
  return std::max({lower_bound, upper_bound, equality, stationarity,
                   complementarity});
}

bool KktReport::within(double tol) const { return worst() <= tol; }

Eigen::MatrixXd build_gram(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.rows();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Upper>().rankUpdate(g);
  gram.triangularView<Eigen::StrictlyLower>() =
      gram.triangularView<Eigen::StrictlyUpper>().transpose();
  return gram;
}

double dual_objective(const DualProblem& problem, const Eigen::VectorXd& delta) {
  const Eigen::VectorXd q = gradient_cache(problem, delta);
  double linear = 0.0;
  for (Eigen::Index i = 0; i < delta.size(); ++i)
    if (problem.y[i] > 0) linear += delta[i];
  return linear - 0.5 * delta.dot(q);
}

DualSolution solve_dual(const DualProblem& problem,
                        const std::optional<Eigen::VectorXd>& warm_start) {
  check_problem(problem);
  const Eigen::Index n = problem.gram.rows();

  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  if (warm_start && warm_start->size() == n && warm_start->allFinite()) {
    Eigen::VectorXd candidate = *warm_start;
    for (Eigen::Index i = 0; i < n; ++i)
      candidate[i] = std::clamp(candidate[i], 0.0, upper_bound_of(problem, i));
    // Keep the warm start only if it still satisfies the equality constraint.
    if (std::abs(problem.y.dot(candidate)) <= problem.tol) delta = candidate;
  }

  Eigen::VectorXd q = gradient_cache(problem, delta);

  const std::int64_t budget = problem.max_pair_updates > 0
                                  ? problem.max_pair_updates
                                  : 100 * static_cast<std::int64_t>(n) * n;
  std::int64_t updates = 0;
  int since_refresh = 0;
  bool converged = false;
  bool hit_guard = false;

  while (true) {
    PairSelection sel = select_pair(problem, delta, q);
    if (sel.gap <= problem.tol) {
      // Re-check against a freshly computed gradient before declaring
      // convergence; the incremental cache drifts slightly.
      q = gradient_cache(problem, delta);
      since_refresh = 0;
      sel = select_pair(problem, delta, q);
      if (sel.gap <= problem.tol) {
        converged = true;
        break;
      }
    }
    if (updates >= budget) break;

    const Eigen::Index i = sel.up;
    const Eigen::Index j = sel.down;
    const double yi = problem.y[i];
    const double yj = problem.y[j];

    // Exact maximization of D along v = yi e_i - yj e_j (preserves y.delta).
    const double curvature =
        problem.gram(i, i) + problem.gram(j, j) - 2.0 * problem.gram(i, j);
    const double room_i =
        yi > 0 ? upper_bound_of(problem, i) - delta[i] : delta[i];
    const double room_j =
        yj > 0 ? delta[j] : upper_bound_of(problem, j) - delta[j];
    const double t_max = std::min(room_i, room_j);
    double t = curvature > 0 ? std::min(sel.gap / curvature, t_max) : t_max;
    t = std::max(t, 0.0);

    const double old_i = delta[i];
    const double old_j = delta[j];
    delta[i] = std::clamp(old_i + t * yi, 0.0, upper_bound_of(problem, i));
    delta[j] = std::clamp(old_j - t * yj, 0.0, upper_bound_of(problem, j));
    if (t == room_i) delta[i] = yi > 0 ? upper_bound_of(problem, i) : 0.0;
    if (t == room_j) delta[j] = yj > 0 ? 0.0 : upper_bound_of(problem, j);

    if (problem.y[i] < 0 && delta[i] >= upper_bound_of(problem, i)) hit_guard = true;
    if (problem.y[j] < 0 && delta[j] >= upper_bound_of(problem, j)) hit_guard = true;

    const double di = delta[i] - old_i;
    const double dj = delta[j] - old_j;
    q += (yi * di) * problem.y.cwiseProduct(problem.gram.col(i));
    q += (yj * dj) * problem.y.cwiseProduct(problem.gram.col(j));

    ++updates;
    if (++since_refresh >= 4096) {
      q = gradient_cache(problem, delta);
      since_refresh = 0;
    }
  }

  DualSolution solution;
  solution.delta = delta;
  solution.objective = dual_objective(problem, delta);
  solution.kkt = kkt_residual(problem, delta);
  solution.iterations = updates;
  solution.hit_guard_cap = hit_guard;
  solution.certified =
      converged && !hit_guard && solution.kkt.within(problem.tol);
  return solution;
}

KktReport kkt_residual(const DualProblem& problem, const Eigen::VectorXd& delta) {
  if (delta.size() != problem.gram.rows())
    throw std::invalid_argument("kkt_residual: multiplier length mismatch");
  const Eigen::Index n = delta.size();
  const Eigen::VectorXd q = gradient_cache(problem, delta);

  KktReport report;
  report.equality = std::abs(problem.y.dot(delta));
  for (Eigen::Index i = 0; i < n; ++i) {
    report.lower_bound = std::max(report.lower_bound, -delta[i]);
    if (problem.y[i] > 0)
      report.upper_bound = std::max(report.upper_bound, delta[i] - problem.c1);
  }
  report.lower_bound = std::max(report.lower_bound, 0.0);
  report.upper_bound = std::max(report.upper_bound, 0.0);

  // Equality multiplier estimate: with F_t = y_t (eps_t - q_t), coordinates
  // that can move along +y_t demand F <= lambda and the ones that can move
  // along -y_t demand F >= lambda (negatives are unbounded above in the true
  // problem, so they are never "at upper"). The midpoint balances the two.
  const double bound_eps = 1e-10 * std::max(1.0, problem.c1);
  double up_max = -std::numeric_limits<double>::infinity();
  double down_min = std::numeric_limits<double>::infinity();
  auto f_value = [&](Eigen::Index t) {
    const double eps_t = problem.y[t] > 0 ? 1.0 : 0.0;
    return problem.y[t] * (eps_t - q[t]);
  };
  for (Eigen::Index t = 0; t < n; ++t) {
    const bool at_lower = delta[t] <= bound_eps;
    const bool at_upper = problem.y[t] > 0 && delta[t] >= problem.c1 - bound_eps;
    const bool movable_up = problem.y[t] > 0 ? !at_upper : !at_lower;
    const bool movable_down = problem.y[t] > 0 ? !at_lower : true;
    const double f = f_value(t);
    if (movable_up) up_max = std::max(up_max, f);
    if (movable_down) down_min = std::min(down_min, f);
  }
  double lambda = 0.0;
  if (std::isfinite(up_max) && std::isfinite(down_min))
    lambda = 0.5 * (up_max + down_min);
  else if (std::isfinite(up_max))
    lambda = up_max;
  else if (std::isfinite(down_min))
    lambda = down_min;
  report.lambda = lambda;

  for (Eigen::Index t = 0; t < n; ++t) {
    const double eps_t = problem.y[t] > 0 ? 1.0 : 0.0;
    const double reduced = (eps_t - q[t]) - lambda * problem.y[t];
    const bool at_lower = delta[t] <= bound_eps;
    const bool at_upper = problem.y[t] > 0 && delta[t] >= problem.c1 - bound_eps;

    double stationarity = 0.0;
    if (at_lower && at_upper)
      stationarity = 0.0;  // degenerate box (c1 ~ 0)
    else if (at_lower)
      stationarity = std::max(0.0, reduced);
    else if (at_upper)
      stationarity = std::max(0.0, -reduced);
    else
      stationarity = std::abs(reduced);
    report.stationarity = std::max(report.stationarity, stationarity);

    // min(primal slack, multiplier estimate) per bound.
    const double mu = std::max(0.0, -reduced);   // lower-bound multiplier
    const double nu = std::max(0.0, reduced);    // upper-bound multiplier
    const double lower_slack = std::max(0.0, delta[t]);
    report.complementarity =
        std::max(report.complementarity, std::min(lower_slack, mu));
    if (problem.y[t] > 0) {
      const double upper_slack = std::max(0.0, problem.c1 - delta[t]);
      report.complementarity =
          std::max(report.complementarity, std::min(upper_slack, nu));
    }
  }
  return report;
}

Eigen::VectorXd recover_u(const Eigen::VectorXd& delta, const Eigen::VectorXd& y,
                          const Eigen::MatrixXd& g) {
  if (delta.size() != g.rows() || y.size() != g.rows())
    throw std::invalid_argument("recover_u: inconsistent lengths");
  return g.transpose() * delta.cwiseProduct(y);
}

double recover_theta(const Eigen::VectorXd& u, const Eigen::MatrixXd& g,
                     const Eigen::VectorXd& y) {
  if (u.size() != g.cols() || y.size() != g.rows())
    throw std::invalid_argument("recover_theta: inconsistent shapes");
  double theta = -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd scores = g * u;
  for (Eigen::Index j = 0; j < y.size(); ++j)
    if (y[j] < 0) theta = std::max(theta, scores[j]);
  if (!std::isfinite(theta))
    throw std::invalid_argument("recover_theta: no negative bags present");
  return theta;
}

}  // namespace convmpt
