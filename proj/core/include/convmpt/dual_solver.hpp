#ifndef CONVMPT_DUAL_SOLVER_HPP
#define CONVMPT_DUAL_SOLVER_HPP

#include <cstdint>
#include <optional>

#include <Eigen/Core>

namespace convmpt {

/// The concave QP solved in the multiplier step for a fixed representation:
///
///   maximize   D(delta) = -1/2 sum_{i,i'} delta_i delta_i' y_i y_i' K_ii'
///                         + sum_{i: y_i=+1} delta_i
///   subject to delta >= 0,
///              delta_i <= c1 for positive bags,
///              y . delta = 0.
///
/// K is the Gram matrix of the bag representations (PSD up to round-off).
struct DualProblem {
  Eigen::MatrixXd gram;  // n x n, symmetric within 1e-12
  Eigen::VectorXd y;     // +-1 labels
  double c1 = 1.0;
  double tol = 1e-6;
  /// Pair-update budget; <= 0 means the default 100 * n^2.
  std::int64_t max_pair_updates = -1;
};

/// Optimality report for a multiplier vector. Families:
///  - feasibility: lower_bound / upper_bound / equality violations,
///  - stationarity: largest reduced-gradient component that points into the
///    feasible directions at the coordinate's active bounds, after removing
///    the equality multiplier `lambda`,
///  - complementarity: largest min(primal slack, multiplier estimate).
struct KktReport {
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double equality = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  double lambda = 0.0;

  double worst() const;
  bool within(double tol) const;
};

struct DualSolution {
  Eigen::VectorXd delta;
  double objective = 0.0;
  KktReport kkt;
  std::int64_t iterations = 0;  // pair updates performed
  bool certified = false;
  /// A negative multiplier ran into the 1e6*c1 divergence guard; the
  /// instance is ill-conditioned and the solution is not certified.
  bool hit_guard_cap = false;
};

/// K = G G^T with rows of G as bag representations. The upper triangle is
/// computed and mirrored, so the result is exactly symmetric.
Eigen::MatrixXd build_gram(const Eigen::MatrixXd& g);

/// D(delta) for diagnostics and ascent checks.
double dual_objective(const DualProblem& problem, const Eigen::VectorXd& delta);

/// Pairwise coordinate ascent on the equality manifold: repeatedly pick the
/// most violating index pair, maximize D exactly along the direction that
/// keeps y . delta = 0, and clip to the bounds. Deterministic given
/// (problem, warm_start). A warm start that is infeasible for the problem is
/// replaced by the zero vector.
DualSolution solve_dual(const DualProblem& problem,
                        const std::optional<Eigen::VectorXd>& warm_start = {});

KktReport kkt_residual(const DualProblem& problem, const Eigen::VectorXd& delta);

/// Classifier recovery from stationarity: u = G^T (delta .* y).
Eigen::VectorXd recover_u(const Eigen::VectorXd& delta, const Eigen::VectorXd& y,
                          const Eigen::MatrixXd& g);

/// Top-negative threshold: max over negative bags of u . g_j.
double recover_theta(const Eigen::VectorXd& u, const Eigen::MatrixXd& g,
                     const Eigen::VectorXd& y);

}  // namespace convmpt

#endif  // CONVMPT_DUAL_SOLVER_HPP
