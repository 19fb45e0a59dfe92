#ifndef CONVMPT_FILTER_OPT_HPP
#define CONVMPT_FILTER_OPT_HPP

#include <vector>

#include <Eigen/Core>

#include "convmpt/activation.hpp"
#include "convmpt/data.hpp"
#include "convmpt/representation.hpp"

namespace convmpt {

/// The per-filter problem solved while the multipliers are fixed:
///
///   s(w) = -1/2 ( sum_i c_i phi(w . x_i) )^2 + c2 ||w||^2,
///
/// with c_i = delta_i y_i and x_i the witness instance recorded for bag i
/// when the witnesses were frozen. The double sum over bag pairs factorizes
/// into the square above; a test pins the two forms against each other.
struct FilterSubproblem {
  int filter_index = 0;
  Eigen::VectorXd delta;     // n multipliers
  Eigen::VectorXd y;         // n labels
  Eigen::MatrixXd witnesses; // d x n frozen witness instances
  double c2 = 0.0;
  Activation activation = Activation::tanh;

  Eigen::Index n() const { return witnesses.cols(); }
  Eigen::Index dim() const { return witnesses.rows(); }
};

/// Gradient-descent settings for the filter step. The defaults take one
/// gentle step per filter per alternation: the filter objective rewards
/// saturating the activation, and aggressive steps run straight into that
/// regime, where max pooling returns ~1 for every bag and ranking signal is
/// lost. The gradient norm grows with n * c1, so eta trades off against
/// problem scale.
struct OptimizerConfig {
  double eta = 0.002;
  double backtrack_ratio = 0.5;
  int max_backtracks = 30;
  int steps_per_filter = 1;
};

void validate(const OptimizerConfig& config);

struct FilterStep {
  double objective_before = 0.0;
  double objective_after = 0.0;
  double eta = 0.0;
  int backtracks = 0;
  bool accepted = false;
};

struct FilterUpdateResult {
  Eigen::VectorXd w;
  std::vector<FilterStep> trace;
};

/// Collects the witness columns for filter k from the dataset using the
/// frozen witness index matrix.
FilterSubproblem make_filter_subproblem(int filter_index,
                                        const Eigen::VectorXd& delta,
                                        const Eigen::VectorXd& y,
                                        const Eigen::MatrixXi& psi,
                                        const Dataset& dataset, double c2,
                                        Activation activation);

double filter_objective(const FilterSubproblem& sub, const Eigen::VectorXd& w);

/// Analytic gradient with the witnesses held fixed:
///   grad s = -S * sum_i c_i phi'(w . x_i) x_i + 2 c2 w,  S = sum_i c_i phi(w . x_i).
Eigen::VectorXd filter_gradient(const FilterSubproblem& sub,
                                const Eigen::VectorXd& w);

/// steps_per_filter descent steps. Each step backtracks from eta until the
/// objective does not increase, or leaves w unchanged after max_backtracks,
/// so s(result.w) <= s(w) always. Throws NumericError if the objective or
/// gradient at the current point is non-finite.
FilterUpdateResult update_filter(const FilterSubproblem& sub, Eigen::VectorXd w,
                                 const OptimizerConfig& config);

struct FilterBankUpdate {
  FilterBank filters;
  double objective_before = 0.0;  // sum_k s(w_k) at entry
  double objective_after = 0.0;   // sum_k s(w_k) at exit
};

/// Updates every filter column independently (the per-filter objectives do
/// not interact), using column k of the frozen witness matrix. Safe to run
/// columns in parallel; the result does not depend on the schedule.
FilterBankUpdate update_filterbank(const FilterBank& filters,
                                   const Eigen::VectorXd& delta,
                                   const Eigen::VectorXd& y,
                                   const Eigen::MatrixXi& psi,
                                   const Dataset& dataset, double c2,
                                   const OptimizerConfig& config);

}  // namespace convmpt

#endif  // CONVMPT_FILTER_OPT_HPP
