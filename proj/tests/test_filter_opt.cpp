#include <doctest.h>

#include <cmath>
#include <limits>

#include "convmpt/error.hpp"
#include "convmpt/filter_opt.hpp"
#include "convmpt/parallel.hpp"
#include "convmpt/rng.hpp"
#include "convmpt/synth.hpp"
#include "support/oracles.hpp"

using namespace convmpt;

namespace {

FilterSubproblem random_subproblem(Rng& rng, Eigen::Index n, Eigen::Index d,
                                   Activation activation, double c2) {
  FilterSubproblem sub;
  sub.filter_index = 0;
  sub.activation = activation;
  sub.c2 = c2;
  sub.delta.resize(n);
  sub.y.resize(n);
  sub.witnesses.resize(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sub.delta[i] = 2.0 * rng.uniform();
    sub.y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    for (Eigen::Index r = 0; r < d; ++r) sub.witnesses(r, i) = rng.gaussian();
  }
  return sub;
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index d, double scale = 1.0) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = scale * rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("filter objective reduces to ridge when multipliers vanish") {
  Rng rng(1);
  FilterSubproblem sub = random_subproblem(rng, 5, 3, Activation::tanh, 0.25);
  sub.delta.setZero();
  const Eigen::VectorXd w = random_vector(rng, 3);
  CHECK(filter_objective(sub, w) ==
        doctest::Approx(0.25 * w.squaredNorm()).epsilon(1e-14));
  CHECK((filter_gradient(sub, w) - 0.5 * w).norm() <= 1e-14);
}

TEST_CASE("tanh objective and gradient vanish at the origin") {
  Rng rng(2);
  const FilterSubproblem sub = random_subproblem(rng, 6, 4, Activation::tanh, 0.1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  CHECK(filter_objective(sub, zero) == 0.0);
  CHECK(filter_gradient(sub, zero).norm() == 0.0);
}

TEST_CASE("opposite multipliers on a shared witness cancel the square term") {
  FilterSubproblem sub;
  sub.activation = Activation::identity;
  sub.c2 = 0.3;
  sub.delta = Eigen::VectorXd::Ones(2);
  sub.y.resize(2);
  sub.y << 1.0, -1.0;
  Eigen::VectorXd v(3);
  v << 0.2, -1.0, 0.7;
  sub.witnesses.resize(3, 2);
  sub.witnesses.col(0) = v;
  sub.witnesses.col(1) = v;
  Eigen::VectorXd w(3);
  w << 1.0, 2.0, 3.0;
  CHECK(filter_objective(sub, w) ==
        doctest::Approx(0.3 * w.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("factored objective agrees with the explicit double sum") {
  Rng rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 2 + rng.below(8);
    const Eigen::Index d = 1 + rng.below(6);
    for (auto activation :
         {Activation::tanh, Activation::sigmoid, Activation::identity}) {
      const FilterSubproblem sub =
          random_subproblem(rng, n, d, activation, 0.05 + rng.uniform());
      const Eigen::VectorXd w = random_vector(rng, d);

      double double_sum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          double_sum += sub.delta[i] * sub.delta[j] * sub.y[i] * sub.y[j] *
                        activate(activation, w.dot(sub.witnesses.col(i))) *
                        activate(activation, w.dot(sub.witnesses.col(j)));
      const double expected = -0.5 * double_sum + sub.c2 * w.squaredNorm();
      CHECK(filter_objective(sub, w) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(500);
  double worst = 0.0;
  int tested = 0;
  while (tested < 100) {
    const Eigen::Index n = 1 + rng.below(10);
    const Eigen::Index d = 1 + rng.below(8);
    const Activation activation = static_cast<Activation>(rng.below(3));
    const FilterSubproblem sub =
        random_subproblem(rng, n, d, activation, 0.01 + rng.uniform());
    const Eigen::VectorXd w = random_vector(rng, d, 0.8);

    // skip saturated tanh points, where finite differences lose precision
    if (activation == Activation::tanh &&
        (sub.witnesses.transpose() * w).cwiseAbs().maxCoeff() > 5.0)
      continue;
    ++tested;

    const Eigen::VectorXd analytic = filter_gradient(sub, w);
    const Eigen::VectorXd numeric = oracles::central_difference_gradient(
        [&](const Eigen::VectorXd& x) { return filter_objective(sub, x); }, w,
        1e-6);
    const double rel = (analytic - numeric).norm() /
                       std::max(1.0, numeric.norm());
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("descent from a stationary point leaves the filter unchanged") {
  Rng rng(9);
  const FilterSubproblem sub = random_subproblem(rng, 4, 3, Activation::tanh, 0.2);
  OptimizerConfig config;
  const FilterUpdateResult result =
      update_filter(sub, Eigen::VectorXd::Zero(3), config);
  CHECK(result.w.norm() == 0.0);
  for (const auto& step : result.trace) CHECK(step.accepted);
}

TEST_CASE("zero multipliers give the closed-form ridge shrinkage") {
  Rng rng(10);
  FilterSubproblem sub = random_subproblem(rng, 5, 4, Activation::sigmoid, 0.5);
  sub.delta.setZero();
  OptimizerConfig config;
  config.eta = 0.1;
  config.steps_per_filter = 6;
  const Eigen::VectorXd w0 = random_vector(rng, 4);
  const FilterUpdateResult result = update_filter(sub, w0, config);
  // each accepted step multiplies by (1 - 2 eta c2); none backtrack
  const double factor = std::pow(1.0 - 2.0 * 0.1 * 0.5, 6);
  CHECK((result.w - factor * w0).norm() <= 1e-12 * std::max(1.0, w0.norm()));
}

TEST_CASE("updates never increase the objective") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Activation activation = static_cast<Activation>(rng.below(3));
    const FilterSubproblem sub =
        random_subproblem(rng, 2 + rng.below(8), 2 + rng.below(5), activation,
                          0.01 + rng.uniform());
    OptimizerConfig config;
    config.eta = 0.05 + rng.uniform();
    config.steps_per_filter = 1 + static_cast<int>(rng.below(5));
    const Eigen::VectorXd w0 = random_vector(rng, sub.dim());
    const double before = filter_objective(sub, w0);
    const FilterUpdateResult result = update_filter(sub, w0, config);
    CHECK(filter_objective(sub, result.w) <= before);
    for (const auto& step : result.trace)
      CHECK(step.objective_after <= step.objective_before);
  }
}

TEST_CASE("non-finite inputs abort the filter update") {
  Rng rng(12);
  FilterSubproblem sub = random_subproblem(rng, 3, 2, Activation::identity, 0.1);
  Eigen::VectorXd w(2);
  w << std::numeric_limits<double>::infinity(), 0.0;
  CHECK_THROWS_AS(update_filter(sub, w, OptimizerConfig{}), NumericError);
}

TEST_CASE("filter bank updates columns independently") {
  SynthSpec spec;
  spec.n_pos = 8;
  spec.n_neg = 8;
  spec.d = 4;
  spec.bag_min = 2;
  spec.bag_max = 5;
  spec.seed = 77;
  const Dataset ds = synth_dataset(spec);

  Rng rng(13);
  FilterBank filters;
  filters.activation = Activation::tanh;
  filters.weights = Eigen::MatrixXd::Zero(4, 3);
  for (Eigen::Index k = 0; k < 3; ++k)
    filters.weights.col(k) = random_vector(rng, 4, 0.4);

  Eigen::VectorXd delta(ds.n()), y = ds.labels();
  for (Eigen::Index i = 0; i < ds.n(); ++i) delta[i] = rng.uniform();

  const DatasetEncoding enc = encode_dataset(filters, ds);
  OptimizerConfig config;
  config.steps_per_filter = 3;
  config.eta = 0.01;

  const FilterBankUpdate bank =
      update_filterbank(filters, delta, y, enc.psi, ds, 0.05, config);
  CHECK(bank.objective_after <= bank.objective_before);

  // column-by-column updates in any order give bit-identical results
  for (Eigen::Index k : {2, 0, 1}) {
    const FilterSubproblem sub = make_filter_subproblem(
        static_cast<int>(k), delta, y, enc.psi, ds, 0.05, filters.activation);
    const FilterUpdateResult single =
        update_filter(sub, filters.weights.col(k), config);
    CHECK((single.w.array() == bank.filters.weights.col(k).array()).all());
  }

  // single-filter bank reduces to update_filter
  FilterBank one;
  one.activation = filters.activation;
  one.weights = filters.weights.leftCols(1);
  const DatasetEncoding enc_one = encode_dataset(one, ds);
  const FilterBankUpdate one_update =
      update_filterbank(one, delta, y, enc_one.psi, ds, 0.05, config);
  const FilterSubproblem sub0 = make_filter_subproblem(0, delta, y, enc_one.psi,
                                                       ds, 0.05, one.activation);
  const FilterUpdateResult direct =
      update_filter(sub0, one.weights.col(0), config);
  CHECK((one_update.filters.weights.col(0).array() == direct.w.array()).all());
}

TEST_CASE("parallel and serial filter updates are bit-identical") {
  SynthSpec spec;
  spec.n_pos = 10;
  spec.n_neg = 10;
  spec.d = 6;
  spec.bag_min = 2;
  spec.bag_max = 7;
  spec.seed = 15;
  const Dataset ds = synth_dataset(spec);

  Rng rng(16);
  FilterBank filters;
  filters.activation = Activation::tanh;
  filters.weights.resize(6, 8);
  for (Eigen::Index k = 0; k < 8; ++k)
    filters.weights.col(k) = random_vector(rng, 6, 0.4);
  Eigen::VectorXd delta(ds.n());
  for (Eigen::Index i = 0; i < ds.n(); ++i) delta[i] = rng.uniform();
  const DatasetEncoding enc = encode_dataset(filters, ds);

  set_max_threads(1);
  const FilterBankUpdate serial = update_filterbank(
      filters, delta, ds.labels(), enc.psi, ds, 0.02, OptimizerConfig{});
  set_max_threads(4);
  const FilterBankUpdate parallel = update_filterbank(
      filters, delta, ds.labels(), enc.psi, ds, 0.02, OptimizerConfig{});
  set_max_threads(0);
  CHECK((serial.filters.weights.array() == parallel.filters.weights.array()).all());
  CHECK(serial.objective_after == parallel.objective_after);
}
