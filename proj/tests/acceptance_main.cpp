// Acceptance suite: one check per shipping criterion, each printed as a
// single PASS/FAIL line. Oracles (finite differences, projected gradient,
// brute-force counting) live in tests/support and are independent of the
// library's code paths.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "convmpt/dual_solver.hpp"
#include "convmpt/evaluation.hpp"
#include "convmpt/fingerprint.hpp"
#include "convmpt/filter_opt.hpp"
#include "convmpt/metrics.hpp"
#include "convmpt/parallel.hpp"
#include "convmpt/rng.hpp"
#include "convmpt/synth.hpp"
#include "convmpt/trainer.hpp"
#include "support/oracles.hpp"

using namespace convmpt;
namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string message;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure{message};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Eigen::MatrixXd random_features(Rng& rng, Eigen::Index n, Eigen::Index m) {
  Eigen::MatrixXd g(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = rng.gaussian();
  return g;
}

Eigen::VectorXd random_labels(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  y[0] = 1.0;
  y[n - 1] = -1.0;
  return y;
}

SynthSpec acceptance_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.n_pos = 50;
  spec.n_neg = 50;
  spec.d = 16;
  spec.bag_min = 5;
  spec.bag_max = 20;
  spec.signal = SynthSignal::witness_instance();
  spec.seed = seed;
  return spec;
}

TrainConfig acceptance_config() {
  TrainConfig config;  // library defaults: eta 0.002, 1 step/filter, init 0.5
  config.c1 = 1.0;
  config.c2 = 0.01;
  config.filter_count = 8;
  config.outer_iters = 20;
  config.seed = 42;
  return config;
}

// ---- criterion bodies ------------------------------------------------

void gradient_oracle(std::ostringstream& note) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(9001);
  double worst = 0.0;
  int tested = 0;
  while (tested < 100) {
    const Eigen::Index n = 1 + rng.below(10);
    const Eigen::Index d = 1 + rng.below(8);
    const Activation activation = static_cast<Activation>(rng.below(3));

    FilterSubproblem sub;
    sub.activation = activation;
    sub.c2 = 0.01 + rng.uniform();
    sub.delta.resize(n);
    sub.y.resize(n);
    sub.witnesses.resize(d, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      sub.delta[i] = 2.0 * rng.uniform();
      sub.y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      for (Eigen::Index r = 0; r < d; ++r) sub.witnesses(r, i) = rng.gaussian();
    }
    Eigen::VectorXd w(d);
    for (Eigen::Index r = 0; r < d; ++r) w[r] = 0.8 * rng.gaussian();

    if (activation == Activation::tanh &&
        (sub.witnesses.transpose() * w).cwiseAbs().maxCoeff() > 5.0)
      continue;  // saturation excluded by the criterion
    ++tested;

    const Eigen::VectorXd analytic = filter_gradient(sub, w);
    const Eigen::VectorXd numeric = oracles::central_difference_gradient(
        [&](const Eigen::VectorXd& x) { return filter_objective(sub, x); }, w,
        1e-6);
    worst = std::max(worst, (analytic - numeric).norm() /
                                std::max(1.0, numeric.norm()));
  }
  const double elapsed = seconds_since(start);
  require(worst <= 1e-5, "max relative gradient error " + std::to_string(worst));
  require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + "s");
  note << "100 subproblems, max rel err " << worst << ", " << elapsed << "s";
}

void dual_solver_oracle(std::ostringstream& note) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(77);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + rng.below(5);
    const Eigen::MatrixXd g = random_features(rng, n, 1 + rng.below(4));
    const Eigen::VectorXd y = random_labels(rng, n);
    const double c1 = 0.5 + 4.5 * rng.uniform();

    DualProblem problem{build_gram(g), y, c1, 1e-8, -1};
    const DualSolution solution = solve_dual(problem);
    require(solution.certified, "solve not certified on trial " + std::to_string(trial));
    const auto oracle = oracles::pg_solve_dual(g, y, c1, 1e-8);
    require(oracle.residual <= 1e-8, "oracle did not converge");
    worst_gap = std::max(worst_gap, std::abs(solution.objective - oracle.objective));
  }
  require(worst_gap <= 1e-6,
          "objective gap vs oracle " + std::to_string(worst_gap));

  // analytic two-point optimum
  double worst_closed_form = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd g = random_features(rng, 2, 3);
    Eigen::VectorXd y(2);
    y << 1.0, -1.0;
    const double c1 = 0.2 + 3.0 * rng.uniform();
    DualProblem problem{build_gram(g), y, c1, 1e-10, -1};
    const DualSolution solution = solve_dual(problem);
    require(solution.certified, "two-point solve not certified");
    const double t_star =
        std::min(c1, 1.0 / (g.row(0) - g.row(1)).squaredNorm());
    worst_closed_form =
        std::max({worst_closed_form, std::abs(solution.delta[0] - t_star),
                  std::abs(solution.delta[1] - t_star)});
  }
  require(worst_closed_form <= 1e-8,
          "closed-form deviation " + std::to_string(worst_closed_form));
  const double elapsed = seconds_since(start);
  require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + "s");
  note << "50 oracle instances (max gap " << worst_gap << "), 20 closed forms, "
       << elapsed << "s";
}

void kkt_certification(std::ostringstream& note) {
  Rng rng(4242);
  const double tol = 1e-6;
  int certified = 0, perturbations = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 3 + rng.below(6);
    const Eigen::MatrixXd g = random_features(rng, n, 2 + rng.below(3));
    const Eigen::VectorXd y = random_labels(rng, n);
    const double c1 = 0.5 + 2.5 * rng.uniform();
    DualProblem problem{build_gram(g), y, c1, tol, -1};
    const DualSolution solution = solve_dual(problem);
    if (!solution.certified) continue;
    ++certified;

    const KktReport report = kkt_residual(problem, solution.delta);
    require(report.lower_bound <= tol, "lower-bound residual above tol");
    require(report.upper_bound <= tol, "upper-bound residual above tol");
    require(report.equality <= tol, "equality residual above tol");
    require(report.stationarity <= tol, "stationarity residual above tol");
    require(report.complementarity <= tol, "complementarity residual above tol");

    for (Eigen::Index i = 0; i < n; ++i) {
      const double upper = y[i] > 0 ? c1 : 1e300;
      if (solution.delta[i] <= 100 * tol || solution.delta[i] >= upper - 100 * tol)
        continue;  // only free coordinates
      Eigen::VectorXd perturbed = solution.delta;
      perturbed[i] += 10 * tol;
      const KktReport after = kkt_residual(problem, perturbed);
      require(after.worst() > report.worst(),
              "perturbation did not raise the residual");
      ++perturbations;
    }
  }
  require(certified >= 20, "too few certified solves: " + std::to_string(certified));
  require(perturbations >= 20,
          "too few free coordinates exercised: " + std::to_string(perturbations));
  note << certified << " certified solves, " << perturbations
       << " free-coordinate perturbations";
}

void strong_duality(std::ostringstream& note) {
  Rng rng(31415);
  double worst_gap = 0.0, worst_margin = 0.0;
  int margin_checks = 0;
  for (int trial = 0; trial < 20; ++trial) {
    // fixed random filters over fresh bags give the fixed-representation QP
    SynthSpec spec;
    spec.n_pos = 2 + static_cast<int>(rng.below(3));
    spec.n_neg = 2 + static_cast<int>(rng.below(3));
    spec.d = 4;
    spec.bag_min = 2;
    spec.bag_max = 6;
    spec.seed = 1000 + trial;
    const Dataset ds = synth_dataset(spec);

    FilterBank filters;
    filters.activation = Activation::tanh;
    filters.weights.resize(4, 3);
    for (Eigen::Index k = 0; k < 3; ++k)
      for (Eigen::Index r = 0; r < 4; ++r)
        filters.weights(r, k) = 0.5 * rng.gaussian();

    const DatasetEncoding enc = encode_dataset(filters, ds);
    const Eigen::VectorXd y = ds.labels();
    const double c1 = 0.5 + 2.0 * rng.uniform();
    DualProblem problem{build_gram(enc.g), y, c1, 1e-8, -1};
    const DualSolution solution = solve_dual(problem);
    require(solution.certified, "fixed-representation solve not certified");

    const Eigen::VectorXd u = recover_u(solution.delta, y, enc.g);
    const double theta = recover_theta(u, enc.g, y);
    const Eigen::VectorXd scores = enc.g * u;

    double slack_sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] > 0) slack_sum += hinge_loss(scores[i], theta);
    const double primal = 0.5 * u.squaredNorm() + c1 * slack_sum;
    worst_gap = std::max(worst_gap, std::abs(primal - solution.objective));

    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] <= 0) continue;
      const double margin_tol = std::max(1e-6, 1e-6 * c1);
      if (solution.delta[i] <= margin_tol ||
          solution.delta[i] >= c1 - margin_tol)
        continue;  // free support positives only
      worst_margin = std::max(worst_margin, std::abs(scores[i] - theta - 1.0));
      ++margin_checks;
    }
  }
  require(worst_gap <= 1e-5, "duality gap " + std::to_string(worst_gap));
  require(worst_margin <= 1e-5,
          "margin deviation " + std::to_string(worst_margin));
  require(margin_checks >= 5,
          "too few free support positives: " + std::to_string(margin_checks));
  note << "20 instances, max |primal-dual| " << worst_gap << ", max margin dev "
       << worst_margin << " over " << margin_checks << " support positives";
}

void alternation_monotonicity(std::ostringstream& note) {
  const Dataset ds = synth_dataset(acceptance_spec(42));
  TrainConfig config = acceptance_config();
  const Model model = train(ds, config);

  int ascent_checks = 0, descent_checks = 0;
  for (const auto& diag : model.diagnostics) {
    const double guard =
        1e-9 * std::max(1.0, std::abs(diag.dual_objective_at_warm_start));
    require(diag.dual_objective >= diag.dual_objective_at_warm_start - guard,
            "dual objective fell at iteration " + std::to_string(diag.iteration));
    ++ascent_checks;
    if (diag.filter_step_taken) {
      require(diag.filter_objective_after <= diag.filter_objective_before,
              "filter objective rose at iteration " +
                  std::to_string(diag.iteration));
      ++descent_checks;
    }
  }
  require(descent_checks == config.outer_iters || model.early_stopped,
          "training stopped unexpectedly early");
  note << ascent_checks << " multiplier steps ascended, " << descent_checks
       << " filter steps descended, zero violations";
}

void end_to_end_learnability(std::ostringstream& note) {
  set_max_threads(1);
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = synth_dataset(acceptance_spec(42));
  const TrainConfig config = acceptance_config();

  const Model model = train(ds, config);
  double best_train = 0.0;
  for (const auto& diag : model.diagnostics)
    best_train = std::max(best_train, diag.train_pos_at_top);
  require(best_train == 1.0, "train Pos@Top peaked at " + std::to_string(best_train));

  const CvResult cv = cross_validate(ds, config, 10, config.seed);
  const double elapsed = seconds_since(start);
  set_max_threads(0);
  require(cv.summary.mean >= 0.8,
          "10-fold mean " + std::to_string(cv.summary.mean));
  require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s");
  note << "train Pos@Top 1.0, 10-fold mean " << cv.summary.mean << ", "
       << elapsed << "s single-threaded";
}

void paper_ordering(std::ostringstream& note) {
  double min_gap = 1.0;
  for (std::uint64_t seed : {42ull, 43ull, 44ull}) {
    const Dataset ds = synth_dataset(acceptance_spec(seed));
    TrainConfig conv = acceptance_config();
    TrainConfig baseline = conv;
    baseline.mode = RepresentationMode::mean_pool_baseline;

    const double conv_mean = cross_validate(ds, conv, 10, 42).summary.mean;
    const double base_mean = cross_validate(ds, baseline, 10, 42).summary.mean;
    const double gap = conv_mean - base_mean;
    min_gap = std::min(min_gap, gap);
    note << "seed " << seed << ": conv " << conv_mean << " vs baseline "
         << base_mean << "; ";
    require(gap >= 0.15, "gap " + std::to_string(gap) + " on seed " +
                             std::to_string(seed));
  }
  note << "min gap " << min_gap;
}

void metric_correctness(std::ostringstream& note) {
  Rng rng(271828);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 2 + rng.below(40);
    ScoredSet set;
    set.scores.resize(n);
    set.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      set.scores[i] = rng.uniform() < 0.4
                          ? static_cast<double>(rng.below(6)) / 3.0  // forced ties
                          : 2.0 * rng.uniform() - 1.0;
      set.labels[i] = rng.uniform() < 0.5 ? 1.0 : -1.0;
    }
    set.labels[0] = 1.0;
    set.labels[n - 1] = -1.0;
    const double fast = pos_at_top(set);
    const double brute = oracles::brute_force_pos_at_top(set.scores, set.labels);
    require(fast == brute, "mismatch on trial " + std::to_string(trial));
  }
  note << "1000 random scored sets (with ties) match exactly";
}

void determinism(std::ostringstream& note) {
  const std::string cli = CONVMPT_CLI_PATH;
  const fs::path dir =
      fs::temp_directory_path() / ("convmpt_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto at = [&](const std::string& name) { return (dir / name).string(); };
  auto shell = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };

  require(shell("synth --pos 20 --neg 20 --dim 8 --bag 3:9 --seed 7 --out " +
                at("d.jsonl")) == 0,
          "synth failed");
  const std::string train_flags =
      "train --data " + at("d.jsonl") + " --filters 4 --iters 5 --seed 42 --out ";
  require(shell(train_flags + at("m1.json") + " --manifest " + at("mf1.json")) == 0,
          "first train failed");
  require(shell(train_flags + at("m2.json") + " --manifest " + at("mf2.json")) == 0,
          "second train failed");
  require(fingerprint_file(at("m1.json")) == fingerprint_file(at("m2.json")),
          "model files differ between identical runs");

  const std::string eval_flags = "eval --data " + at("d.jsonl") +
                                 " --folds 5 --filters 4 --iters 3 --seed 1 --table ";
  require(shell(eval_flags + at("t1.csv")) == 0, "first eval failed");
  require(shell(eval_flags + at("t2.csv")) == 0, "second eval failed");
  require(fingerprint_file(at("t1.csv")) == fingerprint_file(at("t2.csv")),
          "metric tables differ between identical runs");

  std::error_code ec;
  fs::remove_all(dir, ec);
  note << "model files and metric tables byte-identical across reruns";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<void(std::ostringstream&)> body;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient matches finite differences", gradient_oracle},
      {2, "dual solver matches projected-gradient oracle", dual_solver_oracle},
      {3, "KKT certification and sensitivity", kkt_certification},
      {4, "strong duality and unit margins", strong_duality},
      {5, "alternation monotonicity", alternation_monotonicity},
      {6, "end-to-end learnability", end_to_end_learnability},
      {7, "convolutional model outranks mean-pool baseline", paper_ordering},
      {8, "Pos@Top matches brute force", metric_correctness},
      {9, "CLI determinism", determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::ostringstream note;
    std::string verdict = "PASS";
    std::string detail;
    try {
      criterion.body(note);
      detail = note.str();
    } catch (const Failure& failure) {
      verdict = "FAIL";
      detail = failure.message;
      ++failures;
    } catch (const std::exception& error) {
      verdict = "FAIL";
      detail = std::string("exception: ") + error.what();
      ++failures;
    }
    std::cout << verdict << "  " << criterion.id << ". " << criterion.name
              << (detail.empty() ? "" : "  [" + detail + "]") << "\n";
  }
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
