#include "convmpt/synth.hpp"

#include <stdexcept>
#include <string>

#include "convmpt/error.hpp"
#include "convmpt/rng.hpp"

namespace convmpt {

SynthSignal::Kind parse_signal_kind(const std::string& name) {
  if (name == "witness" || name == "witness-instance")
    return SynthSignal::Kind::witness_instance;
  if (name == "mean-shift") return SynthSignal::Kind::mean_shift;
  throw std::invalid_argument("unknown signal kind '" + name +
                              "' (witness or mean-shift)");
}

std::string signal_kind_name(SynthSignal::Kind kind) {
  return kind == SynthSignal::Kind::witness_instance ? "witness" : "mean-shift";
}

namespace {

Eigen::MatrixXd noise_matrix(Rng& rng, int d, int cols) {
  Eigen::MatrixXd m(d, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < d; ++r) m(r, c) = rng.gaussian();
  return m;
}

}  // namespace

SynthResult synth_dataset_detailed(const SynthSpec& spec) {
  if (spec.n_pos < 1 || spec.n_neg < 1)
    throw std::invalid_argument("synth: need at least one bag per class");
  if (spec.d < 1) throw std::invalid_argument("synth: dimension must be >= 1");
  if (spec.bag_min < 1 || spec.bag_max < spec.bag_min)
    throw std::invalid_argument("synth: bag size range must satisfy 1 <= lo <= hi");
  if (!(spec.signal.strength > 0))
    throw std::invalid_argument("synth: signal strength must be positive");

  Rng rng(spec.seed);

  Eigen::VectorXd direction(spec.d);
  for (int r = 0; r < spec.d; ++r) direction[r] = rng.gaussian();
  const double norm = direction.norm();
  direction = norm > 0 ? Eigen::VectorXd(direction / norm)
                       : Eigen::VectorXd::Unit(spec.d, 0);

  SynthResult result;
  result.signal_direction = direction;
  result.signal_strength = spec.signal.strength;
  result.dataset.d = spec.d;

  const auto bag_size = [&]() {
    const std::uint64_t span =
        static_cast<std::uint64_t>(spec.bag_max - spec.bag_min) + 1;
    return spec.bag_min + static_cast<int>(rng.below(span));
  };

  for (int i = 0; i < spec.n_pos; ++i) {
    Bag bag;
    bag.id = "pos_" + std::to_string(i);
    bag.label = 1;
    const int size = bag_size();
    if (spec.signal.kind == SynthSignal::Kind::witness_instance) {
      const int witness = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
      bag.instances = noise_matrix(rng, spec.d, size);
      bag.instances.col(witness) += spec.signal.strength * direction;
    } else {
      bag.instances = noise_matrix(rng, spec.d, size);
      bag.instances.colwise() += spec.signal.strength * direction;
    }
    result.dataset.bags.push_back(std::move(bag));
  }
  for (int i = 0; i < spec.n_neg; ++i) {
    Bag bag;
    bag.id = "neg_" + std::to_string(i);
    bag.label = -1;
    bag.instances = noise_matrix(rng, spec.d, bag_size());
    result.dataset.bags.push_back(std::move(bag));
  }

  validate_dataset(result.dataset);
  return result;
}

Dataset synth_dataset(const SynthSpec& spec) {
  return synth_dataset_detailed(spec).dataset;
}

}  // namespace convmpt
