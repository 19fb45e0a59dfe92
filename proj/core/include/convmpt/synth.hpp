#ifndef CONVMPT_SYNTH_HPP
#define CONVMPT_SYNTH_HPP

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "convmpt/data.hpp"

namespace convmpt {

/// How the positive class differs from background noise.
///   witness_instance: exactly one instance per positive bag carries the
///     signal; all other instances (and all negative bags) are N(0, I)
///     noise. Mean pooling dilutes this signal away, max pooling keeps it.
///   mean_shift: every instance of a positive bag is shifted along the
///     signal direction, so even pooled averages separate.
struct SynthSignal {
  enum class Kind { witness_instance, mean_shift };
  Kind kind = Kind::witness_instance;
  double strength;

  static SynthSignal witness_instance(double strength = 6.0) {
    return {Kind::witness_instance, strength};
  }
  static SynthSignal mean_shift(double strength = 2.0) {
    return {Kind::mean_shift, strength};
  }
};

SynthSignal::Kind parse_signal_kind(const std::string& name);
std::string signal_kind_name(SynthSignal::Kind kind);

struct SynthSpec {
  int n_pos = 1;
  int n_neg = 1;
  int d = 2;
  int bag_min = 1;
  int bag_max = 1;
  SynthSignal signal = SynthSignal::witness_instance();
  std::uint64_t seed = 0;
};

struct SynthResult {
  Dataset dataset;
  Eigen::VectorXd signal_direction;  // unit vector the signal was planted on
  double signal_strength = 0.0;
};

/// Deterministic for a fixed spec; throws std::invalid_argument on bad
/// counts or bag size ranges.
SynthResult synth_dataset_detailed(const SynthSpec& spec);

Dataset synth_dataset(const SynthSpec& spec);

}  // namespace convmpt

#endif  // CONVMPT_SYNTH_HPP
