#ifndef CONVMPT_ACTIVATION_HPP
#define CONVMPT_ACTIVATION_HPP

#include <cmath>
#include <string>

namespace convmpt {

/// Elementwise activation applied to filter responses. All choices are
/// monotonically nondecreasing and differentiable, which lets the forward
/// pass take the argmax over pre-activations.
enum class Activation { tanh, sigmoid, identity };

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::tanh:
      return std::tanh(z);
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case Activation::identity:
      return z;
  }
  return z;
}

/// Derivative with respect to the pre-activation z.
inline double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::identity:
      return 1.0;
  }
  return 1.0;
}

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);

}  // namespace convmpt

#endif  // CONVMPT_ACTIVATION_HPP
