#include "convmpt/activation.hpp"

#include <stdexcept>

namespace convmpt {

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation '" + name +
                              "' (tanh, sigmoid or identity)");
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::identity:
      return "identity";
  }
  return "tanh";
}

}  // namespace convmpt
