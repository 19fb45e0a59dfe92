#ifndef CONVMPT_ERROR_HPP
#define CONVMPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace convmpt {

/// Malformed or inconsistent input data (files, labels, shapes on ingestion).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during optimization (non-finite values, divergence).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace convmpt

#endif  // CONVMPT_ERROR_HPP
