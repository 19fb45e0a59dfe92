#include "convmpt/data.hpp"

#include <string>

#include "convmpt/error.hpp"

namespace convmpt {

Eigen::VectorXd Dataset::labels() const {
  Eigen::VectorXd y(n());
  for (Eigen::Index i = 0; i < n(); ++i) y[i] = bags[i].label;
  return y;
}

Eigen::VectorXd Dataset::positive_indicator() const {
  Eigen::VectorXd eps(n());
  for (Eigen::Index i = 0; i < n(); ++i) eps[i] = bags[i].label > 0 ? 1.0 : 0.0;
  return eps;
}

Eigen::Index Dataset::positives() const {
  Eigen::Index count = 0;
  for (const auto& bag : bags)
    if (bag.label > 0) ++count;
  return count;
}

Eigen::Index Dataset::negatives() const { return n() - positives(); }

void validate_dataset(const Dataset& dataset) {
  if (dataset.bags.empty()) throw DataError("dataset has no bags");
  for (std::size_t i = 0; i < dataset.bags.size(); ++i) {
    const Bag& bag = dataset.bags[i];
    const std::string where = "bag '" + bag.id + "' (index " + std::to_string(i) + ")";
    if (bag.size() < 1) throw DataError(where + " has no instances");
    if (bag.dim() != dataset.d)
      throw DataError(where + " has dimension " + std::to_string(bag.dim()) +
                      ", expected " + std::to_string(dataset.d));
    if (bag.label != 1 && bag.label != -1)
      throw DataError(where + " has label " + std::to_string(bag.label) +
                      ", expected +1 or -1");
    if (!bag.instances.allFinite())
      throw DataError(where + " contains non-finite feature values");
  }
}

void validate_training_dataset(const Dataset& dataset) {
  validate_dataset(dataset);
  if (dataset.n() < 2) throw DataError("training needs at least two bags");
  if (dataset.positives() == 0) throw DataError("training set has no positive bags");
  if (dataset.negatives() == 0) throw DataError("training set has no negative bags");
}

}  // namespace convmpt
