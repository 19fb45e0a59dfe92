#ifndef CONVMPT_DATA_HPP
#define CONVMPT_DATA_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace convmpt {

/// One multi-instance data point: a variable number of d-dimensional
/// instance vectors (the columns of `instances`) sharing a single label.
struct Bag {
  std::string id;
  int label = 0;               // +1 or -1
  Eigen::MatrixXd instances;   // d x m_i, m_i >= 1

  Eigen::Index dim() const { return instances.rows(); }
  Eigen::Index size() const { return instances.cols(); }
};

/// An ordered collection of bags with a shared feature dimension.
struct Dataset {
  std::vector<Bag> bags;
  Eigen::Index d = 0;
  /// Set by the loaders when {0,1} labels were remapped to {-1,+1}.
  bool labels_remapped = false;

  Eigen::Index n() const { return static_cast<Eigen::Index>(bags.size()); }

  /// Label vector y, entries +-1, in bag order.
  Eigen::VectorXd labels() const;

  /// Positive-class indicator (1 for label +1, 0 otherwise).
  Eigen::VectorXd positive_indicator() const;

  Eigen::Index positives() const;
  Eigen::Index negatives() const;
};

/// Throws DataError if any Bag or Dataset invariant is violated
/// (empty bags, non-finite features, inconsistent dimension, bad labels).
void validate_dataset(const Dataset& dataset);

/// Additionally requires at least one bag per class (training precondition).
void validate_training_dataset(const Dataset& dataset);

/// One fold of a k-fold split: disjoint train/test index sets.
struct FoldSplit {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

}  // namespace convmpt

#endif  // CONVMPT_DATA_HPP
