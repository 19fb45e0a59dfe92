#ifndef CONVMPT_REPRESENTATION_HPP
#define CONVMPT_REPRESENTATION_HPP

#include <Eigen/Core>

#include "convmpt/activation.hpp"
#include "convmpt/data.hpp"

namespace convmpt {

/// The single convolutional layer: m filter columns of dimension d plus the
/// activation applied to every filter response.
struct FilterBank {
  Eigen::MatrixXd weights;  // d x m, column k is filter k
  Activation activation = Activation::tanh;

  Eigen::Index dim() const { return weights.rows(); }
  Eigen::Index filters() const { return weights.cols(); }
};

/// Max-pooled representation of one bag. g[k] is the activated response of
/// filter k at its witness instance; psi[k] is that instance's column index
/// (lowest index wins ties).
struct BagEncoding {
  Eigen::VectorXd g;
  Eigen::VectorXi psi;
};

struct DatasetEncoding {
  Eigen::MatrixXd g;    // n x m, row i = encoding of bag i
  Eigen::MatrixXi psi;  // n x m witness indices
};

/// g_k = max over instances of activation(w_k . x). Because the activation
/// is monotone, the argmax is taken on pre-activations; a property test
/// pins the equivalence of the two evaluation orders.
BagEncoding forward_bag(const FilterBank& filters, const Bag& bag);

/// Row i equals forward_bag(filters, dataset.bags[i]). Bags are encoded
/// independently (possibly in parallel); the result does not depend on the
/// thread count.
DatasetEncoding encode_dataset(const FilterBank& filters, const Dataset& dataset);

/// Classifier score u . g.
double score(const Eigen::VectorXd& u, const BagEncoding& encoding);

/// Elementwise mean of the bag's instance vectors (linear baseline
/// representation; replaces the filter bank in mean-pool mode).
Eigen::VectorXd mean_pool(const Bag& bag);

/// n x d matrix of mean-pooled bags, row per bag.
Eigen::MatrixXd mean_pool_dataset(const Dataset& dataset);

}  // namespace convmpt

#endif  // CONVMPT_REPRESENTATION_HPP
