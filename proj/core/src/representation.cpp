#include "convmpt/representation.hpp"

#include <stdexcept>
#include <string>

#include "convmpt/parallel.hpp"

namespace convmpt {

BagEncoding forward_bag(const FilterBank& filters, const Bag& bag) {
  if (bag.dim() != filters.dim())
    throw std::invalid_argument(
        "forward_bag: bag dimension " + std::to_string(bag.dim()) +
        " does not match filter dimension " + std::to_string(filters.dim()));
  if (bag.size() < 1)
    throw std::invalid_argument("forward_bag: bag has no instances");

  const Eigen::Index m = filters.filters();
  BagEncoding enc;
  enc.g.resize(m);
  enc.psi.resize(m);

  // responses(k, j) = w_k . x_j
  const Eigen::MatrixXd responses = filters.weights.transpose() * bag.instances;
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::Index best = 0;
    double best_value = responses(k, 0);
    for (Eigen::Index j = 1; j < bag.size(); ++j) {
      if (responses(k, j) > best_value) {  // strict: lowest index wins ties
        best_value = responses(k, j);
        best = j;
      }
    }
    enc.psi[k] = static_cast<int>(best);
    enc.g[k] = activate(filters.activation, best_value);
  }
  return enc;
}

DatasetEncoding encode_dataset(const FilterBank& filters, const Dataset& dataset) {
  const Eigen::Index n = dataset.n();
  const Eigen::Index m = filters.filters();
  DatasetEncoding enc;
  enc.g.resize(n, m);
  enc.psi.resize(n, m);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const BagEncoding one = forward_bag(filters, dataset.bags[i]);
    enc.g.row(static_cast<Eigen::Index>(i)) = one.g.transpose();
    enc.psi.row(static_cast<Eigen::Index>(i)) = one.psi.transpose();
  });
  return enc;
}

double score(const Eigen::VectorXd& u, const BagEncoding& encoding) {
  if (u.size() != encoding.g.size())
    throw std::invalid_argument("score: classifier length " +
                                std::to_string(u.size()) +
                                " does not match encoding length " +
                                std::to_string(encoding.g.size()));
  return u.dot(encoding.g);
}

Eigen::VectorXd mean_pool(const Bag& bag) {
  if (bag.size() < 1)
    throw std::invalid_argument("mean_pool: bag has no instances");
  return bag.instances.rowwise().mean();
}

Eigen::MatrixXd mean_pool_dataset(const Dataset& dataset) {
  Eigen::MatrixXd pooled(dataset.n(), dataset.d);
  for (Eigen::Index i = 0; i < dataset.n(); ++i)
    pooled.row(i) = mean_pool(dataset.bags[i]).transpose();
  return pooled;
}

}  // namespace convmpt
