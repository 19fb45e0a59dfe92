#include "convmpt/folds.hpp"

#include <stdexcept>
#include <string>

#include "convmpt/error.hpp"
#include "convmpt/rng.hpp"

namespace convmpt {

std::vector<FoldSplit> split_folds(const Dataset& dataset, int k,
                                   std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("split_folds: k must be >= 2");
  validate_dataset(dataset);

  std::vector<int> pos, neg;
  for (int i = 0; i < dataset.n(); ++i)
    (dataset.bags[i].label > 0 ? pos : neg).push_back(i);

  if (static_cast<int>(pos.size()) < k)
    throw DataError("split_folds: only " + std::to_string(pos.size()) +
                    " positive bags for " + std::to_string(k) + " folds");
  if (static_cast<int>(neg.size()) < k)
    throw DataError("split_folds: only " + std::to_string(neg.size()) +
                    " negative bags for " + std::to_string(k) + " folds");

  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);

  std::vector<std::vector<int>> test_sets(k);
  for (std::size_t i = 0; i < pos.size(); ++i)
    test_sets[i % k].push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i)
    test_sets[i % k].push_back(neg[i]);

  std::vector<FoldSplit> folds(k);
  for (int f = 0; f < k; ++f) {
    std::vector<bool> in_test(dataset.n(), false);
    for (int idx : test_sets[f]) in_test[idx] = true;
    for (int i = 0; i < dataset.n(); ++i)
      (in_test[i] ? folds[f].test_indices : folds[f].train_indices).push_back(i);
  }
  return folds;
}

}  // namespace convmpt
