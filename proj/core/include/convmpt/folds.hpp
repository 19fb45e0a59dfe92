#ifndef CONVMPT_FOLDS_HPP
#define CONVMPT_FOLDS_HPP

#include <cstdint>
#include <vector>

#include "convmpt/data.hpp"

namespace convmpt {

/// Stratified k-fold split: both classes are shuffled (seeded) and dealt
/// round-robin, so every test fold holds at least one bag of each class and
/// the concatenated test sets form a permutation of 0..n-1. Throws DataError
/// when a class has fewer than k members.
std::vector<FoldSplit> split_folds(const Dataset& dataset, int k,
                                   std::uint64_t seed);

}  // namespace convmpt

#endif  // CONVMPT_FOLDS_HPP
