// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "mint/data/frame.hpp"
#include "mint/data/windows.hpp"

namespace mint::data {

/// Indices into the record list passed to the splitter.
struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Sequence-level stratified k-fold. The stratification key is whether a
/// sequence contains any positive frame; every frame of a sequence stays in
/// one split. Deterministic in `seed`.
std::vector<FoldSplit> stratified_kfold(const std::vector<SequenceRecord>& records, std::size_t k,
                                        std::uint64_t seed);

/// Two disjoint stratified halves of Env 1+2 records; Env 3 is rejected.
std::array<std::vector<std::size_t>, 2> two_split_heldout(const std::vector<SequenceRecord>& records,
                                                          std::uint64_t seed);

template <class T>
std::vector<T> select(const std::vector<T>& items, const std::vector<std::size_t>& indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(items.at(i));
  return out;
}

/// Produces one synthetic positive window per call; throws on failure.
using WindowGenerator = std::function<WindowSample()>;

/// Number of positive windows to append so that positives / total reaches
/// `target_fraction`.
std::size_t synthetic_windows_needed(std::size_t positives, std::size_t total,
                                     double target_fraction);

/// Appends generated positive windows until their fraction is >= target.
/// Originals are kept unchanged and in order; every appended window is
/// checked against the frame invariants and must be labeled positive.
std::vector<WindowSample> rebalance(std::vector<WindowSample> train_windows,
                                    const WindowGenerator& generator, double target_fraction);

}  // namespace mint::data
