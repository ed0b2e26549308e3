// SPDX-License-Identifier: Apache-2.0
#include "mint/data/splits.hpp"

#include <algorithm>
#include <cmath>

#include "mint/numerics/rng.hpp"

namespace mint::data {
namespace {

// Deals shuffled positive-containing then negative sequences round-robin into
// k folds, continuing the rotation across strata so fold sizes differ by at
// most one and each stratum count differs by at most one.
std::vector<std::vector<std::size_t>> deal_folds(const std::vector<SequenceRecord>& records,
                                                 std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (records[i].has_positive() ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw ValidationError("stratified split needs sequences with and without positive frames (got " +
                          std::to_string(pos.size()) + " positive-containing, " +
                          std::to_string(neg.size()) + " negative)");
  }
  nn::Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t slot = 0;
  for (auto i : pos) folds[slot++ % k].push_back(i);
  for (auto i : neg) folds[slot++ % k].push_back(i);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace

std::vector<FoldSplit> stratified_kfold(const std::vector<SequenceRecord>& records, std::size_t k,
                                        std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
  if (k > records.size()) {
    throw std::invalid_argument("stratified_kfold: k = " + std::to_string(k) + " exceeds " +
                                std::to_string(records.size()) + " sequences");
  }
  const auto folds = deal_folds(records, k, seed);
  std::vector<FoldSplit> out(k);
  for (std::size_t f = 0; f < k; ++f) {
    out[f].validation = folds[f];
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) out[f].train.insert(out[f].train.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(out[f].train.begin(), out[f].train.end());
  }
  return out;
}

std::array<std::vector<std::size_t>, 2> two_split_heldout(const std::vector<SequenceRecord>& records,
                                                          std::uint64_t seed) {
  for (const auto& r : records) {
    if (r.env == Environment::kEnv3) {
      throw std::invalid_argument("two_split_heldout: record '" + r.id +
                                  "' is from Env 3, which must stay unseen");
    }
  }
  if (records.size() < 2) throw std::invalid_argument("two_split_heldout: need >= 2 sequences");
  auto folds = deal_folds(records, 2, seed);
  return {std::move(folds[0]), std::move(folds[1])};
}

std::size_t synthetic_windows_needed(std::size_t positives, std::size_t total,
                                     double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
    throw std::invalid_argument("rebalance: target fraction must lie in (0, 1)");
  }
  const double p = static_cast<double>(positives), n = static_cast<double>(total);
  if (n > 0 && p / n >= target_fraction) return 0;
  // (p + a) / (n + a) >= f  <=>  a >= (f n - p) / (1 - f)
  auto a = static_cast<std::size_t>(std::ceil((target_fraction * n - p) / (1.0 - target_fraction) - 1e-9));
  while ((p + static_cast<double>(a)) / (n + static_cast<double>(a)) < target_fraction) ++a;
  return a;
}

std::vector<WindowSample> rebalance(std::vector<WindowSample> windows,
                                    const WindowGenerator& generator, double target_fraction) {
  const std::size_t needed =
      synthetic_windows_needed(count_positive_windows(windows), windows.size(), target_fraction);
  windows.reserve(windows.size() + needed);
  for (std::size_t i = 0; i < needed; ++i) {
    WindowSample w = generator();
    for (std::size_t f = 0; f < w.frames.size(); ++f) {
      if (auto err = check_frame(w.frames[f])) {
        throw ValidationError("rebalance: generated window " + std::to_string(i) + " frame " +
                              std::to_string(f) + ": " + *err);
      }
    }
    if (w.window_label != 1) {
      throw ValidationError("rebalance: generator returned a negative window");
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace mint::data
