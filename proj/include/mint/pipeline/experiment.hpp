// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mint/detect/detector.hpp"
#include "mint/eval/report.hpp"
#include "mint/data/standardizer.hpp"
#include "mint/rvae/model.hpp"

namespace mint::pipeline {

/// The four detector variants of the ablation table.
enum class Variant { kPoseOnly, kEmotionOnly, kMultimodal, kMultimodalVae };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& name);
const std::array<Variant, 4>& all_variants();
data::InputMode input_mode(Variant v);

struct ExperimentConfig {
  rvae::RvaeHyper vae;
  detect::DetectorConfig detector;   // input_mode is set per variant
  bool reference_hidden = false;     // take H from reference_hidden_size()
  std::size_t train_stride = data::kDefaultStride;
  std::size_t eval_stride = data::kDefaultStride;
  double target_positive_fraction = 0.5;
  std::size_t folds = 5;
  /// Training sequences are split k ways once more and one part serves for
  /// detector early stopping; 0 trains on everything for the full epochs.
  std::size_t early_stopping_folds = 5;
  std::uint64_t seed = 1;
  eval::DecisionRule rule;
  /// Raw-space synthetic windows. When non-empty the augmented variant draws
  /// its positive windows from here instead of training a VAE.
  std::vector<data::WindowSample> synthetic_pool;
  std::function<void(const std::string&)> log;
};

struct RunOutcome {
  eval::Evaluation evaluation;
  std::vector<data::SequenceRecord> test_records;  // standardized, as scored
  std::vector<std::vector<double>> record_probs;
  std::size_t train_windows = 0;
  std::size_t synthetic_windows = 0;
  data::Standardizer standardizer;
  std::vector<rvae::EpochLog> vae_history;
  std::vector<detect::DetectorEpoch> detector_history;
  std::shared_ptr<const detect::Detector> detector;
};

/// Fits the standardizer on `train`, windows the training sequences,
/// optionally rebalances them with windows from a VAE trained on the same
/// windows, trains a detector and scores it on `test`. Test records shorter
/// than one window are skipped.
RunOutcome train_and_evaluate(const std::vector<data::SequenceRecord>& train,
                              const std::vector<data::SequenceRecord>& test, Variant variant,
                              const ExperimentConfig& config, std::uint64_t seed);

struct VariantReport {
  std::string name;
  eval::EvalReport report;
  std::vector<RunOutcome> runs;
};

/// Sequence-level stratified k-fold; fold i uses seed + i. A fold whose
/// held-out data lack one class raises an error naming the fold.
VariantReport cross_validate(const std::vector<data::SequenceRecord>& records, Variant variant,
                             const ExperimentConfig& config);

/// Trains on each of two stratified halves of the Env 1+2 records and tests
/// every time on the Env 3 records.
VariantReport heldout_env3(const std::vector<data::SequenceRecord>& env12,
                           const std::vector<data::SequenceRecord>& env3, Variant variant,
                           const ExperimentConfig& config);

/// Writes report.txt, roc_frame.csv, roc_seq.csv, pr_sweep.csv and
/// onset_traj.csv into `dir`; curves pool all runs.
void write_outputs(const std::string& dir, const std::vector<VariantReport>& reports,
                   const std::string& title);

}  // namespace mint::pipeline
