// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mint/data/benchmark.hpp"
#include "mint/eval/discriminative.hpp"
#include "mint/pipeline/experiment.hpp"

namespace mint::cli {

/// Unknown key, malformed value or unreadable config file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenerateOptions {
  std::size_t count = 100;
  std::size_t length = data::kWindowLength;
  bool positive_only = false;  // keep only windows labeled positive
};

/// Everything one invocation needs. Files are INI-style:
///
///   [data]
///   dataset = env12.jsonl
///   [vae]
///   epochs = 700
///
/// Keys are `section.name`; `mint config-keys` lists them with defaults.
struct RunConfig {
  // [data]
  std::string dataset;
  std::string env3_dataset;         // heldout-env3; empty splits `dataset` by env
  std::string standardizer;         // reuse instead of fitting
  std::string synthetic;            // generated windows (train-detector, discriminative-score)
  std::string vae_checkpoint;
  std::string detector_checkpoint;

  // [run]
  std::uint64_t seed = 1;
  double scale = 1.0;  // multiplies VAE epochs, E_warm and detector epochs
  std::string out = "mint-out";

  // [vae], [detector], [experiment]
  rvae::RvaeHyper vae;
  detect::DetectorConfig detector;
  bool reference_hidden = false;
  std::vector<pipeline::Variant> variants{pipeline::Variant::kMultimodal};
  std::size_t train_stride = data::kDefaultStride;
  std::size_t eval_stride = data::kDefaultStride;
  double target_positive_fraction = 0.5;
  std::size_t folds = 5;
  std::size_t early_stopping_folds = 5;
  eval::DecisionRule rule;

  GenerateOptions generate;
  eval::DiscriminativeOptions discriminative;
  data::BenchmarkConfig benchmark;
};

struct ConfigKey {
  std::string name;  // section.key
  std::string help;
};

const std::vector<ConfigKey>& config_keys();

/// Throws ConfigError for an unknown key or an unparsable value.
void set_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_value(const RunConfig& config, const std::string& key);

/// Applies every key of an INI stream on top of `config`.
void apply_ini(RunConfig& config, std::istream& in, const std::string& source = "<config>");
void apply_ini_file(RunConfig& config, const std::string& path);

/// Every key with its resolved value, in INI form; re-reading it reproduces
/// the configuration.
void write_ini(std::ostream& out, const RunConfig& config);

/// Range and consistency checks; throws ConfigError.
void validate(const RunConfig& config);

/// VAE and detector settings with the epoch scale applied.
rvae::RvaeHyper scaled_vae(const RunConfig& config);
detect::DetectorConfig scaled_detector(const RunConfig& config);
pipeline::ExperimentConfig experiment_config(const RunConfig& config);

}  // namespace mint::cli
