// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mint/cli/run_config.hpp"

namespace mint::cli {

/// Missing required input or unusable path; exits with code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Each stage reads its inputs from the config and writes into config.out.
void cmd_preprocess(const RunConfig& config, std::ostream& log);
void cmd_train_vae(const RunConfig& config, std::ostream& log);
void cmd_generate(const RunConfig& config, std::ostream& log);
void cmd_train_detector(const RunConfig& config, std::ostream& log);
void cmd_evaluate(const RunConfig& config, std::ostream& log);
void cmd_crossval(const RunConfig& config, std::ostream& log);
void cmd_heldout_env3(const RunConfig& config, std::ostream& log);
void cmd_discriminative_score(const RunConfig& config, std::ostream& log);
void cmd_make_benchmark(const RunConfig& config, std::ostream& log);

/// Parses arguments, dispatches and maps failures to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mint::cli
