// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "mint/cli/commands.hpp"

int main(int argc, char** argv) {
  return mint::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
