// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The omnivq Authors

#include <iostream>
#include <string>
#include <vector>

#include "omnivq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return omnivq::run_cli(args, std::cout, std::cerr);
}
