// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "aaq/cli/commands.hpp"

int main(int argc, char** argv) { return aaq::run_cli(argc, argv, std::cout, std::cerr); }
