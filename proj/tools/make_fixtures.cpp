// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Regenerates the golden fixture directory. Usage: make_fixtures <dir>

#include <exception>
#include <iostream>

#include "aaq/cli/fixtures.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <dir>\n";
        return 3;
    }
    try {
        aaq::generate_fixtures(argv[1]);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cout << "fixtures written to " << argv[1] << "\n";
    return 0;
}
