// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace aaq {

inline constexpr const char* kFixtureIndex = "fixtures.json";

struct FixtureResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Writes golden tensors, encoded blocks and expected counts plus the
/// fixtures.json index into `dir`.
void generate_fixtures(const std::filesystem::path& dir);

/// Replays every fixture listed in `dir`/fixtures.json. A missing or
/// unreadable index yields a single failed result named after the index.
std::vector<FixtureResult> verify_fixtures(const std::filesystem::path& dir);

}  // namespace aaq
