// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aaq {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitIo = 2, kExitUsage = 3 };

inline constexpr std::uint64_t kDefaultSeed = 42;

/// "1:64" (inclusive range), "256,512,1024" or a single value.
/// Throws ConfigError on malformed input or zero entries.
std::vector<std::size_t> parse_size_list(std::string_view spec);

/// Entry point of the `aaq` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aaq
