// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace aaq {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct ManifestOutput {
    std::string path;
    std::string fnv1a64;  ///< digest of the written bytes
};

/// Record of one CLI invocation, written next to its outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> args;
    std::string config_snapshot;  ///< canonical key=value settings
    std::uint64_t seed = 0;
    std::string tool_version{kToolVersion};
    std::vector<ManifestOutput> outputs;
    double wall_clock_seconds = 0.0;

    nlohmann::json to_json() const;
};

std::string fnv1a64_hex(std::span<const std::uint8_t> bytes);

/// Writes `text` atomically and records it in `m`.
void write_output(RunManifest& m, const std::filesystem::path& path, const std::string& text);
void write_output(RunManifest& m, const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// <dir>/<command>.manifest.json, written atomically.
std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& dir);

}  // namespace aaq
