// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/cli/manifest.hpp"

#include <cstdio>

#include "aaq/core/tensor_io.hpp"

namespace aaq {

nlohmann::json RunManifest::to_json() const {
    nlohmann::json outs = nlohmann::json::array();
    for (const ManifestOutput& o : outputs) outs.push_back({{"path", o.path}, {"fnv1a64", o.fnv1a64}});
    return {{"command", command},
            {"args", args},
            {"config", config_snapshot},
            {"seed", seed},
            {"tool_version", tool_version},
            {"outputs", outs},
            {"wall_clock_seconds", wall_clock_seconds}};
}

std::string fnv1a64_hex(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_output(RunManifest& m, const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    write_file_atomic(path, bytes);
    m.outputs.push_back({path.string(), fnv1a64_hex(bytes)});
}

void write_output(RunManifest& m, const std::filesystem::path& path, const std::string& text) {
    write_output(m, path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    const auto path = dir / (m.command + ".manifest.json");
    write_text_atomic(path, m.to_json().dump(2) + "\n");
    return path;
}

}  // namespace aaq
