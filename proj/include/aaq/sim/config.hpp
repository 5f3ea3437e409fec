// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "aaq/graph/op_node.hpp"
#include "aaq/graph/trace.hpp"
#include "aaq/quant/scheme.hpp"

namespace aaq {

struct SimConfig {
    std::size_t num_rmpus = 32;
    std::size_t vvpus_per_rmpu = 4;
    double clock_ghz = 1.0;
    double mem_bandwidth_GBps = 2000.0;
    std::size_t mem_txn_bytes = 64;
    std::uint64_t mem_fixed_overhead_cycles = 100;  ///< per node transfer
    std::uint64_t token_scratchpad_bytes = 4u << 20;
    std::uint64_t weight_scratchpad_bytes = 1u << 20;
    std::uint64_t output_scratchpad_bytes = 4u << 20;
    std::size_t simd_lanes_per_vvpu = 32;
    std::uint64_t crossbar_hop_cycles = 1;
    bool group_a_two_pass = false;  ///< serialize 8-bit tokens over two passes

    // Engine geometry.
    std::size_t clusters_per_engine = 4;
    std::size_t lanes_per_cluster = 20;
    std::size_t units_per_lane = 128;

    /// Throws ConfigError naming the offending key.
    void validate() const;
    std::size_t total_vvpus() const noexcept { return num_rmpus * vvpus_per_rmpu; }
};

/// Everything a run is parameterized by, loadable from a flat key=value file
/// with `sim.`, `workload.` and `quant.` prefixes.
struct RunConfig {
    SimConfig sim;
    WorkloadConfig workload;
    SchemeTable schemes;
    TraceLayout layout;

    void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError with
/// the line number on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies recognized keys onto `cfg`. Throws ConfigError on unknown keys or
/// unparsable values.
void apply_key_values(const std::map<std::string, std::string>& kv, RunConfig& cfg);

RunConfig load_run_config(const std::string& path);

/// Canonical key=value rendering of every setting, sorted by key.
std::string to_key_values(const RunConfig& cfg);

}  // namespace aaq
