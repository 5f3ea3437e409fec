// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aaq/graph/trace.hpp"
#include "aaq/sim/config.hpp"
#include "json.hpp"

namespace aaq {

struct StageLatency {
    std::size_t node = 0;
    std::string name;
    std::uint64_t mem_cycles = 0;
    std::uint64_t rmpu_cycles = 0;
    std::uint64_t vvpu_cycles = 0;
};

/// Nodes sharing a fusion group run as one pipeline over their tiles.
struct GroupLatency {
    std::size_t first_node = 0;
    std::size_t last_node = 0;
    std::uint64_t mem_cycles = 0;
    std::uint64_t rmpu_cycles = 0;
    std::uint64_t vvpu_cycles = 0;
    std::uint64_t fill_cycles = 0;
    std::uint64_t latency = 0;
};

struct SimReport {
    std::size_t ns = 0;
    std::size_t num_blocks = 1;
    std::uint64_t block_cycles = 0;
    std::uint64_t total_cycles = 0;  ///< block_cycles * num_blocks
    std::vector<StageLatency> nodes;
    std::vector<GroupLatency> groups;
    double rmpu_utilization = 0.0;  ///< percent
    double vvpu_utilization = 0.0;  ///< percent
    double achieved_bandwidth_GBps = 0.0;
    std::uint64_t traffic_bytes = 0;  ///< per block
    std::uint64_t rmpu_units = 0;     ///< per block
    std::uint64_t onchip_bytes = 0;
    std::uint64_t main_memory_peak_bytes = 0;
};

/// Latency of one trace (one block) under `cfg`, scaled by num_blocks.
/// Throws ConfigError naming the node whose tile overflows a scratchpad.
SimReport simulate_trace(const Trace& trace, const SimConfig& cfg, std::size_t num_blocks = 1);

nlohmann::json report_to_json(const SimReport& r);

/// Header plus one row per node.
std::string report_to_csv(const SimReport& r);

}  // namespace aaq
