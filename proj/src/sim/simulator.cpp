// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/sim/simulator.hpp"

#include <algorithm>
#include <sstream>

#include "aaq/core/error.hpp"
#include "aaq/sim/memory.hpp"
#include "aaq/sim/rmpu.hpp"
#include "aaq/sim/vvpu.hpp"

namespace aaq {
namespace {

void check_scratchpads(const TraceEntry& e, const SimConfig& cfg) {
    auto fail = [&](const char* pad, std::uint64_t need, std::uint64_t have) {
        throw ConfigError("scratchpad overflow at node " + e.name + ": " + pad + " tile needs " +
                          std::to_string(need) + " bytes, capacity " + std::to_string(have));
    };
    // Token and output tiles are double buffered.
    if (2 * e.tile_in_bytes() > cfg.token_scratchpad_bytes) {
        fail("token", 2 * e.tile_in_bytes(), cfg.token_scratchpad_bytes);
    }
    if (2 * e.tile_out_bytes() > cfg.output_scratchpad_bytes) {
        fail("output", 2 * e.tile_out_bytes(), cfg.output_scratchpad_bytes);
    }
    if (e.weight_bytes > cfg.weight_scratchpad_bytes) fail("weight", e.weight_bytes, cfg.weight_scratchpad_bytes);
}

}  // namespace

SimReport simulate_trace(const Trace& trace, const SimConfig& cfg, std::size_t num_blocks) {
    cfg.validate();
    SimReport r;
    r.ns = trace.ns;
    r.num_blocks = num_blocks;
    r.onchip_bytes = cfg.token_scratchpad_bytes + cfg.weight_scratchpad_bytes + cfg.output_scratchpad_bytes;
    r.main_memory_peak_bytes = trace.peak_live_bytes;

    std::uint64_t vvpu_busy = 0;
    const auto& entries = trace.entries;
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].fusion_group == entries[i].fusion_group) ++j;

        GroupLatency g;
        g.first_node = entries[i].node;
        g.last_node = entries[j - 1].node;
        std::uint64_t group_bytes = 0;
        std::uint64_t hops = 0;
        std::size_t tiles = 1;
        for (std::size_t k = i; k < j; ++k) {
            const TraceEntry& e = entries[k];
            check_scratchpads(e, cfg);
            const RmpuCost rc = rmpu_cycles(e.dots, cfg);
            const VvpuCost vc = vvpu_node_cycles(e.vectors, cfg);
            StageLatency s{e.node, e.name, mem_cycles(e.traffic_bytes(), cfg), rc.cycles, vc.cycles};
            r.nodes.push_back(s);
            r.rmpu_units += rc.units;
            vvpu_busy += vc.busy_cycles;
            g.rmpu_cycles += rc.cycles;
            g.vvpu_cycles += vc.cycles;
            group_bytes += e.traffic_bytes();
            if (rc.cycles + vc.cycles > 0) hops += cfg.crossbar_hop_cycles;
            tiles = std::max(tiles, e.tiles);
        }
        g.mem_cycles = mem_cycles(group_bytes, cfg);
        r.traffic_bytes += group_bytes;

        const std::uint64_t longest = std::max({g.mem_cycles, g.rmpu_cycles, g.vvpu_cycles});
        const std::uint64_t rest = g.mem_cycles + g.rmpu_cycles + g.vvpu_cycles - longest;
        g.fill_cycles = (rest + tiles - 1) / tiles;
        g.latency = longest + g.fill_cycles + hops;
        r.block_cycles += g.latency;
        r.groups.push_back(g);
        i = j;
    }
    r.total_cycles = r.block_cycles * num_blocks;

    if (r.block_cycles > 0) {
        const double cycles = static_cast<double>(r.block_cycles);
        const double unit_capacity = cycles * static_cast<double>(cfg.num_rmpus * cfg.clusters_per_engine *
                                                                  cfg.lanes_per_cluster * cfg.units_per_lane);
        r.rmpu_utilization = std::min(100.0, 100.0 * static_cast<double>(r.rmpu_units) / unit_capacity);
        r.vvpu_utilization =
            std::min(100.0, 100.0 * static_cast<double>(vvpu_busy) / (cycles * static_cast<double>(cfg.total_vvpus())));
        r.achieved_bandwidth_GBps = static_cast<double>(r.traffic_bytes) * cfg.clock_ghz * 1e9 / (cycles * 1073741824.0);
    }
    return r;
}

nlohmann::json report_to_json(const SimReport& r) {
    using nlohmann::json;
    json nodes = json::array();
    for (const StageLatency& s : r.nodes) {
        nodes.push_back({{"node", s.node},
                         {"name", s.name},
                         {"mem_cycles", s.mem_cycles},
                         {"rmpu_cycles", s.rmpu_cycles},
                         {"vvpu_cycles", s.vvpu_cycles}});
    }
    json groups = json::array();
    for (const GroupLatency& g : r.groups) {
        groups.push_back({{"first_node", g.first_node},
                          {"last_node", g.last_node},
                          {"mem_cycles", g.mem_cycles},
                          {"rmpu_cycles", g.rmpu_cycles},
                          {"vvpu_cycles", g.vvpu_cycles},
                          {"fill_cycles", g.fill_cycles},
                          {"latency", g.latency}});
    }
    return {{"ns", r.ns},
            {"num_blocks", r.num_blocks},
            {"block_cycles", r.block_cycles},
            {"total_cycles", r.total_cycles},
            {"rmpu_utilization", r.rmpu_utilization},
            {"vvpu_utilization", r.vvpu_utilization},
            {"achieved_bandwidth_GBps", r.achieved_bandwidth_GBps},
            {"traffic_bytes", r.traffic_bytes},
            {"rmpu_units", r.rmpu_units},
            {"onchip_bytes", r.onchip_bytes},
            {"main_memory_peak_bytes", r.main_memory_peak_bytes},
            {"nodes", nodes},
            {"groups", groups}};
}

std::string report_to_csv(const SimReport& r) {
    std::ostringstream out;
    out << "node,name,mem_cycles,rmpu_cycles,vvpu_cycles\n";
    for (const StageLatency& s : r.nodes) {
        out << s.node << ',' << s.name << ',' << s.mem_cycles << ',' << s.rmpu_cycles << ',' << s.vvpu_cycles << '\n';
    }
    return out.str();
}

}  // namespace aaq
