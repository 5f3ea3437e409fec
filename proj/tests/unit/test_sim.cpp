// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <functional>

#include "aaq/core/error.hpp"
#include "aaq/core/rng.hpp"
#include "aaq/graph/folding_block.hpp"
#include "aaq/quant/quantizer.hpp"
#include "aaq/sim/config.hpp"
#include "aaq/sim/memory.hpp"
#include "aaq/sim/rmpu.hpp"
#include "aaq/sim/simulator.hpp"
#include "aaq/sim/sweep.hpp"
#include "aaq/sim/vvpu.hpp"
#include "doctest.h"

using namespace aaq;

namespace {

SimConfig one_engine() {
    SimConfig c;
    c.num_rmpus = 1;
    return c;
}

DotWork token_dots(std::uint64_t n, int bits, int k) {
    DotWork d;
    d.dots = n;
    d.length = 128;
    d.lhs_bits = bits;
    d.lhs_outliers = k;
    d.rhs_bits = 16;
    return d;
}

// Minimum engine cycles for `count` copies of a job group, by exhaustive
// search over (cycle, cluster) placements with 20 lanes per cluster.
// Copies are interchangeable, so each copy opens at most one new cycle.
std::uint64_t exhaustive_cycles(const std::vector<std::size_t>& group_lanes, std::size_t count) {
    std::size_t per_group = 0;
    for (std::size_t l : group_lanes) per_group += l;
    for (std::size_t cycles = std::max<std::size_t>(1, (per_group * count + 79) / 80);; ++cycles) {
        std::vector<std::size_t> used(cycles * 4, 0);
        std::size_t opened = 0;
        std::function<bool(std::size_t, std::size_t, std::size_t)> place = [&](std::size_t g, std::size_t piece,
                                                                               std::size_t cycle) -> bool {
            if (g == count) return true;
            if (piece == group_lanes.size()) return place(g + 1, 0, cycles);
            const bool first = cycle == cycles;
            const std::size_t lo = first ? 0 : cycle;
            const std::size_t hi = first ? std::min(cycles, opened + 1) : cycle + 1;
            for (std::size_t c = lo; c < hi; ++c) {
                const std::size_t before = opened;
                if (first && c == opened) ++opened;
                bool tried_empty = false;
                for (std::size_t cl = 0; cl < 4; ++cl) {
                    std::size_t& u = used[c * 4 + cl];
                    if (u + group_lanes[piece] > 20) continue;
                    if (u == 0) {
                        if (tried_empty) continue;  // empty clusters are interchangeable
                        tried_empty = true;
                    }
                    u += group_lanes[piece];
                    const bool ok = place(g, piece + 1, c);
                    u -= group_lanes[piece];
                    if (ok) return true;
                }
                opened = before;
            }
            return false;
        };
        if (place(0, 0, cycles)) return cycles;
    }
}

}  // namespace

TEST_CASE("units and lanes") {
    CHECK(units_required(QuantScheme{4, 4}) == 4 * 124 + 16 * 4);
    CHECK(units_required(QuantScheme{4, 4}) == 560);
    CHECK(units_required(QuantScheme{4, 0}) == 512);
    CHECK(units_required_unquantized() == 2048);

    CHECK(lanes_required(560).lanes == 5);
    CHECK(lanes_required(560).mode == AccumulationMode::FivePlusScale);
    CHECK(lanes_required(512).lanes == 4);
    CHECK(lanes_required(512).mode == AccumulationMode::Four);
    CHECK(lanes_required(2048).lanes == 16);
    CHECK(lanes_required(2048).mode == AccumulationMode::Sixteen);
    CHECK(lanes_required(1024).mode == AccumulationMode::Eight);
    CHECK(lanes_required(3000).mode == AccumulationMode::Eighty);
    CHECK(lanes_required(32).mode == AccumulationMode::Two);
    CHECK_THROWS_AS(lanes_required(0), ContractError);
    CHECK_THROWS_AS(dot_units(6, 0, 16, 128), ContractError);
}

TEST_CASE("8-bit tokens split into two planes") {
    const auto jobs = decompose_dot(8, 4, 16, 128);
    REQUIRE(jobs.size() == 2);
    CHECK(jobs[0].lanes == 5);
    CHECK(jobs[1].lanes == 4);
    CHECK(jobs[0].units + jobs[1].units == 1056);
    CHECK(jobs[0].units == 560);
    CHECK(jobs[1].units == 496);
    CHECK(units_required(QuantScheme{8, 4}) == 1056);
}

TEST_CASE("engine throughput examples") {
    const SimConfig cfg = one_engine();
    const auto c = decompose_dot(4, 0, 16, 128);
    CHECK(groups_per_engine_cycle(c, cfg) == 20);
    const DotWork twenty = token_dots(20, 4, 0);
    const DotWork twenty_one = token_dots(21, 4, 0);
    CHECK(rmpu_cycles({&twenty, 1}, cfg).cycles == 1);
    CHECK(rmpu_cycles({&twenty_one, 1}, cfg).cycles == 2);
    const DotWork b16 = token_dots(16, 4, 4);
    const DotWork b17 = token_dots(17, 4, 4);
    CHECK(rmpu_cycles({&b16, 1}, cfg).cycles == 1);
    CHECK(rmpu_cycles({&b17, 1}, cfg).cycles == 2);
}

TEST_CASE("first-fit packing matches an exhaustive oracle on small cases") {
    const SimConfig cfg = one_engine();
    struct Case {
        int bits, k;
        std::size_t max_count;
    };
    for (const Case& cs : {Case{4, 0, 22}, Case{4, 4, 18}, Case{8, 4, 10}, Case{16, 0, 7}, Case{8, 0, 12}}) {
        const auto jobs = decompose_dot(cs.bits, cs.k, 16, 128);
        std::vector<std::size_t> lanes;
        for (const auto& j : jobs) lanes.push_back(j.lanes);
        for (std::size_t n = 1; n <= cs.max_count; ++n) {
            CAPTURE(cs.bits);
            CAPTURE(cs.k);
            CAPTURE(n);
            CHECK(pack_engine_cycles(jobs, n, cfg) == exhaustive_cycles(lanes, n));
        }
    }
    CHECK(exhaustive_cycles({5}, 16) == 1);
    CHECK(exhaustive_cycles({5}, 17) == 2);
}

TEST_CASE("packing respects cluster and engine capacity") {
    const SimConfig cfg = one_engine();
    for (int bits : {4, 8, 16}) {
        for (int k : {0, 4}) {
            if (bits == 16 && k > 0) continue;
            const auto jobs = decompose_dot(bits, k, 16, 128);
            std::size_t lanes = 0;
            for (const auto& j : jobs) lanes += j.lanes;
            CHECK(groups_per_engine_cycle(jobs, cfg) * lanes <= 80);
        }
    }
}

TEST_CASE("wide jobs span whole engines") {
    const SimConfig cfg = one_engine();
    DotWork d;
    d.dots = 3;
    d.length = 128 * 4;  // chunked into 128-element jobs
    d.lhs_bits = 16;
    d.rhs_bits = 16;
    CHECK(rmpu_cycles({&d, 1}, cfg).units == 3 * 4 * 2048);
    const auto big = lanes_required(4000);
    CHECK(big.mode == AccumulationMode::Eighty);
    CHECK(pack_engine_cycles({&big, 1}, 2, cfg) == 2);
}

TEST_CASE("two-pass mode serializes the 8-bit planes") {
    SimConfig cfg = one_engine();
    const DotWork a = token_dots(64, 8, 4);
    const auto single = rmpu_cycles({&a, 1}, cfg);
    cfg.group_a_two_pass = true;
    const auto two = rmpu_cycles({&a, 1}, cfg);
    CHECK(single.units == two.units);
    CHECK(single.engine_cycles == 8);  // 8 groups of 9 lanes per engine cycle
    CHECK(two.engine_cycles == 4 + 4);
}

TEST_CASE("vvpu costs") {
    CHECK(bitonic_stages(128) == 28);
    CHECK(vvpu_cycles(VectorOp::TopK, 128, 32) == 28 * 2 + 4);
    CHECK(vvpu_cycles(VectorOp::Residual, 128, 32) == 4);
    CHECK(vvpu_cycles(VectorOp::Softmax, 1, 32) == 2);
    CHECK(vvpu_reduce_cycles(128, 32) == 2 + 1 + 1 + 1 + 1 + 1 + 1);
    CHECK(vvpu_cycles(VectorOp::LayerNorm, 128, 32) == 33);
    CHECK(vvpu_cycles(VectorOp::Quantize, 128, 32) == 20);
    CHECK(vvpu_cycles(VectorOp::Gate, 128, 32) == 8);
    CHECK_THROWS_AS(vvpu_cycles(VectorOp::Residual, 0, 32), ContractError);

    SimConfig cfg;
    const VectorWork w{VectorOp::Residual, 128, 129};
    CHECK(vvpu_node_cycles({&w, 1}, cfg).cycles == 2 * 4);
    CHECK(vvpu_node_cycles({&w, 1}, cfg).busy_cycles == 129 * 4);
}

TEST_CASE("bitonic network agrees with reference top-k") {
    Rng rng(17);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> v(128);
        for (double& x : v) x = std::round(rng.normal() * 4.0) / 4.0;  // plenty of ties
        const std::size_t k = rng.below(9);
        const auto net = bitonic_topk(v, k);
        CHECK(net.indices == select_outliers(v, static_cast<int>(k)).indices);
        CHECK(net.compare_stages == 28);
    }
    CHECK_THROWS_AS(bitonic_topk(std::vector<double>(300), 1), ContractError);
}

TEST_CASE("memory cycles") {
    const SimConfig cfg;
    CHECK(mem_cycles(0, cfg) == 0);
    const double raw = 64.0 * 1e9 / (2000.0 * 1073741824.0);
    CHECK(mem_cycles(64, cfg) == static_cast<std::uint64_t>(std::ceil(raw)) + 100);
    CHECK(mem_cycles(64, cfg) == 101);
    CHECK(mem_cycles(65, cfg) == mem_cycles(128, cfg));
    CHECK(mem_cycles(1ull << 30, cfg) == 500000 + 100);
    CHECK(aligned_bytes(65, 64) == 128);
}

TEST_CASE("simulator trivial cases") {
    const SimConfig cfg;
    const auto empty = simulate_trace(Trace{}, cfg);
    CHECK(empty.block_cycles == 0);
    CHECK(empty.total_cycles == 0);

    Trace t;
    TraceEntry e;
    e.name = "io";
    e.kind = OpKind::MemoryIO;
    e.stage = Stage::MEM;
    e.bytes_read = 5000;
    e.bytes_written = 3000;
    t.entries.push_back(e);
    CHECK(simulate_trace(t, cfg).block_cycles == mem_cycles(8000, cfg));
}

TEST_CASE("scratchpad overflow names the node") {
    SimConfig cfg;
    cfg.token_scratchpad_bytes = 1024;
    const auto t = emit_trace(build_folding_block(64));
    try {
        simulate_trace(t, cfg);
        FAIL("expected overflow");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("tri_mul_out.ln_in") != std::string::npos);
    }
}

TEST_CASE("Ns=64 latencies match hand computation") {
    const SimConfig cfg;
    const auto t = emit_trace(build_folding_block(64));
    const auto r = simulate_trace(t, cfg);
    auto find = [&](const std::string& name) {
        const auto it = std::find_if(r.groups.begin(), r.groups.end(),
                                     [&](const GroupLatency& g) { return t.entries[g.first_node].name == name; });
        REQUIRE(it != r.groups.end());
        return *it;
    };
    auto hand_mem = [](std::uint64_t bytes) {
        const std::uint64_t aligned = (bytes + 63) / 64 * 64;
        return static_cast<std::uint64_t>(std::ceil(aligned * 1e9 / (2000.0 * 1073741824.0))) + 100;
    };
    const std::uint64_t a_bytes = 16 * 35392;  // 4096 scheme-A tokens
    const std::uint64_t b_bytes = 16 * 19520;
    const std::uint64_t c_bytes = 16 * 16960;

    // LayerNorm on A tokens: dequantize, normalize, quantize to B with top-4.
    {
        const auto g = find("tri_mul_out.ln_in");
        const std::uint64_t mem = hand_mem(a_bytes + b_bytes + t.entries[0].weight_bytes);
        const std::uint64_t vvpu = 32 * (4 + 33 + 20 + 60);
        CHECK(g.mem_cycles == mem);
        CHECK(g.vvpu_cycles == vvpu);
        CHECK(g.rmpu_cycles == 0);
        const std::uint64_t hi = std::max(mem, vvpu);
        CHECK(g.latency == hi + ((mem + vvpu - hi) + 63) / 64 + 1);
    }
    // Linear from B tokens: 5-lane jobs, 16 per engine cycle over 32 engines.
    {
        const auto g = find("tri_mul_out.a_gate");
        const std::uint64_t rmpu = (4096 * 128 / 16 + 31) / 32;
        const std::uint64_t vvpu = 32 * 20;
        const std::uint64_t mem = hand_mem(b_bytes + c_bytes + t.entries[2].weight_bytes);
        CHECK(g.rmpu_cycles == rmpu);
        CHECK(g.vvpu_cycles == vvpu);
        CHECK(g.mem_cycles == mem);
        const std::uint64_t hi = std::max({mem, rmpu, vvpu});
        CHECK(g.latency == hi + ((mem + rmpu + vvpu - hi) + 63) / 64 + 1);
    }
    // Sequence-track traffic only.
    {
        const auto g = find("seq_track");
        CHECK(g.latency == hand_mem(2 * 64 * 1024 * 2));
        CHECK(g.latency == 223);
    }
    CHECK(r.block_cycles == 91612);
    CHECK(r.traffic_bytes == t.total_traffic());
    CHECK(r.total_cycles == r.block_cycles);
}

TEST_CASE("simulation is deterministic and bounded") {
    const SimConfig cfg;
    const auto t = emit_trace(build_folding_block(48));
    const auto a = simulate_trace(t, cfg, 48);
    const auto b = simulate_trace(t, cfg, 48);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(report_to_csv(a) == report_to_csv(b));
    CHECK(a.total_cycles == 48 * a.block_cycles);
    CHECK(a.rmpu_utilization >= 0.0);
    CHECK(a.rmpu_utilization <= 100.0);
    CHECK(a.vvpu_utilization <= 100.0);

    std::uint64_t units = 0;
    for (const auto& e : t.entries) units += rmpu_cycles(e.dots, cfg).units;
    CHECK(units == a.rmpu_units);
}

TEST_CASE("more bandwidth or engines never slows the block") {
    const auto t = emit_trace(build_folding_block(32));
    SimConfig cfg;
    std::uint64_t prev = simulate_trace(t, cfg).block_cycles;
    for (double bw : {4000.0, 8000.0, 16000.0}) {
        cfg.mem_bandwidth_GBps = bw;
        const auto c = simulate_trace(t, cfg).block_cycles;
        CHECK(c <= prev);
        prev = c;
    }
    cfg = SimConfig{};
    prev = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t r = 1; r <= 64; r *= 2) {
        cfg.num_rmpus = r;
        const auto c = simulate_trace(t, cfg).block_cycles;
        CHECK(c <= prev);
        prev = c;
    }
}

TEST_CASE("sweep") {
    RunConfig base;
    SweepGrid grid{{16}, {1, 2, 4}, {1, 4}};
    const auto rows = sweep(grid, base, 3);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].num_rmpus == 1);
    CHECK(rows[1].vvpus_per_rmpu == 4);
    CHECK(sweep_to_csv(rows) == sweep_to_csv(sweep(grid, base, 1)));

    const auto single = sweep(SweepGrid{{16}, {}, {}}, base);
    REQUIRE(single.size() == 1);
    const auto direct = simulate_trace(emit_trace(build_folding_block(16)), base.sim, base.workload.num_blocks);
    CHECK(report_to_json(single[0].report).dump() == report_to_json(direct).dump());
    CHECK_THROWS_AS(sweep(SweepGrid{}, base), ContractError);
}

TEST_CASE("config key=value format") {
    const auto kv = parse_key_values("# comment\nsim.num_rmpus = 16\n\nworkload.streaming_mha=false\n");
    CHECK(kv.at("sim.num_rmpus") == "16");
    RunConfig cfg;
    apply_key_values(kv, cfg);
    CHECK(cfg.sim.num_rmpus == 16);
    CHECK_FALSE(cfg.workload.streaming_mha);

    RunConfig back;
    apply_key_values(parse_key_values(to_key_values(cfg)), back);
    CHECK(to_key_values(back) == to_key_values(cfg));

    CHECK_THROWS_AS(parse_key_values("sim.num_rmpus"), ConfigError);
    CHECK_THROWS_AS(parse_key_values("a=1\na=2"), ConfigError);
    CHECK_THROWS_AS(apply_key_values({{"sim.bogus", "1"}}, cfg), ConfigError);
    CHECK_THROWS_AS(apply_key_values({{"sim.num_rmpus", "x"}}, cfg), ConfigError);
    RunConfig zero;
    CHECK_THROWS_AS(apply_key_values({{"sim.num_rmpus", "0"}}, zero), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.cfg"), IoError);
}
