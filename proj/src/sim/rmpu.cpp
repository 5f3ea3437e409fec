// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/sim/rmpu.hpp"

#include <algorithm>
#include <string>

#include "aaq/core/error.hpp"

namespace aaq {
namespace {

void check_bits(int bits, const char* what) {
    if (bits != 4 && bits != 8 && bits != 16) {
        throw ContractError(std::string(what) + " precision must be 4, 8 or 16 bits, got " + std::to_string(bits));
    }
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

bool is_wide(const LaneAllocation& j) { return j.mode == AccumulationMode::Eighty; }

}  // namespace

std::string_view to_string(AccumulationMode m) {
    switch (m) {
        case AccumulationMode::Two: return "Two";
        case AccumulationMode::Four: return "Four";
        case AccumulationMode::FivePlusScale: return "FivePlusScale";
        case AccumulationMode::Eight: return "Eight";
        case AccumulationMode::Sixteen: return "Sixteen";
        case AccumulationMode::Eighty: return "Eighty";
    }
    return "?";
}

std::uint64_t dot_units(int lhs_bits, int lhs_outliers, int rhs_bits, std::size_t length) {
    check_bits(lhs_bits, "token operand");
    check_bits(rhs_bits, "second operand");
    if (lhs_outliers < 0 || static_cast<std::size_t>(lhs_outliers) > length) {
        throw ContractError("outlier count " + std::to_string(lhs_outliers) + " exceeds dot length " +
                            std::to_string(length));
    }
    const std::uint64_t k = static_cast<std::uint64_t>(lhs_outliers);
    const std::uint64_t a = static_cast<std::uint64_t>(lhs_bits) / 4;
    const std::uint64_t b = static_cast<std::uint64_t>(rhs_bits) / 4;
    return a * b * (length - k) + 4 * b * k;
}

std::uint64_t units_required(const QuantScheme& s, int weight_bits, std::size_t hz) {
    s.validate(hz);
    return dot_units(s.inlier_bits, s.outlier_count, weight_bits, hz);
}

std::uint64_t units_required_unquantized(int weight_bits, std::size_t hz) { return dot_units(16, 0, weight_bits, hz); }

LaneAllocation lanes_required(std::uint64_t units, std::size_t units_per_lane) {
    if (units == 0) throw ContractError("lanes_required: a job needs at least one unit");
    if (units_per_lane == 0) throw ContractError("lanes_required: units_per_lane must be positive");
    LaneAllocation a;
    a.units = units;
    if (units * kSlotsPerLane <= units_per_lane) {
        a.lanes = 1;
        a.mode = AccumulationMode::Two;
        return a;
    }
    a.lanes = static_cast<std::size_t>(ceil_div(units, units_per_lane));
    if (a.lanes <= 4) {
        a.mode = AccumulationMode::Four;
    } else if (a.lanes == 5) {
        a.mode = AccumulationMode::FivePlusScale;
    } else if (a.lanes <= 8) {
        a.mode = AccumulationMode::Eight;
    } else if (a.lanes <= 16) {
        a.mode = AccumulationMode::Sixteen;
    } else {
        a.mode = AccumulationMode::Eighty;
    }
    return a;
}

std::vector<LaneAllocation> decompose_dot(int lhs_bits, int lhs_outliers, int rhs_bits, std::size_t length,
                                          std::size_t units_per_lane) {
    std::vector<LaneAllocation> jobs;
    if (lhs_bits == 8) {
        // Low 4-bit plane carries the outliers, high plane only the inliers.
        jobs.push_back(lanes_required(dot_units(4, lhs_outliers, rhs_bits, length), units_per_lane));
        const std::size_t inliers = length - static_cast<std::size_t>(lhs_outliers);
        if (inliers > 0) jobs.push_back(lanes_required(dot_units(4, 0, rhs_bits, inliers), units_per_lane));
    } else {
        jobs.push_back(lanes_required(dot_units(lhs_bits, lhs_outliers, rhs_bits, length), units_per_lane));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) jobs[i].job_id = i;
    return jobs;
}

std::uint64_t groups_per_engine_cycle(std::span<const LaneAllocation> group, const SimConfig& cfg) {
    if (group.empty()) throw ContractError("pack: empty job group");
    const std::size_t cluster_slots = cfg.lanes_per_cluster * kSlotsPerLane;
    std::vector<std::size_t> free(cfg.clusters_per_engine, cluster_slots);
    std::uint64_t placed = 0;
    while (true) {
        std::vector<std::size_t> trial = free;
        bool ok = true;
        for (const LaneAllocation& j : group) {
            const std::size_t need = j.slots();
            auto it = std::find_if(trial.begin(), trial.end(), [need](std::size_t f) { return f >= need; });
            if (it == trial.end()) {
                ok = false;
                break;
            }
            *it -= need;
        }
        if (!ok) break;
        free = std::move(trial);
        ++placed;
    }
    if (placed == 0) {
        throw ConfigError("RMPU job group of " + std::to_string(group.size()) +
                          " jobs does not fit an empty engine");
    }
    return placed;
}

std::uint64_t pack_engine_cycles(std::span<const LaneAllocation> group, std::uint64_t count, const SimConfig& cfg) {
    if (count == 0) return 0;
    if (std::any_of(group.begin(), group.end(), is_wide)) {
        const std::uint64_t engine_lanes = cfg.clusters_per_engine * cfg.lanes_per_cluster;
        std::uint64_t per = 0;
        for (const LaneAllocation& j : group) per += ceil_div(j.lanes, engine_lanes);
        return per * count;
    }
    return ceil_div(count, groups_per_engine_cycle(group, cfg));
}

RmpuCost rmpu_cycles(std::span<const DotWork> dots, const SimConfig& cfg) {
    RmpuCost cost;
    auto run = [&](const DotWork& d, std::size_t length, int outliers, std::uint64_t count) {
        if (count == 0 || length == 0) return;
        const auto jobs = decompose_dot(d.lhs_bits, outliers, d.rhs_bits, length, cfg.units_per_lane);
        if (cfg.group_a_two_pass && jobs.size() > 1) {
            for (const LaneAllocation& j : jobs) cost.engine_cycles += pack_engine_cycles({&j, 1}, count, cfg);
        } else {
            cost.engine_cycles += pack_engine_cycles(jobs, count, cfg);
        }
        for (const LaneAllocation& j : jobs) cost.units += j.units * count;
    };
    for (const DotWork& d : dots) {
        const std::size_t full = d.length / kDotJobLength;
        const std::size_t rem = d.length % kDotJobLength;
        run(d, kDotJobLength, d.lhs_outliers, d.dots * full);
        run(d, rem, std::min<int>(d.lhs_outliers, static_cast<int>(rem)), rem ? d.dots : 0);
    }
    cost.cycles = ceil_div(cost.engine_cycles, cfg.num_rmpus);
    return cost;
}

}  // namespace aaq
