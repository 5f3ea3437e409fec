// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "aaq/graph/op_node.hpp"
#include "aaq/graph/trace.hpp"
#include "aaq/quant/scheme.hpp"
#include "aaq/sim/config.hpp"

namespace aaq {

/// How partial results of the lanes serving one dot product are combined.
enum class AccumulationMode {
    Two,            ///< 2-PE sums, four jobs share a lane (head_dim 32 attention)
    Four,           ///< up to 4 lanes, scale applied after accumulation
    FivePlusScale,  ///< 4 inlier lanes scaled, then the outlier lane added
    Eight,          ///< unquantized, up to 8 lanes
    Sixteen,        ///< unquantized, up to 16 lanes
    Eighty,         ///< whole-engine sum, spans engines when larger
};

std::string_view to_string(AccumulationMode m);

inline constexpr std::size_t kSlotsPerLane = 4;
inline constexpr std::size_t kDotJobLength = 128;

struct LaneAllocation {
    std::size_t job_id = 0;
    std::size_t lanes = 0;  ///< lanes touched (a Two job touches one shared lane)
    AccumulationMode mode = AccumulationMode::Four;
    std::uint64_t units = 0;

    /// Quarter-lane slots occupied.
    std::size_t slots() const noexcept { return mode == AccumulationMode::Two ? 1 : lanes * kSlotsPerLane; }
};

/// 4-bit units of one dot product: (a/4)(b/4)(len-k) + (16/4)(b/4)k.
std::uint64_t dot_units(int lhs_bits, int lhs_outliers, int rhs_bits, std::size_t length);

/// Units of a token quantized with `s` against a weight column.
std::uint64_t units_required(const QuantScheme& s, int weight_bits = 16, std::size_t hz = 128);
/// Units of an unquantized 16-bit token.
std::uint64_t units_required_unquantized(int weight_bits = 16, std::size_t hz = 128);

/// Lane count and accumulation mode for one job. Throws ContractError for 0.
LaneAllocation lanes_required(std::uint64_t units, std::size_t units_per_lane = 128);

/// Jobs for one (at most 128-element) dot product chunk. 8-bit token
/// operands split into a low plane with the outliers and a high plane.
std::vector<LaneAllocation> decompose_dot(int lhs_bits, int lhs_outliers, int rhs_bits, std::size_t length,
                                          std::size_t units_per_lane = 128);

/// Engine-cycles to run `count` repetitions of `group` under greedy
/// first-fit, with all jobs of one repetition placed in the same cycle.
/// Lanes never span clusters; Eighty jobs take whole engines.
std::uint64_t pack_engine_cycles(std::span<const LaneAllocation> group, std::uint64_t count, const SimConfig& cfg);

/// Repetitions of `group` placed in one engine-cycle starting empty.
std::uint64_t groups_per_engine_cycle(std::span<const LaneAllocation> group, const SimConfig& cfg);

struct RmpuCost {
    std::uint64_t cycles = 0;
    std::uint64_t engine_cycles = 0;
    std::uint64_t units = 0;  ///< 4-bit unit operations performed
};

/// Dot-product work of one trace entry spread over cfg.num_rmpus engines.
RmpuCost rmpu_cycles(std::span<const DotWork> dots, const SimConfig& cfg);

}  // namespace aaq
