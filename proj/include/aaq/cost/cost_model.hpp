// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aaq/graph/op_node.hpp"
#include "aaq/graph/trace.hpp"
#include "aaq/quant/scheme.hpp"

namespace aaq {

enum class Variant { Vanilla, Chunk4, Aaq };

std::string_view to_string(Variant v);
/// Accepts "vanilla", "chunk4", "aaq". Throws ContractError otherwise.
Variant parse_variant(std::string_view s);

struct CostConfig {
    WorkloadConfig workload;  ///< quantize/streaming/chunk are set per variant
    SchemeTable schemes;
    TraceLayout layout;
    double language_model_params = 3.0e9;  ///< protein language model, 16-bit
    std::size_t bytes_per_weight = 2;
};

/// Workload of `v` derived from `base` dimensions.
WorkloadConfig variant_workload(Variant v, const WorkloadConfig& base);

struct CostReport {
    std::size_t ns = 0;
    Variant variant = Variant::Vanilla;
    std::uint64_t weight_bytes = 0;
    std::uint64_t peak_activation_bytes = 0;
    std::uint64_t peak_bytes = 0;              ///< weights + peak activations
    std::uint64_t footprint_bytes = 0;         ///< read + write traffic, all blocks
    std::uint64_t shared_footprint_bytes = 0;  ///< footprint without score tensors
    std::uint64_t score_bytes = 0;             ///< score tensor traffic, all blocks
    double int8_ops = 0.0;
};

/// Parameters of the sequence track of one block (attention + transition
/// over Hm channels), counted but not simulated.
std::uint64_t sequence_block_params(const WorkloadConfig& w);

/// All model weights: language model, sequence track and pair track of
/// every block. Independent of Ns.
std::uint64_t model_weight_bytes(const CostConfig& cfg);

/// Weights plus the largest simultaneously live activation set.
std::uint64_t peak_memory(std::size_t ns, Variant v, const CostConfig& cfg);

/// Main-memory read + write bytes of one block trace. Equals the
/// simulator's per-block traffic for the same trace.
std::uint64_t footprint(const Trace& t);

/// INT8-equivalent operations of one block trace: multiplies weigh
/// (a/8)(b/8), additions max(a,b)/8, one 16-bit scale multiply per
/// quantized dot product, vector work as 16-bit additions.
double int8_equivalent_ops(const Trace& t);

CostReport cost_report(std::size_t ns, Variant v, const CostConfig& cfg);

/// Least-squares slope of log(y) over log(x). Throws ContractError with
/// fewer than 4 points, non-positive values or constant x.
double fit_scaling_exponent(std::span<const double> xs, std::span<const double> ys);

/// Columns: ns, variant, weight_bytes, peak_bytes, footprint_bytes,
/// int8_ops, shared_footprint_bytes.
std::string cost_to_csv(const std::vector<CostReport>& rows);

}  // namespace aaq
