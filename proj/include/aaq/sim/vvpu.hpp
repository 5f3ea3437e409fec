// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aaq/graph/op_node.hpp"
#include "aaq/sim/config.hpp"

namespace aaq {

/// Index bookkeeping after the compare network of a top-k, in passes.
inline constexpr std::uint64_t kTopKBookkeepingPasses = 1;

/// ceil(n / simd): one elementwise sweep.
std::uint64_t vvpu_pass_cycles(std::size_t n, std::size_t simd);
/// Tree reduction over log2(n) halving stages, ceil(width / simd) each.
std::uint64_t vvpu_reduce_cycles(std::size_t n, std::size_t simd);
/// Compare stages of a bitonic sorting network over n (padded to 2^p): p(p+1)/2.
std::uint64_t bitonic_stages(std::size_t n);

/// Cycles of one VVPU executing `op` on one n-element vector.
/// Throws ContractError for n == 0 or simd == 0.
std::uint64_t vvpu_cycles(VectorOp op, std::size_t n, std::size_t simd);

struct VvpuCost {
    std::uint64_t cycles = 0;       ///< wall cycles across all VVPUs
    std::uint64_t busy_cycles = 0;  ///< sum of per-VVPU busy cycles
};

/// Vector work of one trace entry distributed over cfg.total_vvpus().
VvpuCost vvpu_node_cycles(std::span<const VectorWork> work, const SimConfig& cfg);

struct BitonicTopK {
    std::vector<std::uint8_t> indices;  ///< ascending
    std::uint64_t compare_stages = 0;
};

/// Functional model of the VVPU top-k: sorts (|x|, index) pairs with a
/// bitonic network, larger magnitude first, lower index on ties.
BitonicTopK bitonic_topk(std::span<const double> values, std::size_t k);

}  // namespace aaq
