// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/sim/memory.hpp"

#include <cmath>

#include "aaq/core/error.hpp"

namespace aaq {

std::uint64_t aligned_bytes(std::uint64_t bytes, std::uint64_t txn_bytes) {
    if (txn_bytes == 0) throw ContractError("transaction width must be positive");
    return (bytes + txn_bytes - 1) / txn_bytes * txn_bytes;
}

std::uint64_t mem_cycles(std::uint64_t bytes, const SimConfig& cfg) {
    if (bytes == 0) return 0;
    const long double moved = static_cast<long double>(aligned_bytes(bytes, cfg.mem_txn_bytes));
    const long double per_second = static_cast<long double>(cfg.mem_bandwidth_GBps) * 1073741824.0L;
    const long double cycles = moved * static_cast<long double>(cfg.clock_ghz) * 1e9L / per_second;
    return static_cast<std::uint64_t>(std::ceil(cycles)) + cfg.mem_fixed_overhead_cycles;
}

}  // namespace aaq
