// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "aaq/sim/config.hpp"

namespace aaq {

/// Bytes actually moved: rounded up to whole transactions.
std::uint64_t aligned_bytes(std::uint64_t bytes, std::uint64_t txn_bytes);

/// ceil(aligned * clock_hz / (bandwidth_GBps * 2^30)) + fixed overhead;
/// zero bytes cost zero cycles.
std::uint64_t mem_cycles(std::uint64_t bytes, const SimConfig& cfg);

}  // namespace aaq
