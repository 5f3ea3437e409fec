// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "aaq/graph/op_node.hpp"

namespace aaq {

/// Dataflow of one folding block over the pair representation:
/// triangular multiplication (outgoing, incoming), triangular attention
/// (starting, ending), pair transition, plus the sequence track as opaque
/// traffic. Every activation edge carries its static group tag.
/// Throws ContractError if ns == 0 and ConfigError for an invalid cfg.
DataflowGraph build_folding_block(std::size_t ns, const WorkloadConfig& cfg = {});

}  // namespace aaq
