// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aaq/graph/op_node.hpp"
#include "aaq/quant/block_codec.hpp"
#include "aaq/quant/scheme.hpp"
#include "json.hpp"

namespace aaq {

struct TraceLayout {
    std::size_t txn_bytes = kDefaultTxnBytes;
    std::size_t tokens_per_block = kDefaultTokensPerBlock;
};

struct TraceEntry {
    std::size_t node = 0;
    std::string name;
    OpKind kind = OpKind::Linear;
    Stage stage = Stage::VVPU;
    std::uint64_t bytes_read = 0;     ///< activation reads incl. re-streaming
    std::uint64_t bytes_written = 0;  ///< activation writes
    std::uint64_t weight_bytes = 0;   ///< parameters fetched once per node
    std::uint64_t score_bytes = 0;    ///< part of read+write on (Ns,Ns,Ns,h) tensors
    std::vector<DotWork> dots;        ///< operand precisions resolved
    std::vector<VectorWork> vectors;  ///< incl. runtime (de)quantization
    std::size_t fusion_group = 0;
    std::size_t tiles = 1;
    double flops = 0.0;

    std::uint64_t traffic_bytes() const noexcept { return bytes_read + bytes_written + weight_bytes; }
    std::uint64_t tile_in_bytes() const noexcept { return (bytes_read + tiles - 1) / tiles; }
    std::uint64_t tile_out_bytes() const noexcept { return (bytes_written + tiles - 1) / tiles; }
};

struct Trace {
    std::size_t ns = 0;
    bool quantized = true;
    SchemeTable schemes;
    std::vector<std::uint64_t> edge_bytes;  ///< per graph edge, 0 if on-chip
    std::vector<TraceEntry> entries;
    /// Largest sum of simultaneously live main-memory activations.
    std::uint64_t peak_live_bytes = 0;

    std::uint64_t total_traffic() const noexcept;
};

/// Bytes of one edge in main memory: block-encoded size for quantized
/// groups, 2 bytes per value otherwise. Outlier counts are capped at the
/// token width.
std::uint64_t edge_storage_bytes(const Edge& e, bool quantized, const SchemeTable& schemes,
                                 const TraceLayout& layout = {});

/// Scheme applied to an edge, or nullopt when it stays 16-bit.
std::optional<QuantScheme> edge_scheme(const Edge& e, bool quantized, const SchemeTable& schemes);

/// Per-node byte and work counts. Quantization applies when g.cfg.quantize.
Trace emit_trace(const DataflowGraph& g, const SchemeTable& schemes = {}, const TraceLayout& layout = {});

/// Node list with shapes, group tags and byte counts.
nlohmann::json trace_to_json(const DataflowGraph& g, const Trace& t);

}  // namespace aaq
