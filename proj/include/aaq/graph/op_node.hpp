// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aaq/quant/scheme.hpp"

namespace aaq {

enum class OpKind {
    Linear,
    LayerNorm,
    Softmax,
    Einsum,
    Gate,
    ResidualAdd,
    QuantizeEdge,
    DequantizeEdge,
    MhaQK,
    MhaAV,
    Bias,
    MemoryIO,  ///< opaque traffic (sequence track)
    Relu,
};

std::string_view to_string(OpKind k);

/// Execution stage a node is primarily assigned to.
enum class Stage { RMPU, VVPU, MEM };

std::string_view to_string(Stage s);

using Shape = std::vector<std::size_t>;

std::uint64_t element_count(const Shape& s);

/// Where an activation edge sits in the dataflow; input to classification.
struct EdgePosition {
    std::optional<OpKind> producer;  ///< nullopt: block input
    std::vector<OpKind> consumers;
    bool residual_stream = false;  ///< carried by the residual connection
    bool intra_attention = false;  ///< score/probability inside MHA
};

/// Static group assignment. Throws ContractError for descriptors that do
/// not name an activation (edge-marker producers, dangling non-residual edges).
ActivationGroup classify_activation(const EdgePosition& pos);

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

/// An activation tensor flowing between nodes. Wide channel dimensions are
/// split into `channels`-sized quantization tokens.
struct Edge {
    std::string name;
    Shape shape;               ///< logical dimensions
    std::uint64_t tokens = 0;  ///< quantization tokens
    std::size_t channels = 0;  ///< values per token
    ActivationGroup group = ActivationGroup::C;
    bool score = false;         ///< (Ns, Ns, Ns, heads) attention tensor
    bool materialized = true;   ///< round-trips through main memory
    std::size_t chunk_divisor = 1;  ///< live-size divisor under chunking
    std::size_t producer = kNoNode;
    std::size_t last_use = kNoNode;
};

/// Dot products executed on the RMPU. Long dots are split into jobs of
/// at most 128 elements with partial sums accumulated on the VVPU.
struct DotWork {
    std::uint64_t dots = 0;  ///< logical dot products
    std::size_t length = 0;  ///< elements per dot product
    std::size_t lhs_edge = kNoNode;  ///< token operand
    std::size_t rhs_edge = kNoNode;  ///< kNoNode: 16-bit weights
    bool dequantized = false;        ///< operands widened to 16 bit first
    // Resolved by emit_trace from the edge groups and scheme table.
    int lhs_bits = 16;
    int lhs_outliers = 0;
    int rhs_bits = 16;
};

enum class VectorOp { TopK, Quantize, Softmax, LayerNorm, Residual, DequantAccumulate, Gate, Relu };

std::string_view to_string(VectorOp op);

/// `count` independent VVPU operations over vectors of length `n`.
struct VectorWork {
    VectorOp op = VectorOp::Residual;
    std::size_t n = 0;
    std::uint64_t count = 0;
};

struct OpNode {
    std::size_t id = 0;
    OpKind kind = OpKind::Linear;
    std::string name;
    std::vector<std::size_t> inputs;  ///< edge ids
    std::size_t output = kNoNode;     ///< edge id, kNoNode for MemoryIO
    std::uint64_t weight_bytes = 0;
    std::uint64_t opaque_bytes = 0;  ///< MemoryIO read + write
    std::size_t read_repeat = 1;     ///< input re-streaming factor
    std::size_t fusion_group = 0;
    std::size_t tiles = 1;  ///< pipelined tiles (pair rows)
    std::vector<DotWork> dots;
    std::vector<VectorWork> vectors;
    double flops = 0.0;  ///< multiply-accumulate count
    Stage stage = Stage::VVPU;
};

struct WorkloadConfig {
    std::size_t hz = 128;
    std::size_t tri_mul_hidden = 128;
    std::size_t num_heads = 4;
    std::size_t head_dim = 32;
    std::size_t transition_factor = 4;
    std::size_t num_blocks = 48;
    std::size_t seq_channels = 1024;  ///< Hm, modeled as traffic only
    bool quantize = true;
    bool streaming_mha = true;
    std::size_t chunk = 1;  ///< channel chunk factor of the baseline (1 or 4)

    /// Throws ConfigError on invalid values.
    void validate() const;
    std::size_t transition_width() const noexcept { return transition_factor * hz; }

    static WorkloadConfig aaq();
    static WorkloadConfig vanilla();
    static WorkloadConfig chunk4();
};

struct DataflowGraph {
    std::size_t ns = 0;
    WorkloadConfig cfg;
    std::vector<Edge> edges;
    std::vector<OpNode> nodes;  ///< topological order

    /// Throws ContractError if an input is produced at or after its consumer
    /// or shapes are inconsistent.
    void validate() const;
};

}  // namespace aaq
