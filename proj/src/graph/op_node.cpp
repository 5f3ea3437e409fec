// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/graph/op_node.hpp"

#include <algorithm>

#include "aaq/core/error.hpp"

namespace aaq {

std::string_view to_string(OpKind k) {
    switch (k) {
        case OpKind::Linear: return "Linear";
        case OpKind::LayerNorm: return "LayerNorm";
        case OpKind::Softmax: return "Softmax";
        case OpKind::Einsum: return "Einsum";
        case OpKind::Gate: return "Gate";
        case OpKind::ResidualAdd: return "ResidualAdd";
        case OpKind::QuantizeEdge: return "QuantizeEdge";
        case OpKind::DequantizeEdge: return "DequantizeEdge";
        case OpKind::MhaQK: return "MHA-QK";
        case OpKind::MhaAV: return "MHA-AV";
        case OpKind::Bias: return "Bias";
        case OpKind::MemoryIO: return "MemoryIO";
        case OpKind::Relu: return "Relu";
    }
    return "?";
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::RMPU: return "RMPU";
        case Stage::VVPU: return "VVPU";
        case Stage::MEM: return "MEM";
    }
    return "?";
}

std::string_view to_string(VectorOp op) {
    switch (op) {
        case VectorOp::TopK: return "topk";
        case VectorOp::Quantize: return "quantize";
        case VectorOp::Softmax: return "softmax";
        case VectorOp::LayerNorm: return "layernorm";
        case VectorOp::Residual: return "residual";
        case VectorOp::DequantAccumulate: return "dequant-accumulate";
        case VectorOp::Gate: return "gate";
        case VectorOp::Relu: return "relu";
    }
    return "?";
}

std::uint64_t element_count(const Shape& s) {
    std::uint64_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

ActivationGroup classify_activation(const EdgePosition& pos) {
    if (pos.producer && (*pos.producer == OpKind::QuantizeEdge || *pos.producer == OpKind::DequantizeEdge ||
                         *pos.producer == OpKind::MemoryIO)) {
        throw ContractError("classify_activation: " + std::string(to_string(*pos.producer)) +
                            " does not produce an activation edge");
    }
    if (pos.intra_attention) return ActivationGroup::Unquantized;
    if (pos.residual_stream || !pos.producer) return ActivationGroup::A;
    if (pos.consumers.empty()) {
        throw ContractError("classify_activation: non-residual edge from " + std::string(to_string(*pos.producer)) +
                            " has no consumer");
    }
    const bool all_linear = std::all_of(pos.consumers.begin(), pos.consumers.end(),
                                        [](OpKind k) { return k == OpKind::Linear || k == OpKind::Bias; });
    if (*pos.producer == OpKind::LayerNorm && all_linear) return ActivationGroup::B;
    return ActivationGroup::C;
}

void WorkloadConfig::validate() const {
    if (hz == 0 || hz > kMaxTokenChannels) throw ConfigError("workload.hz must be in [1, 256]");
    if (tri_mul_hidden == 0 || tri_mul_hidden > kMaxTokenChannels) {
        throw ConfigError("workload.tri_mul_hidden must be in [1, 256]");
    }
    if (num_heads == 0 || head_dim == 0 || num_heads * head_dim != hz) {
        throw ConfigError("workload.num_heads * workload.head_dim must equal workload.hz");
    }
    if (transition_factor == 0) throw ConfigError("workload.transition_factor must be positive");
    if (num_blocks == 0) throw ConfigError("workload.num_blocks must be positive");
    if (chunk == 0) throw ConfigError("workload.chunk must be positive");
    if (chunk > 1 && streaming_mha) throw ConfigError("chunking applies to the materialized baseline only");
}

WorkloadConfig WorkloadConfig::aaq() { return WorkloadConfig{}; }

WorkloadConfig WorkloadConfig::vanilla() {
    WorkloadConfig c;
    c.quantize = false;
    c.streaming_mha = false;
    return c;
}

WorkloadConfig WorkloadConfig::chunk4() {
    WorkloadConfig c = vanilla();
    c.chunk = 4;
    return c;
}

void DataflowGraph::validate() const {
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const OpNode& node = nodes[n];
        if (node.id != n) throw ContractError("node ids must match their position");
        for (std::size_t e : node.inputs) {
            if (e >= edges.size()) throw ContractError("node " + node.name + " reads an unknown edge");
            const std::size_t p = edges[e].producer;
            if (p != kNoNode && p >= n) {
                throw ContractError("node " + node.name + " consumes " + edges[e].name + " before it is produced");
            }
        }
        if (node.output != kNoNode) {
            const Edge& out = edges.at(node.output);
            if (out.producer != n) throw ContractError("edge " + out.name + " has inconsistent producer");
            if (element_count(out.shape) != out.tokens * out.channels) {
                throw ContractError("edge " + out.name + " shape does not match its token split");
            }
        }
    }
}

}  // namespace aaq
