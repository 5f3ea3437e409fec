// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/graph/trace.hpp"

#include <algorithm>

namespace aaq {

std::uint64_t Trace::total_traffic() const noexcept {
    std::uint64_t t = 0;
    for (const TraceEntry& e : entries) t += e.traffic_bytes();
    return t;
}

std::optional<QuantScheme> edge_scheme(const Edge& e, bool quantized, const SchemeTable& schemes) {
    if (!quantized || e.group == ActivationGroup::Unquantized) return std::nullopt;
    QuantScheme s = schemes.at(e.group);
    s.outlier_count = std::min<int>(s.outlier_count, static_cast<int>(e.channels));
    return s;
}

std::uint64_t edge_storage_bytes(const Edge& e, bool quantized, const SchemeTable& schemes,
                                 const TraceLayout& layout) {
    const auto s = edge_scheme(e, quantized, schemes);
    if (!s) return e.tokens * e.channels * 2;
    return stream_encoded_bytes(e.tokens, *s, BlockLayout{e.channels, layout.txn_bytes, layout.tokens_per_block});
}

namespace {

void add_quantize_work(std::vector<VectorWork>& v, const Edge& e, const QuantScheme& s) {
    if (s.outlier_count > 0) v.push_back({VectorOp::TopK, e.channels, e.tokens});
    v.push_back({VectorOp::Quantize, e.channels, e.tokens});
}

std::uint64_t peak_live_bytes(const DataflowGraph& g, const std::vector<std::uint64_t>& edge_bytes) {
    std::uint64_t peak = 0;
    for (std::size_t t = 0; t < g.nodes.size(); ++t) {
        std::uint64_t live = 0;
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            const Edge& e = g.edges[i];
            const bool born = e.producer == kNoNode || e.producer <= t;
            // Unconsumed edges are block outputs and stay live to the end.
            const bool alive = e.last_use == kNoNode || e.last_use >= t;
            if (born && alive) live += (edge_bytes[i] + e.chunk_divisor - 1) / e.chunk_divisor;
        }
        peak = std::max(peak, live);
    }
    return peak;
}

}  // namespace

Trace emit_trace(const DataflowGraph& g, const SchemeTable& schemes, const TraceLayout& layout) {
    Trace t;
    t.ns = g.ns;
    t.quantized = g.cfg.quantize;
    t.schemes = schemes;
    t.edge_bytes.resize(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        t.edge_bytes[i] = e.materialized ? edge_storage_bytes(e, t.quantized, schemes, layout) : 0;
    }

    t.peak_live_bytes = peak_live_bytes(g, t.edge_bytes);

    t.entries.reserve(g.nodes.size());
    for (const OpNode& n : g.nodes) {
        TraceEntry te;
        te.node = n.id;
        te.name = n.name;
        te.kind = n.kind;
        te.stage = n.stage;
        te.weight_bytes = n.weight_bytes;
        te.fusion_group = n.fusion_group;
        te.tiles = std::max<std::size_t>(1, n.tiles);
        te.flops = n.flops;
        te.vectors = n.vectors;

        for (std::size_t in : n.inputs) {
            const std::uint64_t b = t.edge_bytes[in] * n.read_repeat;
            te.bytes_read += b;
            if (g.edges[in].score) te.score_bytes += b;
            // Vector units operate on real values; quantized inputs are expanded first.
            if (n.stage == Stage::VVPU && edge_scheme(g.edges[in], t.quantized, schemes)) {
                te.vectors.push_back({VectorOp::DequantAccumulate, g.edges[in].channels, g.edges[in].tokens});
            }
        }
        if (n.output != kNoNode) {
            const Edge& out = g.edges[n.output];
            te.bytes_written = t.edge_bytes[n.output];
            if (out.score) te.score_bytes += te.bytes_written;
            if (const auto s = edge_scheme(out, t.quantized, schemes)) add_quantize_work(te.vectors, out, *s);
        } else {
            te.bytes_read += n.opaque_bytes / 2;
            te.bytes_written += n.opaque_bytes - n.opaque_bytes / 2;
        }

        for (DotWork d : n.dots) {
            const auto ls = d.lhs_edge == kNoNode ? std::nullopt : edge_scheme(g.edges[d.lhs_edge], t.quantized, schemes);
            const auto rs = d.rhs_edge == kNoNode ? std::nullopt : edge_scheme(g.edges[d.rhs_edge], t.quantized, schemes);
            if (d.dequantized) {
                d.lhs_bits = d.rhs_bits = 16;
                d.lhs_outliers = 0;
                for (std::size_t in : {d.lhs_edge, d.rhs_edge}) {
                    if (in != kNoNode && edge_scheme(g.edges[in], t.quantized, schemes)) {
                        te.vectors.push_back({VectorOp::DequantAccumulate, g.edges[in].channels, g.edges[in].tokens});
                    }
                }
            } else {
                d.lhs_bits = ls ? ls->inlier_bits : 16;
                d.lhs_outliers = ls && d.length % g.edges[d.lhs_edge].channels == 0 ? ls->outlier_count : 0;
                d.rhs_bits = rs ? rs->inlier_bits : 16;
                // Probabilities absorb the per-token value scale before the dot product.
                if (n.kind == OpKind::MhaAV && rs) {
                    te.vectors.push_back({VectorOp::DequantAccumulate, d.length, d.dots / g.cfg.head_dim});
                }
            }
            te.dots.push_back(d);
        }
        t.entries.push_back(std::move(te));
    }
    return t;
}

nlohmann::json trace_to_json(const DataflowGraph& g, const Trace& t) {
    using nlohmann::json;
    json nodes = json::array();
    for (const TraceEntry& e : t.entries) {
        const OpNode& n = g.nodes[e.node];
        json inputs = json::array();
        for (std::size_t in : n.inputs) {
            inputs.push_back({{"edge", g.edges[in].name}, {"shape", g.edges[in].shape},
                              {"group", std::string(to_string(g.edges[in].group))}});
        }
        json node = {{"id", e.node},
                     {"name", e.name},
                     {"kind", std::string(to_string(e.kind))},
                     {"stage", std::string(to_string(e.stage))},
                     {"inputs", inputs},
                     {"bytes_read", e.bytes_read},
                     {"bytes_written", e.bytes_written},
                     {"weight_bytes", e.weight_bytes},
                     {"score_bytes", e.score_bytes},
                     {"fusion_group", e.fusion_group},
                     {"flops", e.flops}};
        if (n.output != kNoNode) {
            const Edge& out = g.edges[n.output];
            node["output"] = {{"edge", out.name},
                              {"shape", out.shape},
                              {"group", std::string(to_string(out.group))},
                              {"materialized", out.materialized},
                              {"bytes", t.edge_bytes[n.output]}};
            if (const auto s = edge_scheme(out, t.quantized, t.schemes)) node["output"]["scheme"] = s->to_string();
        }
        json dots = json::array();
        for (const DotWork& d : e.dots) {
            dots.push_back({{"dots", d.dots}, {"length", d.length}, {"lhs_bits", d.lhs_bits},
                            {"lhs_outliers", d.lhs_outliers}, {"rhs_bits", d.rhs_bits}});
        }
        node["dots"] = dots;
        json vec = json::array();
        for (const VectorWork& v : e.vectors) {
            vec.push_back({{"op", std::string(to_string(v.op))}, {"n", v.n}, {"count", v.count}});
        }
        node["vectors"] = vec;
        nodes.push_back(node);
    }
    return {{"ns", t.ns},
            {"hz", g.cfg.hz},
            {"num_blocks", g.cfg.num_blocks},
            {"quantized", t.quantized},
            {"streaming_mha", g.cfg.streaming_mha},
            {"chunk", g.cfg.chunk},
            {"schemes", t.schemes.to_string()},
            {"total_traffic_bytes", t.total_traffic()},
            {"nodes", nodes}};
}

}  // namespace aaq
