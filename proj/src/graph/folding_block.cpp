// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/graph/folding_block.hpp"

#include <algorithm>
#include <string>

#include "aaq/core/error.hpp"

namespace aaq {
namespace {

constexpr std::size_t kDotChunk = 128;

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

class BlockBuilder {
public:
    BlockBuilder(std::size_t ns, const WorkloadConfig& cfg) {
        g_.ns = ns;
        g_.cfg = cfg;
    }

    std::size_t ns() const { return g_.ns; }
    const WorkloadConfig& cfg() const { return g_.cfg; }
    std::uint64_t pair_tokens() const { return static_cast<std::uint64_t>(g_.ns) * g_.ns; }

    /// Pair edge (Ns, Ns, channels) split into tokens of at most Hz values.
    Edge pair_edge(const std::string& name, std::size_t channels) const {
        Edge e;
        e.name = name;
        e.shape = {g_.ns, g_.ns, channels};
        const std::size_t split = channels > g_.cfg.hz ? ceil_div(channels, g_.cfg.hz) : 1;
        if (channels % split != 0) throw ConfigError("edge " + name + " does not split into equal tokens");
        e.channels = channels / split;
        e.tokens = pair_tokens() * split;
        return e;
    }

    /// (Ns, Ns, Ns, heads) score edge, one row of Ns logits per token.
    Edge score_edge(const std::string& name) const {
        Edge e;
        e.name = name;
        e.shape = {g_.ns, g_.ns, g_.ns, g_.cfg.num_heads};
        e.channels = g_.ns;
        e.tokens = pair_tokens() * g_.cfg.num_heads;
        e.score = true;
        e.materialized = !g_.cfg.streaming_mha;
        e.chunk_divisor = g_.cfg.chunk;
        return e;
    }

    std::size_t input(const std::string& name) {
        Edge e = pair_edge(name, g_.cfg.hz);
        g_.edges.push_back(e);
        residual_.push_back(true);
        intra_.push_back(false);
        return g_.edges.size() - 1;
    }

    std::size_t add(OpKind kind, const std::string& name, std::vector<std::size_t> inputs, Edge out, Stage stage,
                    bool residual = false, bool intra = false) {
        OpNode n;
        n.id = g_.nodes.size();
        n.kind = kind;
        n.name = name;
        n.inputs = std::move(inputs);
        n.stage = stage;
        n.tiles = g_.ns;
        n.fusion_group = next_group_++;
        out.producer = n.id;
        g_.edges.push_back(std::move(out));
        residual_.push_back(residual);
        intra_.push_back(intra);
        n.output = g_.edges.size() - 1;
        g_.nodes.push_back(std::move(n));
        return g_.nodes.back().output;
    }

    OpNode& last() { return g_.nodes.back(); }

    std::size_t layernorm(const std::string& name, std::size_t in) {
        const std::size_t c = g_.edges[in].shape.back();
        const std::size_t out = add(OpKind::LayerNorm, name, {in}, pair_edge(name, c), Stage::VVPU);
        last().weight_bytes = 2 * c * 2;
        last().vectors.push_back({VectorOp::LayerNorm, c, pair_tokens()});
        return out;
    }

    std::size_t linear(const std::string& name, std::size_t in, std::size_t out_c, bool bias,
                       OpKind kind = OpKind::Linear) {
        const std::size_t in_c = g_.edges[in].shape.back();
        const std::size_t out = add(kind, name, {in}, pair_edge(name, out_c), Stage::RMPU);
        OpNode& n = last();
        n.weight_bytes = (in_c * out_c + (bias ? out_c : 0)) * 2;
        DotWork d;
        d.dots = pair_tokens() * out_c;
        d.length = in_c;
        d.lhs_edge = in;
        n.dots.push_back(d);
        n.flops = static_cast<double>(d.dots) * static_cast<double>(in_c);
        accumulate_chunks(n, in_c, out_c, pair_tokens());
        return out;
    }

    std::size_t gate(const std::string& name, std::size_t g, std::size_t x) {
        const std::size_t c = g_.edges[x].shape.back();
        const std::size_t out = add(OpKind::Gate, name, {g, x}, pair_edge(name, c), Stage::VVPU);
        last().vectors.push_back({VectorOp::Gate, c, pair_tokens()});
        return out;
    }

    std::size_t residual(const std::string& name, std::size_t z, std::size_t u) {
        const std::size_t c = g_.edges[z].shape.back();
        const std::size_t out = add(OpKind::ResidualAdd, name, {z, u}, pair_edge(name, c), Stage::VVPU, true);
        last().vectors.push_back({VectorOp::Residual, c, pair_tokens()});
        return out;
    }

    /// Partial sums of dot products longer than one RMPU job.
    void accumulate_chunks(OpNode& n, std::size_t length, std::size_t out_c, std::uint64_t tokens) {
        const std::size_t chunks = ceil_div(length, kDotChunk);
        if (chunks > 1) n.vectors.push_back({VectorOp::DequantAccumulate, out_c, tokens * chunks});
    }

    void fuse_with_previous() {
        OpNode& n = last();
        n.fusion_group = g_.nodes[n.id - 1].fusion_group;
        --next_group_;
    }

    void memory_io(const std::string& name, std::uint64_t bytes) {
        OpNode n;
        n.id = g_.nodes.size();
        n.kind = OpKind::MemoryIO;
        n.name = name;
        n.stage = Stage::MEM;
        n.opaque_bytes = bytes;
        n.fusion_group = next_group_++;
        g_.nodes.push_back(std::move(n));
    }

    DataflowGraph finish() {
        std::vector<std::vector<OpKind>> consumers(g_.edges.size());
        for (const OpNode& n : g_.nodes) {
            for (std::size_t e : n.inputs) {
                consumers[e].push_back(n.kind);
                g_.edges[e].last_use = n.id;
            }
        }
        for (std::size_t e = 0; e < g_.edges.size(); ++e) {
            EdgePosition pos;
            if (g_.edges[e].producer != kNoNode) pos.producer = g_.nodes[g_.edges[e].producer].kind;
            pos.consumers = consumers[e];
            pos.residual_stream = residual_[e];
            pos.intra_attention = intra_[e];
            g_.edges[e].group = classify_activation(pos);
        }
        g_.validate();
        return std::move(g_);
    }

private:
    DataflowGraph g_;
    std::vector<bool> residual_;
    std::vector<bool> intra_;
    std::size_t next_group_ = 0;
};

std::size_t tri_mul(BlockBuilder& b, std::size_t z, const std::string& p) {
    const WorkloadConfig& cfg = b.cfg();
    const std::size_t hidden = cfg.tri_mul_hidden;
    const std::size_t zn = b.layernorm(p + ".ln_in", z);
    const std::size_t ap = b.linear(p + ".a_proj", zn, hidden, true);
    const std::size_t ag = b.linear(p + ".a_gate", zn, hidden, true);
    const std::size_t bp = b.linear(p + ".b_proj", zn, hidden, true);
    const std::size_t bg = b.linear(p + ".b_gate", zn, hidden, true);
    const std::size_t g = b.linear(p + ".gate", zn, cfg.hz, true);
    const std::size_t a = b.gate(p + ".a", ag, ap);
    const std::size_t bb = b.gate(p + ".b", bg, bp);

    const std::size_t x = b.add(OpKind::Einsum, p + ".einsum", {a, bb}, b.pair_edge(p + ".einsum", hidden),
                                Stage::RMPU);
    OpNode& e = b.last();
    DotWork d;
    d.dots = b.pair_tokens() * hidden;
    d.length = b.ns();
    d.lhs_edge = a;
    d.rhs_edge = bb;
    d.dequantized = true;
    e.dots.push_back(d);
    e.flops = static_cast<double>(d.dots) * static_cast<double>(b.ns());
    b.accumulate_chunks(e, b.ns(), hidden, b.pair_tokens());

    const std::size_t xn = b.layernorm(p + ".ln_out", x);
    const std::size_t y = b.linear(p + ".out", xn, cfg.hz, true);
    const std::size_t u = b.gate(p + ".gate_out", g, y);
    return b.residual(p + ".residual", z, u);
}

std::size_t tri_att(BlockBuilder& b, std::size_t z, const std::string& p) {
    const WorkloadConfig& cfg = b.cfg();
    const std::size_t ns = b.ns();
    const std::size_t heads = cfg.num_heads;
    const std::uint64_t rows = b.pair_tokens() * heads;  // (i, j, h) query rows

    const std::size_t zn = b.layernorm(p + ".ln", z);
    const std::size_t q = b.linear(p + ".q", zn, cfg.hz, false);
    const std::size_t k = b.linear(p + ".k", zn, cfg.hz, false);
    const std::size_t v = b.linear(p + ".v", zn, cfg.hz, false);
    const std::size_t g = b.linear(p + ".g", zn, cfg.hz, true);
    const std::size_t bias = b.linear(p + ".bias", zn, heads, false, OpKind::Bias);

    const std::size_t s = b.add(OpKind::MhaQK, p + ".qk", {q, k, bias}, b.score_edge(p + ".scores"), Stage::RMPU,
                                false, true);
    {
        OpNode& n = b.last();
        DotWork d;
        d.dots = rows * ns;
        d.length = cfg.head_dim;
        d.lhs_edge = q;
        d.rhs_edge = k;
        n.dots.push_back(d);
        n.flops = static_cast<double>(d.dots) * static_cast<double>(cfg.head_dim);
        n.vectors.push_back({VectorOp::Residual, ns, rows});  // + bias
        n.tiles = ns * ns;
    }
    const std::size_t pr = b.add(OpKind::Softmax, p + ".softmax", {s}, b.score_edge(p + ".probs"), Stage::VVPU,
                                 false, true);
    b.last().vectors.push_back({VectorOp::Softmax, ns, rows});
    if (cfg.streaming_mha) b.fuse_with_previous();
    b.last().tiles = ns * ns;

    const std::size_t o = b.add(OpKind::MhaAV, p + ".av", {pr, v}, b.pair_edge(p + ".av", cfg.hz), Stage::RMPU);
    {
        OpNode& n = b.last();
        DotWork d;
        d.dots = b.pair_tokens() * cfg.hz;
        d.length = ns;
        d.lhs_edge = pr;
        d.rhs_edge = v;
        n.dots.push_back(d);
        n.flops = static_cast<double>(d.dots) * static_cast<double>(ns);
        b.accumulate_chunks(n, ns, cfg.hz, b.pair_tokens());
        n.tiles = ns * ns;
    }
    if (cfg.streaming_mha) b.fuse_with_previous();

    const std::size_t go = b.gate(p + ".gate", g, o);
    const std::size_t u = b.linear(p + ".out", go, cfg.hz, true);
    return b.residual(p + ".residual", z, u);
}

std::size_t transition(BlockBuilder& b, std::size_t z, const std::string& p) {
    const WorkloadConfig& cfg = b.cfg();
    const std::size_t width = cfg.transition_width();
    const std::size_t zn = b.layernorm(p + ".ln", z);
    const std::size_t h = b.linear(p + ".up", zn, width, true);
    {
        OpNode& n = b.last();
        n.kind = OpKind::Linear;
        n.vectors.push_back({VectorOp::Relu, cfg.hz, b.pair_tokens() * (width / cfg.hz)});
        n.read_repeat = cfg.chunk;
    }
    const std::size_t y = b.linear(p + ".down", h, cfg.hz, true);
    return b.residual(p + ".residual", z, y);
}

}  // namespace

DataflowGraph build_folding_block(std::size_t ns, const WorkloadConfig& cfg) {
    if (ns == 0) throw ContractError("build_folding_block: Ns must be at least 1");
    cfg.validate();
    if (cfg.transition_width() % cfg.hz != 0) throw ConfigError("transition width must be a multiple of Hz");

    BlockBuilder b(ns, cfg);
    std::size_t z = b.input("pair_in");
    z = tri_mul(b, z, "tri_mul_out");
    z = tri_mul(b, z, "tri_mul_in");
    z = tri_att(b, z, "tri_att_start");
    z = tri_att(b, z, "tri_att_end");
    z = transition(b, z, "transition");
    // Sequence track: one read and one write of the (Ns, Hm) representation.
    b.memory_io("seq_track", 2ULL * ns * cfg.seq_channels * 2);
    DataflowGraph g = b.finish();
    // The transition hidden activation is chunked along channels.
    for (Edge& e : g.edges) {
        if (e.name == "transition.up") e.chunk_divisor = cfg.chunk;
    }
    return g;
}

}  // namespace aaq
