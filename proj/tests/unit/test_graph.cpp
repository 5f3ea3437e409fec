// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include "aaq/core/error.hpp"
#include "aaq/cost/cost_model.hpp"
#include "aaq/graph/folding_block.hpp"
#include "aaq/graph/trace.hpp"
#include "doctest.h"

using namespace aaq;

namespace {

const Edge& edge(const DataflowGraph& g, const std::string& name) {
    for (const Edge& e : g.edges) {
        if (e.name == name) return e;
    }
    FAIL("no edge " << name);
    return g.edges.front();
}

// Block-stream size from first principles: 4-byte header, packed tokens,
// padding to 64 bytes, 256 tokens per block.
std::uint64_t hand_stream_bytes(std::uint64_t tokens, std::size_t channels, int bits, int k) {
    const std::uint64_t token_bits = (channels - k) * bits + 16 * k + 16 + 8 * k;
    const std::uint64_t token_bytes = (token_bits + 7) / 8;
    std::uint64_t total = 0;
    for (std::uint64_t left = tokens; left > 0;) {
        const std::uint64_t n = std::min<std::uint64_t>(left, 256);
        total += (4 + n * token_bytes + 63) / 64 * 64;
        left -= n;
    }
    return total;
}

}  // namespace

TEST_CASE("classification rules") {
    CHECK(classify_activation({std::nullopt, {OpKind::LayerNorm, OpKind::ResidualAdd}, true, false}) ==
          ActivationGroup::A);
    CHECK(classify_activation({OpKind::ResidualAdd, {OpKind::LayerNorm}, true, false}) == ActivationGroup::A);
    CHECK(classify_activation({OpKind::LayerNorm, {OpKind::Linear, OpKind::Linear, OpKind::Linear}, false, false}) ==
          ActivationGroup::B);
    CHECK(classify_activation({OpKind::Linear, {OpKind::Gate}, false, false}) == ActivationGroup::C);
    CHECK(classify_activation({OpKind::MhaQK, {OpKind::Softmax}, false, true}) == ActivationGroup::Unquantized);
    CHECK_THROWS_AS(classify_activation({OpKind::QuantizeEdge, {OpKind::Linear}, false, false}), ContractError);
    CHECK_THROWS_AS(classify_activation({OpKind::Linear, {}, false, false}), ContractError);
}

TEST_CASE("graph template") {
    const auto g1 = build_folding_block(1);
    const auto g16 = build_folding_block(16);
    CHECK(g1.nodes.size() == g16.nodes.size());
    CHECK(g1.edges.size() == g16.edges.size());
    g1.validate();
    g16.validate();
    CHECK(edge(g1, "tri_att_start.scores").shape == Shape{1, 1, 1, 4});
    CHECK(element_count(edge(g16, "tri_att_start.scores").shape) / 4 == 4096);
    CHECK(element_count(edge(build_folding_block(256), "tri_mul_out.ln_in").shape) == 8388608);
    CHECK_THROWS_AS(build_folding_block(0), ContractError);
}

TEST_CASE("every quantized edge carries exactly one scheme") {
    const auto g = build_folding_block(32);
    const SchemeTable schemes;
    for (const Edge& e : g.edges) {
        const auto s = edge_scheme(e, true, schemes);
        CHECK(s.has_value() == (e.group != ActivationGroup::Unquantized));
        CHECK_FALSE(edge_scheme(e, false, schemes).has_value());
    }
    CHECK(edge(g, "pair_in").group == ActivationGroup::A);
    CHECK(edge(g, "tri_att_start.ln").group == ActivationGroup::B);
    CHECK(edge(g, "tri_mul_out.a_gate").group == ActivationGroup::C);
    CHECK(edge(g, "tri_att_end.probs").group == ActivationGroup::Unquantized);
}

TEST_CASE("edge storage arithmetic") {
    const auto g = build_folding_block(16);
    const Edge& c = edge(g, "tri_mul_out.a_gate");
    REQUIRE(c.tokens == 256);
    CHECK(256 * 66 == 16896);
    CHECK(edge_storage_bytes(c, true, SchemeTable{}) == 16960);
    CHECK(edge_storage_bytes(c, false, SchemeTable{}) == 65536);
}

TEST_CASE("streaming keeps score tensors on chip") {
    for (std::size_t ns : {4, 16}) {
        const auto streaming = emit_trace(build_folding_block(ns, WorkloadConfig::aaq()));
        for (const auto& e : streaming.entries) CHECK(e.score_bytes == 0);

        const auto vanilla = emit_trace(build_folding_block(ns, WorkloadConfig::vanilla()));
        std::set<OpKind> kinds;
        for (const auto& e : vanilla.entries) {
            if (e.score_bytes > 0) kinds.insert(e.kind);
        }
        CHECK(kinds == std::set<OpKind>{OpKind::MhaQK, OpKind::Softmax, OpKind::MhaAV});
    }
}

TEST_CASE("chunked baseline requires materialized attention") {
    WorkloadConfig w = WorkloadConfig::chunk4();
    CHECK_NOTHROW(w.validate());
    w.streaming_mha = true;
    CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("Ns=64 trace total matches an independent tally") {
    const auto g = build_folding_block(64);
    const auto t = emit_trace(g);

    std::uint64_t tally = 0;
    std::vector<std::size_t> reads(g.edges.size(), 0);
    for (const OpNode& n : g.nodes) {
        for (std::size_t in : n.inputs) reads[in] += n.read_repeat;
        tally += n.weight_bytes;
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        if (!e.materialized) continue;
        std::uint64_t bytes = 0;
        switch (e.group) {
            case ActivationGroup::A: bytes = hand_stream_bytes(e.tokens, e.channels, 8, 4); break;
            case ActivationGroup::B: bytes = hand_stream_bytes(e.tokens, e.channels, 4, 4); break;
            case ActivationGroup::C: bytes = hand_stream_bytes(e.tokens, e.channels, 4, 0); break;
            case ActivationGroup::Unquantized: bytes = e.tokens * e.channels * 2; break;
        }
        CHECK(t.edge_bytes[i] == bytes);
        const std::uint64_t writes = e.producer == kNoNode ? 0 : 1;
        tally += bytes * (writes + reads[i]);
    }
    tally += 2 * 64 * 1024 * 2;  // sequence track in and out, 16 bit
    CHECK(t.total_traffic() == tally);
    CHECK(t.total_traffic() == 40355584);
}

TEST_CASE("pair-edge bytes scale quadratically") {
    std::vector<double> xs, ys;
    for (std::size_t ns : {64, 128, 256, 512, 1024}) {
        const auto g = build_folding_block(ns);
        xs.push_back(static_cast<double>(ns));
        ys.push_back(static_cast<double>(edge_storage_bytes(edge(g, "tri_mul_out.ln_in"), true, SchemeTable{})));
    }
    CHECK(fit_scaling_exponent(xs, ys) == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("quantization shrinks peak and traffic") {
    const auto q = emit_trace(build_folding_block(32, WorkloadConfig::aaq()));
    WorkloadConfig w = WorkloadConfig::aaq();
    w.quantize = false;
    const auto u = emit_trace(build_folding_block(32, w));
    CHECK(q.total_traffic() < u.total_traffic());
    CHECK(q.peak_live_bytes < u.peak_live_bytes);
}

TEST_CASE("trace JSON export") {
    const auto g = build_folding_block(4);
    const auto t = emit_trace(g);
    const auto j = trace_to_json(g, t);
    CHECK(j.dump() == trace_to_json(g, emit_trace(g)).dump());
    CHECK(j.dump().find("tri_att_end.softmax") != std::string::npos);
}
