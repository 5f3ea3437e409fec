// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/cost/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aaq/core/error.hpp"
#include "aaq/graph/folding_block.hpp"
#include "aaq/sim/vvpu.hpp"

namespace aaq {
namespace {

/// 16-bit element operations per vector of length n.
double vector_element_ops(VectorOp op, std::size_t n) {
    const double d = static_cast<double>(n);
    switch (op) {
        case VectorOp::TopK: {
            std::size_t p = 1;
            while (p < n) p <<= 1;
            return static_cast<double>(bitonic_stages(n)) * static_cast<double>(p / 2);
        }
        case VectorOp::Quantize: return 4 * d;
        case VectorOp::Softmax: return 4 * d;
        case VectorOp::LayerNorm: return 6 * d;
        case VectorOp::Gate: return 2 * d;
        case VectorOp::Residual:
        case VectorOp::DequantAccumulate:
        case VectorOp::Relu: return d;
    }
    return d;
}

constexpr double kAdd16 = 2.0;
constexpr double kMul16 = 4.0;

}  // namespace

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::Vanilla: return "vanilla";
        case Variant::Chunk4: return "chunk4";
        case Variant::Aaq: return "aaq";
    }
    return "?";
}

Variant parse_variant(std::string_view s) {
    if (s == "vanilla") return Variant::Vanilla;
    if (s == "chunk4") return Variant::Chunk4;
    if (s == "aaq") return Variant::Aaq;
    throw ContractError("unknown variant '" + std::string(s) + "' (expected vanilla, chunk4 or aaq)");
}

WorkloadConfig variant_workload(Variant v, const WorkloadConfig& base) {
    WorkloadConfig w = base;
    switch (v) {
        case Variant::Vanilla:
            w.quantize = false;
            w.streaming_mha = false;
            w.chunk = 1;
            break;
        case Variant::Chunk4:
            w.quantize = false;
            w.streaming_mha = false;
            w.chunk = 4;
            break;
        case Variant::Aaq:
            w.quantize = true;
            w.streaming_mha = true;
            w.chunk = 1;
            break;
    }
    return w;
}

std::uint64_t sequence_block_params(const WorkloadConfig& w) {
    const std::uint64_t hm = w.seq_channels;
    // q, k, v, o projections, 4x transition, biases and two LayerNorms.
    return 4 * hm * hm + 8 * hm * hm + 9 * hm + 4 * hm;
}

std::uint64_t model_weight_bytes(const CostConfig& cfg) {
    const DataflowGraph g = build_folding_block(1, cfg.workload);
    std::uint64_t pair = 0;
    for (const OpNode& n : g.nodes) pair += n.weight_bytes;
    const std::uint64_t seq = sequence_block_params(cfg.workload) * cfg.bytes_per_weight;
    const auto lm = static_cast<std::uint64_t>(std::llround(cfg.language_model_params)) * cfg.bytes_per_weight;
    return lm + cfg.workload.num_blocks * (pair + seq);
}

std::uint64_t peak_memory(std::size_t ns, Variant v, const CostConfig& cfg) {
    return cost_report(ns, v, cfg).peak_bytes;
}

std::uint64_t footprint(const Trace& t) { return t.total_traffic(); }

double int8_equivalent_ops(const Trace& t) {
    double ops = 0.0;
    for (const TraceEntry& e : t.entries) {
        for (const DotWork& d : e.dots) {
            const double dots = static_cast<double>(d.dots);
            const double k = static_cast<double>(std::min<std::size_t>(d.lhs_outliers, d.length));
            const double inl = static_cast<double>(d.length) - k;
            const double a = d.lhs_bits / 8.0;
            const double b = d.rhs_bits / 8.0;
            const double per_dot = inl * (a * b + std::max(a, b)) + k * (2.0 * b + std::max(2.0, b));
            const bool scaled = d.lhs_bits < 16 || d.rhs_bits < 16;
            ops += dots * (per_dot + (scaled ? kMul16 : 0.0));
        }
        for (const VectorWork& v : e.vectors) {
            ops += static_cast<double>(v.count) * vector_element_ops(v.op, v.n) * kAdd16;
        }
    }
    return ops;
}

CostReport cost_report(std::size_t ns, Variant v, const CostConfig& cfg) {
    CostConfig local = cfg;
    local.workload = variant_workload(v, cfg.workload);
    const DataflowGraph g = build_folding_block(ns, local.workload);
    const Trace t = emit_trace(g, cfg.schemes, cfg.layout);
    const std::uint64_t blocks = local.workload.num_blocks;

    CostReport r;
    r.ns = ns;
    r.variant = v;
    r.weight_bytes = model_weight_bytes(local);
    r.peak_activation_bytes = t.peak_live_bytes;
    r.peak_bytes = r.weight_bytes + r.peak_activation_bytes;
    std::uint64_t score = 0;
    for (const TraceEntry& e : t.entries) score += e.score_bytes;
    r.footprint_bytes = footprint(t) * blocks;
    r.score_bytes = score * blocks;
    r.shared_footprint_bytes = r.footprint_bytes - r.score_bytes;
    r.int8_ops = int8_equivalent_ops(t) * static_cast<double>(blocks);
    return r;
}

double fit_scaling_exponent(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ContractError("fit_scaling_exponent: series lengths differ");
    if (xs.size() < 4) throw ContractError("fit_scaling_exponent: need at least 4 points");
    double mx = 0.0;
    double my = 0.0;
    std::vector<double> lx(xs.size());
    std::vector<double> ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw ContractError("fit_scaling_exponent: values must be positive and finite");
        }
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw ContractError("fit_scaling_exponent: x values are all equal");
    return sxy / sxx;
}

std::string cost_to_csv(const std::vector<CostReport>& rows) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(17);
    out << "ns,variant,weight_bytes,peak_bytes,footprint_bytes,int8_ops,shared_footprint_bytes\n";
    for (const CostReport& r : rows) {
        out << r.ns << ',' << to_string(r.variant) << ',' << r.weight_bytes << ',' << r.peak_bytes << ','
            << r.footprint_bytes << ',' << r.int8_ops << ',' << r.shared_footprint_bytes << '\n';
    }
    return out.str();
}

}  // namespace aaq
