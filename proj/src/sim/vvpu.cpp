// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/sim/vvpu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "aaq/core/error.hpp"

namespace aaq {
namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::uint64_t log2_exact(std::size_t p) {
    std::uint64_t l = 0;
    while ((std::size_t{1} << l) < p) ++l;
    return l;
}

}  // namespace

std::uint64_t vvpu_pass_cycles(std::size_t n, std::size_t simd) { return (n + simd - 1) / simd; }

std::uint64_t vvpu_reduce_cycles(std::size_t n, std::size_t simd) {
    std::uint64_t c = 0;
    for (std::size_t w = next_pow2(n) / 2; w >= 1; w /= 2) c += vvpu_pass_cycles(w, simd);
    return c;
}

std::uint64_t bitonic_stages(std::size_t n) {
    const std::uint64_t p = log2_exact(next_pow2(n));
    return p * (p + 1) / 2;
}

std::uint64_t vvpu_cycles(VectorOp op, std::size_t n, std::size_t simd) {
    if (n == 0) throw ContractError("vvpu_cycles: empty vector");
    if (simd == 0) throw ContractError("vvpu_cycles: SIMD width must be positive");
    const std::uint64_t pass = vvpu_pass_cycles(n, simd);
    const std::uint64_t reduce = vvpu_reduce_cycles(n, simd);
    switch (op) {
        case VectorOp::TopK:
            return bitonic_stages(n) * vvpu_pass_cycles(next_pow2(n) / 2, simd) + kTopKBookkeepingPasses * pass;
        case VectorOp::Quantize: return pass + reduce + pass + pass;  // |x|, max, scale, pack
        case VectorOp::Softmax: return reduce + pass + reduce + pass;  // max, exp, sum, divide
        case VectorOp::LayerNorm: return 2 * reduce + 4 * pass + 1;  // mean, var, rsqrt + 4 sweeps
        case VectorOp::Residual:
        case VectorOp::DequantAccumulate:
        case VectorOp::Relu: return pass;
        case VectorOp::Gate: return 2 * pass;  // sigmoid lookup, multiply
    }
    throw ContractError("vvpu_cycles: unknown vector op");
}

VvpuCost vvpu_node_cycles(std::span<const VectorWork> work, const SimConfig& cfg) {
    VvpuCost cost;
    const std::uint64_t units = cfg.total_vvpus();
    for (const VectorWork& w : work) {
        if (w.count == 0) continue;
        const std::uint64_t per = vvpu_cycles(w.op, w.n, cfg.simd_lanes_per_vvpu);
        cost.cycles += (w.count + units - 1) / units * per;
        cost.busy_cycles += w.count * per;
    }
    return cost;
}

BitonicTopK bitonic_topk(std::span<const double> values, std::size_t k) {
    if (k > values.size()) throw ContractError("bitonic_topk: k exceeds vector length");
    if (values.size() > 256) throw ContractError("bitonic_topk: at most 256 values");
    const std::size_t n = next_pow2(values.size());
    // Padding entries sort last: magnitude -1 never beats a real value.
    std::vector<std::pair<double, std::size_t>> v(n, {-1.0, std::numeric_limits<std::size_t>::max()});
    for (std::size_t i = 0; i < values.size(); ++i) v[i] = {std::fabs(values[i]), i};
    // a precedes b: larger magnitude, then lower index.
    auto before = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };

    BitonicTopK out;
    for (std::size_t size = 2; size <= n; size <<= 1) {
        for (std::size_t stride = size / 2; stride > 0; stride >>= 1) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = i ^ stride;
                if (j <= i) continue;
                const bool descending = (i & size) == 0;
                if (descending ? before(v[j], v[i]) : before(v[i], v[j])) std::swap(v[i], v[j]);
            }
            ++out.compare_stages;
        }
    }
    for (std::size_t i = 0; i < k; ++i) out.indices.push_back(static_cast<std::uint8_t>(v[i].second));
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

}  // namespace aaq
