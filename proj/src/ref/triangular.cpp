// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/ref/triangular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aaq/core/error.hpp"
#include "aaq/quant/quantizer.hpp"
#include "aaq/ref/ops.hpp"

namespace aaq::ref {

void AttentionParams::validate() const {
    if (num_heads == 0 || head_dim == 0 || num_heads * head_dim != hz) {
        throw ContractError("attention needs num_heads * head_dim == Hz (" + std::to_string(num_heads) + " * " +
                            std::to_string(head_dim) + " != " + std::to_string(hz) + ")");
    }
}

Linear Linear::random(std::size_t in, std::size_t out, bool bias, Rng& rng) {
    Linear l;
    l.w = Matrix(in, out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& x : l.w.data()) x = rng.normal(0.0, scale);
    if (bias) {
        l.b.resize(out);
        for (double& x : l.b) x = rng.normal(0.0, 0.1);
    }
    return l;
}

LayerNormParams LayerNormParams::random(std::size_t n, Rng& rng) {
    LayerNormParams p;
    p.gamma.resize(n);
    p.beta.resize(n);
    for (double& g : p.gamma) g = 1.0 + rng.normal(0.0, 0.1);
    for (double& b : p.beta) b = rng.normal(0.0, 0.1);
    return p;
}

void BufferMeter::alloc(std::size_t n) {
    current += n;
    peak = std::max(peak, current);
}

void BufferMeter::release(std::size_t n) { current -= std::min(current, n); }

EdgeHook fake_quant_hook(const SchemeTable& schemes) {
    return [schemes](ActivationGroup g, ActivationTensor& t) {
        if (g == ActivationGroup::Unquantized) return;
        const QuantScheme s = schemes.at(g);
        for (std::size_t k = 0; k < t.token_count(); ++k) {
            auto tok = t.token(k);
            QuantScheme fitted = s;
            fitted.outlier_count = std::min<int>(s.outlier_count, static_cast<int>(tok.size()));
            const auto dq = fake_quantize(tok, fitted);
            std::copy(dq.begin(), dq.end(), tok.begin());
        }
    };
}

namespace {

void emit(const EdgeHook& hook, ActivationGroup g, ActivationTensor& t) {
    if (hook) hook(g, t);
}

ActivationTensor apply_linear(const ActivationTensor& x, const Linear& l) {
    if (x.hz() != l.in()) {
        throw ContractError("linear expects " + std::to_string(l.in()) + " input channels, got " +
                            std::to_string(x.hz()));
    }
    ActivationTensor y(x.ns(), l.out());
    for (std::size_t t = 0; t < x.token_count(); ++t) {
        const auto in = x.token(t);
        auto out = y.token(t);
        for (std::size_t o = 0; o < l.out(); ++o) out[o] = l.b.empty() ? 0.0 : l.b[o];
        for (std::size_t i = 0; i < l.in(); ++i) {
            const double xi = in[i];
            const auto wrow = l.w.row(i);
            for (std::size_t o = 0; o < l.out(); ++o) out[o] += xi * wrow[o];
        }
    }
    return y;
}

ActivationTensor apply_layernorm(const ActivationTensor& x, const LayerNormParams& p) {
    ActivationTensor y(x.ns(), x.hz());
    for (std::size_t t = 0; t < x.token_count(); ++t) {
        const auto n = layernorm_ref(x.token(t), p.gamma, p.beta);
        std::copy(n.begin(), n.end(), y.token(t).begin());
    }
    return y;
}

/// sigmoid(gate) * x elementwise.
ActivationTensor apply_gate(const ActivationTensor& gate, const ActivationTensor& x) {
    ActivationTensor y(x.ns(), x.hz());
    for (std::size_t e = 0; e < x.data().size(); ++e) y.data()[e] = sigmoid(gate.data()[e]) * x.data()[e];
    return y;
}

ActivationTensor residual(const ActivationTensor& z, const ActivationTensor& u) {
    ActivationTensor y(z.ns(), z.hz());
    for (std::size_t e = 0; e < z.data().size(); ++e) y.data()[e] = z.data()[e] + u.data()[e];
    return y;
}

ActivationTensor transpose_pair(const ActivationTensor& z) {
    ActivationTensor t(z.ns(), z.hz());
    for (std::size_t i = 0; i < z.ns(); ++i) {
        for (std::size_t j = 0; j < z.ns(); ++j) {
            const auto src = z.token(i, j);
            std::copy(src.begin(), src.end(), t.token(j, i).begin());
        }
    }
    return t;
}

void require_pair(const ActivationTensor& z, std::size_t hz, const char* what) {
    if (z.hz() != hz) {
        throw ContractError(std::string(what) + ": pair tensor has " + std::to_string(z.hz()) +
                            " channels, weights expect " + std::to_string(hz));
    }
}

struct AttentionInputs {
    ActivationTensor q, k, v, bias, gate;
};

AttentionInputs prepare_attention(const ActivationTensor& z, const AttentionParams& p, const TriAttnWeights& w,
                                  const EdgeHook& hook) {
    p.validate();
    require_pair(z, p.hz, "triangular attention");
    ActivationTensor zn = apply_layernorm(z, w.ln);
    emit(hook, ActivationGroup::B, zn);
    AttentionInputs in{apply_linear(zn, w.q), apply_linear(zn, w.k), apply_linear(zn, w.v), apply_linear(zn, w.bias),
                       apply_linear(zn, w.gate)};
    emit(hook, ActivationGroup::C, in.q);
    emit(hook, ActivationGroup::C, in.k);
    emit(hook, ActivationGroup::C, in.v);
    emit(hook, ActivationGroup::C, in.bias);
    emit(hook, ActivationGroup::C, in.gate);
    return in;
}

ActivationTensor finish_attention(const ActivationTensor& z, ActivationTensor& o, const AttentionInputs& in,
                                  const TriAttnWeights& w, const EdgeHook& hook) {
    emit(hook, ActivationGroup::C, o);
    ActivationTensor gated = apply_gate(in.gate, o);
    emit(hook, ActivationGroup::C, gated);
    ActivationTensor upd = apply_linear(gated, w.out);
    emit(hook, ActivationGroup::C, upd);
    ActivationTensor next = residual(z, upd);
    emit(hook, ActivationGroup::A, next);
    return next;
}

double logit(const AttentionInputs& in, const AttentionParams& p, std::size_t i, std::size_t j, std::size_t k,
             std::size_t h) {
    const auto q = in.q.token(i, j);
    const auto kk = in.k.token(i, k);
    double s = 0.0;
    for (std::size_t d = 0; d < p.head_dim; ++d) s += q[h * p.head_dim + d] * kk[h * p.head_dim + d];
    return s / std::sqrt(static_cast<double>(p.head_dim)) + in.bias.at(j, k, h);
}

ActivationTensor materialized_core(const AttentionInputs& in, const AttentionParams& p, BufferMeter* meter) {
    const std::size_t ns = in.q.ns();
    ActivationTensor o(ns, p.hz);
    std::vector<double> row_logits(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        // Whole (heads, Ns, Ns) logit block of row i.
        const std::size_t block = p.num_heads * ns * ns;
        if (meter) meter->alloc(block);
        std::vector<double> probs(block);
        for (std::size_t h = 0; h < p.num_heads; ++h) {
            for (std::size_t j = 0; j < ns; ++j) {
                for (std::size_t k = 0; k < ns; ++k) row_logits[k] = logit(in, p, i, j, k, h);
                const auto sm = softmax_ref(row_logits);
                std::copy(sm.begin(), sm.end(), probs.begin() + static_cast<std::ptrdiff_t>((h * ns + j) * ns));
            }
        }
        for (std::size_t h = 0; h < p.num_heads; ++h) {
            for (std::size_t j = 0; j < ns; ++j) {
                auto out = o.token(i, j);
                for (std::size_t k = 0; k < ns; ++k) {
                    const double pr = probs[(h * ns + j) * ns + k];
                    const auto v = in.v.token(i, k);
                    for (std::size_t d = 0; d < p.head_dim; ++d) out[h * p.head_dim + d] += pr * v[h * p.head_dim + d];
                }
            }
        }
        if (meter) meter->release(block);
    }
    return o;
}

ActivationTensor streaming_core(const AttentionInputs& in, const AttentionParams& p, BufferMeter* meter) {
    const std::size_t ns = in.q.ns();
    const std::size_t hd = p.head_dim;
    ActivationTensor o(ns, p.hz);
    for (std::size_t i = 0; i < ns; ++i) {
        // Running max, normalizer and accumulator for every (query, head) of row i.
        const std::size_t state = ns * p.num_heads * (hd + 2);
        if (meter) meter->alloc(state);
        std::vector<double> run_max(ns * p.num_heads, -std::numeric_limits<double>::infinity());
        std::vector<double> run_sum(ns * p.num_heads, 0.0);
        std::vector<double> acc(ns * p.num_heads * hd, 0.0);
        for (std::size_t k = 0; k < ns; ++k) {
            const auto v = in.v.token(i, k);
            for (std::size_t j = 0; j < ns; ++j) {
                for (std::size_t h = 0; h < p.num_heads; ++h) {
                    const std::size_t slot = j * p.num_heads + h;
                    const double s = logit(in, p, i, j, k, h);
                    double* a = &acc[slot * hd];
                    if (s > run_max[slot]) {
                        const double rescale = std::exp(run_max[slot] - s);
                        run_sum[slot] = run_sum[slot] * rescale + 1.0;
                        for (std::size_t d = 0; d < hd; ++d) a[d] = a[d] * rescale + v[h * hd + d];
                        run_max[slot] = s;
                    } else {
                        const double w = std::exp(s - run_max[slot]);
                        run_sum[slot] += w;
                        for (std::size_t d = 0; d < hd; ++d) a[d] += w * v[h * hd + d];
                    }
                }
            }
        }
        for (std::size_t j = 0; j < ns; ++j) {
            auto out = o.token(i, j);
            for (std::size_t h = 0; h < p.num_heads; ++h) {
                const std::size_t slot = j * p.num_heads + h;
                for (std::size_t d = 0; d < hd; ++d) out[h * hd + d] = acc[slot * hd + d] / run_sum[slot];
            }
        }
        if (meter) meter->release(state);
    }
    return o;
}

template <typename Core>
ActivationTensor run_attention(const ActivationTensor& z, const AttentionParams& p, const TriAttnWeights& w,
                               TriAttnNode node, const EdgeHook& hook, BufferMeter* meter, Core core) {
    const ActivationTensor zin = node == TriAttnNode::Starting ? z : transpose_pair(z);
    const AttentionInputs in = prepare_attention(zin, p, w, hook);
    ActivationTensor o = core(in, p, meter);
    ActivationTensor next = finish_attention(zin, o, in, w, hook);
    return node == TriAttnNode::Starting ? next : transpose_pair(next);
}

}  // namespace

TriMulWeights TriMulWeights::random(std::size_t hz, std::size_t hidden, Rng& rng) {
    TriMulWeights w;
    w.ln_in = LayerNormParams::random(hz, rng);
    w.a_proj = Linear::random(hz, hidden, true, rng);
    w.a_gate = Linear::random(hz, hidden, true, rng);
    w.b_proj = Linear::random(hz, hidden, true, rng);
    w.b_gate = Linear::random(hz, hidden, true, rng);
    w.gate = Linear::random(hz, hz, true, rng);
    w.ln_out = LayerNormParams::random(hidden, rng);
    w.out = Linear::random(hidden, hz, true, rng);
    return w;
}

void TriMulWeights::zero_biases() {
    for (Linear* l : {&a_proj, &a_gate, &b_proj, &b_gate, &gate, &out}) {
        std::fill(l->b.begin(), l->b.end(), 0.0);
    }
    std::fill(ln_in.beta.begin(), ln_in.beta.end(), 0.0);
    std::fill(ln_out.beta.begin(), ln_out.beta.end(), 0.0);
}

ActivationTensor triangular_multiplication_ref(const ActivationTensor& z, const TriMulWeights& w,
                                               TriMulDirection dir, const EdgeHook& hook) {
    require_pair(z, w.a_proj.in(), "triangular multiplication");
    const std::size_t ns = z.ns();
    const std::size_t hidden = w.a_proj.out();

    ActivationTensor zn = apply_layernorm(z, w.ln_in);
    emit(hook, ActivationGroup::B, zn);
    ActivationTensor ap = apply_linear(zn, w.a_proj);
    ActivationTensor ag = apply_linear(zn, w.a_gate);
    ActivationTensor bp = apply_linear(zn, w.b_proj);
    ActivationTensor bg = apply_linear(zn, w.b_gate);
    ActivationTensor g = apply_linear(zn, w.gate);
    for (auto* t : {&ap, &ag, &bp, &bg, &g}) emit(hook, ActivationGroup::C, *t);
    ActivationTensor a = apply_gate(ag, ap);
    ActivationTensor b = apply_gate(bg, bp);
    emit(hook, ActivationGroup::C, a);
    emit(hook, ActivationGroup::C, b);

    ActivationTensor x(ns, hidden);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < ns; ++j) {
            auto out = x.token(i, j);
            for (std::size_t k = 0; k < ns; ++k) {
                const auto ta = dir == TriMulDirection::Outgoing ? a.token(i, k) : a.token(k, i);
                const auto tb = dir == TriMulDirection::Outgoing ? b.token(j, k) : b.token(k, j);
                for (std::size_t c = 0; c < hidden; ++c) out[c] += ta[c] * tb[c];
            }
        }
    }
    emit(hook, ActivationGroup::C, x);
    ActivationTensor xn = apply_layernorm(x, w.ln_out);
    emit(hook, ActivationGroup::B, xn);
    ActivationTensor y = apply_linear(xn, w.out);
    emit(hook, ActivationGroup::C, y);
    ActivationTensor gated = apply_gate(g, y);
    emit(hook, ActivationGroup::C, gated);
    ActivationTensor next = residual(z, gated);
    emit(hook, ActivationGroup::A, next);
    return next;
}

TriAttnWeights TriAttnWeights::random(const AttentionParams& p, Rng& rng) {
    p.validate();
    TriAttnWeights w;
    w.ln = LayerNormParams::random(p.hz, rng);
    w.q = Linear::random(p.hz, p.hz, false, rng);
    w.k = Linear::random(p.hz, p.hz, false, rng);
    w.v = Linear::random(p.hz, p.hz, false, rng);
    w.bias = Linear::random(p.hz, p.num_heads, false, rng);
    w.gate = Linear::random(p.hz, p.hz, true, rng);
    w.out = Linear::random(p.hz, p.hz, true, rng);
    return w;
}

ActivationTensor triangular_attention_ref(const ActivationTensor& z, const AttentionParams& p,
                                          const TriAttnWeights& w, TriAttnNode node, const EdgeHook& hook,
                                          BufferMeter* meter) {
    return run_attention(z, p, w, node, hook, meter, materialized_core);
}

ActivationTensor tokenwise_mha_ref(const ActivationTensor& z, const AttentionParams& p, const TriAttnWeights& w,
                                   TriAttnNode node, const EdgeHook& hook, BufferMeter* meter) {
    return run_attention(z, p, w, node, hook, meter, streaming_core);
}

std::vector<std::vector<double>> attention_probabilities(const ActivationTensor& z, const AttentionParams& p,
                                                         const TriAttnWeights& w, std::size_t row) {
    const AttentionInputs in = prepare_attention(z, p, w, {});
    const std::size_t ns = z.ns();
    if (row >= ns) throw ContractError("row index out of range");
    std::vector<std::vector<double>> out(p.num_heads);
    std::vector<double> logits(ns);
    for (std::size_t h = 0; h < p.num_heads; ++h) {
        for (std::size_t j = 0; j < ns; ++j) {
            for (std::size_t k = 0; k < ns; ++k) logits[k] = logit(in, p, row, j, k, h);
            const auto sm = softmax_ref(logits);
            out[h].insert(out[h].end(), sm.begin(), sm.end());
        }
    }
    return out;
}

TransitionWeights TransitionWeights::random(std::size_t hz, std::size_t width, Rng& rng) {
    TransitionWeights w;
    w.ln = LayerNormParams::random(hz, rng);
    w.up = Linear::random(hz, width, true, rng);
    w.down = Linear::random(width, hz, true, rng);
    return w;
}

ActivationTensor pair_transition_ref(const ActivationTensor& z, const TransitionWeights& w, const EdgeHook& hook) {
    require_pair(z, w.up.in(), "pair transition");
    ActivationTensor zn = apply_layernorm(z, w.ln);
    emit(hook, ActivationGroup::B, zn);
    ActivationTensor h = apply_linear(zn, w.up);
    for (double& x : h.data()) x = std::max(0.0, x);
    emit(hook, ActivationGroup::C, h);
    ActivationTensor y = apply_linear(h, w.down);
    emit(hook, ActivationGroup::C, y);
    ActivationTensor next = residual(z, y);
    emit(hook, ActivationGroup::A, next);
    return next;
}

PairBlockWeights PairBlockWeights::random(const AttentionParams& p, std::size_t hidden, std::size_t transition_width,
                                          Rng& rng) {
    PairBlockWeights w;
    w.mul_out = TriMulWeights::random(p.hz, hidden, rng);
    w.mul_in = TriMulWeights::random(p.hz, hidden, rng);
    w.att_start = TriAttnWeights::random(p, rng);
    w.att_end = TriAttnWeights::random(p, rng);
    w.transition = TransitionWeights::random(p.hz, transition_width, rng);
    return w;
}

ActivationTensor pair_block_ref(const ActivationTensor& z, const AttentionParams& p, const PairBlockWeights& w,
                                const EdgeHook& hook) {
    ActivationTensor x = z;
    // The block input arrives on the residual stream.
    emit(hook, ActivationGroup::A, x);
    x = triangular_multiplication_ref(x, w.mul_out, TriMulDirection::Outgoing, hook);
    x = triangular_multiplication_ref(x, w.mul_in, TriMulDirection::Incoming, hook);
    x = tokenwise_mha_ref(x, p, w.att_start, TriAttnNode::Starting, hook);
    x = tokenwise_mha_ref(x, p, w.att_end, TriAttnNode::Ending, hook);
    return pair_transition_ref(x, w.transition, hook);
}

}  // namespace aaq::ref
