// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "aaq/core/rng.hpp"
#include "aaq/core/tensor.hpp"
#include "aaq/quant/scheme.hpp"
#include "aaq/ref/matrix.hpp"

namespace aaq::ref {

struct AttentionParams {
    std::size_t num_heads = 4;
    std::size_t head_dim = 32;
    std::size_t hz = 128;

    /// Throws ContractError unless num_heads * head_dim == hz.
    void validate() const;
};

struct Linear {
    Matrix w;                ///< (in, out)
    std::vector<double> b;   ///< empty means no bias

    static Linear random(std::size_t in, std::size_t out, bool bias, Rng& rng);
    std::size_t in() const noexcept { return w.rows(); }
    std::size_t out() const noexcept { return w.cols(); }
};

struct LayerNormParams {
    std::vector<double> gamma;
    std::vector<double> beta;

    static LayerNormParams random(std::size_t n, Rng& rng);
};

/// Called on every activation that the accelerator would quantize, tagged
/// with its group. May rewrite the tensor in place (fake quantization).
using EdgeHook = std::function<void(ActivationGroup, ActivationTensor&)>;

/// Hook that quantizes and dequantizes every token with the group's scheme.
EdgeHook fake_quant_hook(const SchemeTable& schemes);

/// Tracks live intermediate element counts of the attention kernels.
struct BufferMeter {
    std::size_t current = 0;
    std::size_t peak = 0;
    void alloc(std::size_t n);
    void release(std::size_t n);
};

// Triangular multiplicative update --------------------------------------

enum class TriMulDirection { Outgoing, Incoming };

struct TriMulWeights {
    LayerNormParams ln_in;
    Linear a_proj, a_gate, b_proj, b_gate;  ///< hz -> hidden
    Linear gate;                            ///< hz -> hz
    LayerNormParams ln_out;                 ///< over hidden
    Linear out;                             ///< hidden -> hz

    static TriMulWeights random(std::size_t hz, std::size_t hidden, Rng& rng);
    void zero_biases();
};

/// z + sigmoid(g) * Linear(LN(einsum(a, b))) with
/// outgoing x[i,j] = sum_k a[i,k] * b[j,k], incoming x[i,j] = sum_k a[k,i] * b[k,j].
ActivationTensor triangular_multiplication_ref(const ActivationTensor& z, const TriMulWeights& w,
                                               TriMulDirection dir, const EdgeHook& hook = {});

// Triangular attention ----------------------------------------------------

enum class TriAttnNode { Starting, Ending };

struct TriAttnWeights {
    LayerNormParams ln;
    Linear q, k, v;  ///< hz -> heads * head_dim, no bias
    Linear bias;     ///< hz -> heads, no bias
    Linear gate;     ///< hz -> hz
    Linear out;      ///< hz -> hz

    static TriAttnWeights random(const AttentionParams& p, Rng& rng);
};

/// Attention with materialized per-row logits. For the starting node,
/// row i attends over j with logits q[i,j].k[i,k]/sqrt(d) + bias[j,k,h];
/// the ending node runs the same on the transposed pair tensor.
ActivationTensor triangular_attention_ref(const ActivationTensor& z, const AttentionParams& p,
                                          const TriAttnWeights& w, TriAttnNode node, const EdgeHook& hook = {},
                                          BufferMeter* meter = nullptr);

/// Same result computed by streaming key/value tokens through a running
/// max and normalizer; no logit row is ever stored.
ActivationTensor tokenwise_mha_ref(const ActivationTensor& z, const AttentionParams& p, const TriAttnWeights& w,
                                   TriAttnNode node, const EdgeHook& hook = {}, BufferMeter* meter = nullptr);

/// Softmax weights of row i (per head: Ns x Ns, query-major) of the
/// materialized path; for inspection in tests.
std::vector<std::vector<double>> attention_probabilities(const ActivationTensor& z, const AttentionParams& p,
                                                         const TriAttnWeights& w, std::size_t row);

// Pair transition and full block -----------------------------------------

struct TransitionWeights {
    LayerNormParams ln;
    Linear up;    ///< hz -> width, followed by ReLU
    Linear down;  ///< width -> hz

    static TransitionWeights random(std::size_t hz, std::size_t width, Rng& rng);
};

ActivationTensor pair_transition_ref(const ActivationTensor& z, const TransitionWeights& w,
                                     const EdgeHook& hook = {});

struct PairBlockWeights {
    TriMulWeights mul_out, mul_in;
    TriAttnWeights att_start, att_end;
    TransitionWeights transition;

    static PairBlockWeights random(const AttentionParams& p, std::size_t hidden, std::size_t transition_width,
                                   Rng& rng);
};

/// Pair track of one folding block: both triangular multiplications, both
/// triangular attentions (streaming), then the transition.
ActivationTensor pair_block_ref(const ActivationTensor& z, const AttentionParams& p, const PairBlockWeights& w,
                                const EdgeHook& hook = {});

}  // namespace aaq::ref
