// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/ref/ops.hpp"

#include <algorithm>
#include <cmath>

#include "aaq/core/error.hpp"

namespace aaq::ref {

TokenVector layernorm_ref(TokenView t, std::span<const double> gamma, std::span<const double> beta) {
    if (t.size() < 2) {
        throw ContractError("layernorm needs at least two channels");
    }
    if ((!gamma.empty() && gamma.size() != t.size()) || (!beta.empty() && beta.size() != t.size())) {
        throw ContractError("layernorm affine parameters do not match the token length");
    }
    const auto n = static_cast<double>(t.size());
    double mean = 0.0;
    for (double v : t) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : t) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    TokenVector out(t.size());
    for (std::size_t c = 0; c < t.size(); ++c) {
        double y = (t[c] - mean) * inv;
        if (!gamma.empty()) y *= gamma[c];
        if (!beta.empty()) y += beta[c];
        out[c] = y;
    }
    return out;
}

std::vector<double> softmax_ref(std::span<const double> v) {
    if (v.empty()) {
        throw ContractError("softmax of an empty sequence");
    }
    require_finite(v, "softmax_ref");
    const double mx = *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - mx);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace aaq::ref
