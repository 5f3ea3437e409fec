// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/ref/quantized_dot.hpp"

#include <cmath>
#include <vector>

#include "aaq/core/error.hpp"

namespace aaq::ref {

double quantized_dot(const QuantizedToken& q, std::span<const std::int16_t> weights, int weight_frac_bits,
                     const QuantScheme& s) {
    if (q.outliers.size() != static_cast<std::size_t>(s.outlier_count) ||
        q.outlier_indices.size() != q.outliers.size()) {
        throw ContractError("quantized token does not match scheme " + s.to_string());
    }
    if (weights.size() != q.channels()) {
        throw ContractError("weight column length does not match the token");
    }
    std::vector<bool> is_outlier(weights.size(), false);
    std::int64_t outlier_acc = 0;
    for (std::size_t j = 0; j < q.outliers.size(); ++j) {
        const std::size_t idx = q.outlier_indices[j];
        if (idx >= weights.size()) {
            throw ContractError("outlier index out of range");
        }
        is_outlier[idx] = true;
        outlier_acc += static_cast<std::int64_t>(q.outliers[j]) * weights[idx];
    }
    std::int64_t inlier_acc = 0;
    std::size_t next = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (!is_outlier[c]) inlier_acc += static_cast<std::int64_t>(q.inliers[next++]) * weights[c];
    }
    const double inliers = q.scale() * std::ldexp(static_cast<double>(inlier_acc), -weight_frac_bits);
    const double outliers = std::ldexp(static_cast<double>(outlier_acc), -(weight_frac_bits + kOutlierFracBits));
    return inliers + outliers;
}

}  // namespace aaq::ref
