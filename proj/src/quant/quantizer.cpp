// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/quant/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aaq/core/error.hpp"
#include "aaq/core/fixed_point.hpp"
#include "aaq/quant/half.hpp"

namespace aaq {

OutlierSplit select_outliers(TokenView token, int k) {
    if (k < 0 || static_cast<std::size_t>(k) > token.size()) {
        throw ContractError("outlier count " + std::to_string(k) + " exceeds token length " + std::to_string(token.size()));
    }
    if (token.size() > kMaxTokenChannels) {
        throw ContractError("token longer than " + std::to_string(kMaxTokenChannels) + " channels");
    }
    std::vector<std::size_t> order(token.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto ku = static_cast<std::size_t>(k);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(ku), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double ma = std::abs(token[a]);
                          const double mb = std::abs(token[b]);
                          return ma > mb || (ma == mb && a < b);
                      });
    std::vector<std::size_t> picked(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(ku));
    std::sort(picked.begin(), picked.end());

    OutlierSplit split;
    split.indices.reserve(ku);
    split.outliers.reserve(ku);
    split.inliers.reserve(token.size() - ku);
    std::size_t next = 0;
    for (std::size_t c = 0; c < token.size(); ++c) {
        if (next < picked.size() && picked[next] == c) {
            split.indices.push_back(static_cast<std::uint8_t>(c));
            split.outliers.push_back(token[c]);
            ++next;
        } else {
            split.inliers.push_back(token[c]);
        }
    }
    return split;
}

double QuantizedToken::scale() const { return half_to_double(scale_bits); }

double exact_scale(const OutlierSplit& split, const QuantScheme& s) {
    double m = 0.0;
    for (double v : split.inliers) m = std::max(m, std::abs(v));
    return m / static_cast<double>(s.max_code());
}

QuantizedToken quantize_token(TokenView token, const QuantScheme& s) {
    s.validate(token.size());
    require_finite(token, "quantize_token");
    const OutlierSplit split = select_outliers(token, s.outlier_count);
    const double sigma = exact_scale(split, s);

    QuantizedToken q;
    q.scale_bits = double_to_half_saturating(sigma);
    q.outlier_indices = split.indices;
    q.inliers.reserve(split.inliers.size());
    const int lim = s.max_code();
    for (double v : split.inliers) {
        q.inliers.push_back(sigma == 0.0 ? std::int16_t{0}
                                         : static_cast<std::int16_t>(round_clamp(v / sigma, -lim, lim)));
    }
    const FixedPointFormat q16(16);
    q.outliers.reserve(split.outliers.size());
    for (double v : split.outliers) {
        q.outliers.push_back(static_cast<std::int16_t>(to_fixed(v, q16, kOutlierFracBits)));
    }
    return q;
}

TokenVector dequantize_token(const QuantizedToken& q, const QuantScheme& s) {
    if (q.outliers.size() != static_cast<std::size_t>(s.outlier_count) ||
        q.outlier_indices.size() != q.outliers.size()) {
        throw CorruptionError("quantized token does not carry " + std::to_string(s.outlier_count) + " outliers", 0);
    }
    const std::size_t hz = q.channels();
    TokenVector out(hz, 0.0);
    std::vector<bool> is_outlier(hz, false);
    for (std::size_t j = 0; j < q.outlier_indices.size(); ++j) {
        const std::size_t idx = q.outlier_indices[j];
        if (idx >= hz || (j > 0 && idx <= q.outlier_indices[j - 1])) {
            throw CorruptionError("outlier index " + std::to_string(idx) + " out of range or unordered", j);
        }
        is_outlier[idx] = true;
        out[idx] = from_fixed(q.outliers[j], kOutlierFracBits);
    }
    const double sigma = q.scale();
    std::size_t next = 0;
    for (std::size_t c = 0; c < hz; ++c) {
        if (!is_outlier[c]) out[c] = sigma * q.inliers[next++];
    }
    return out;
}

TokenVector fake_quantize(TokenView token, const QuantScheme& s) {
    return dequantize_token(quantize_token(token, s), s);
}

}  // namespace aaq
