// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "aaq/core/tensor.hpp"
#include "aaq/quant/scheme.hpp"

namespace aaq {

/// Result of top-k outlier extraction on one token.
struct OutlierSplit {
    std::vector<std::uint8_t> indices;  ///< ascending channel positions
    std::vector<double> outliers;       ///< values at `indices`
    std::vector<double> inliers;        ///< remaining values in channel order
};

/// The k entries of largest magnitude; equal magnitudes prefer the lower
/// channel. Throws ContractError if k > token length.
OutlierSplit select_outliers(TokenView token, int k);

/// A token quantized with a symmetric per-token scale.
///
/// Inliers hold round(x / sigma) codes in channel order (outlier channels
/// removed); outliers are Q8.8 16-bit values; the scale is stored as binary16.
struct QuantizedToken {
    std::vector<std::int16_t> inliers;
    std::vector<std::int16_t> outliers;
    std::uint16_t scale_bits = 0;
    std::vector<std::uint8_t> outlier_indices;

    double scale() const;
    std::size_t channels() const noexcept { return inliers.size() + outliers.size(); }

    friend bool operator==(const QuantizedToken&, const QuantizedToken&) = default;
};

/// Fractional bits of the 16-bit outlier payload.
inline constexpr int kOutlierFracBits = 8;

/// Exact (pre-binary16) scale: max|inlier| / (2^(m-1) - 1).
double exact_scale(const OutlierSplit& split, const QuantScheme& s);

/// Throws ContractError on non-finite input or an invalid scheme.
QuantizedToken quantize_token(TokenView token, const QuantScheme& s);

/// Throws CorruptionError if indices are out of range or unordered, or the
/// token shape disagrees with the scheme.
TokenVector dequantize_token(const QuantizedToken& q, const QuantScheme& s);

/// Convenience: quantize then dequantize.
TokenVector fake_quantize(TokenView token, const QuantScheme& s);

}  // namespace aaq
