// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "aaq/quant/quantizer.hpp"

namespace aaq::ref {

/// Dot product of a quantized token with a 16-bit fixed-point weight column
/// without dequantizing the token: the integer inlier sum is scaled once,
/// then the outlier contribution is added.
///
/// `weights` are raw int16 values with `weight_frac_bits` fractional bits.
double quantized_dot(const QuantizedToken& q, std::span<const std::int16_t> weights, int weight_frac_bits,
                     const QuantScheme& s);

}  // namespace aaq::ref
