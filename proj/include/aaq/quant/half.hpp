// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace aaq {

/// IEEE-754 binary16 encode with round-to-nearest-even. Overflow maps to
/// infinity, NaN to a quiet NaN.
std::uint16_t double_to_half(double x);

double half_to_double(std::uint16_t bits);

/// Like double_to_half but saturates finite overflow to the largest finite
/// half (65504) instead of infinity. Used for scaling factors.
std::uint16_t double_to_half_saturating(double x);

inline constexpr double kHalfMax = 65504.0;

}  // namespace aaq
