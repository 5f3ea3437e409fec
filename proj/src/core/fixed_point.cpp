// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/core/fixed_point.hpp"

#include <cmath>
#include <string>

#include "aaq/core/error.hpp"

namespace aaq {

FixedPointFormat::FixedPointFormat(int bits) : bits_(bits) {
    if (bits != 4 && bits != 8 && bits != 16) {
        throw ContractError("fixed-point width must be 4, 8 or 16 bits, got " + std::to_string(bits));
    }
}

std::int32_t round_clamp(double x, std::int32_t lo, std::int32_t hi) {
    if (std::isnan(x)) {
        throw ContractError("cannot round NaN to fixed point");
    }
    // std::round already breaks ties away from zero.
    const double r = std::round(x);
    if (r <= static_cast<double>(lo)) return lo;
    if (r >= static_cast<double>(hi)) return hi;
    return static_cast<std::int32_t>(r);
}

std::int32_t to_fixed(double x, FixedPointFormat fmt, int frac_bits) {
    return round_clamp(std::ldexp(x, frac_bits), fmt.min(), fmt.max());
}

double from_fixed(std::int32_t value, int frac_bits) {
    return std::ldexp(static_cast<double>(value), -frac_bits);
}

}  // namespace aaq
