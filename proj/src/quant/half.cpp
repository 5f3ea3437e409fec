// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/quant/half.hpp"

#include <cmath>

namespace aaq {

std::uint16_t double_to_half(double x) {
    const std::uint16_t sign = std::signbit(x) ? 0x8000 : 0x0000;
    if (std::isnan(x)) return 0x7E00;
    const double a = std::fabs(x);
    // Halfway between 65504 and the next (nonexistent) step rounds to inf.
    if (a >= 65520.0) return static_cast<std::uint16_t>(sign | 0x7C00);
    if (a < 0x1.0p-14) {
        // Subnormal: units of 2^-24. nearbyint honours the default
        // round-to-nearest-even mode; 1024 rolls over into the min normal.
        const auto m = static_cast<std::uint16_t>(std::nearbyint(a * 0x1.0p24));
        return static_cast<std::uint16_t>(sign | m);
    }
    int e2 = 0;
    const double f = std::frexp(a, &e2);  // a = f * 2^e2, f in [0.5, 1)
    int exponent = e2 - 1;
    auto mant = static_cast<std::uint32_t>(std::nearbyint((f * 2.0 - 1.0) * 1024.0));
    if (mant == 1024) {
        mant = 0;
        ++exponent;
    }
    const int biased = exponent + 15;
    if (biased >= 31) return static_cast<std::uint16_t>(sign | 0x7C00);
    return static_cast<std::uint16_t>(sign | (biased << 10) | mant);
}

double half_to_double(std::uint16_t bits) {
    const bool neg = (bits & 0x8000) != 0;
    const int exponent = (bits >> 10) & 0x1F;
    const int mant = bits & 0x3FF;
    double v = 0.0;
    if (exponent == 0) {
        v = std::ldexp(static_cast<double>(mant), -24);
    } else if (exponent == 31) {
        v = mant == 0 ? INFINITY : NAN;
    } else {
        v = std::ldexp(1.0 + mant / 1024.0, exponent - 15);
    }
    return neg ? -v : v;
}

std::uint16_t double_to_half_saturating(double x) {
    const std::uint16_t h = double_to_half(x);
    if ((h & 0x7FFF) == 0x7C00) {
        return static_cast<std::uint16_t>((h & 0x8000) | 0x7BFF);
    }
    return h;
}

}  // namespace aaq
