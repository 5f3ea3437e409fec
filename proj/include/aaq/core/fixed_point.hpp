// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace aaq {

/// Signed two's complement integer format used for weights, outliers and
/// quantized inliers. Only 4, 8 and 16 bits exist on the datapath.
class FixedPointFormat {
public:
    /// Throws ContractError unless bits is 4, 8 or 16.
    explicit FixedPointFormat(int bits);

    int bits() const noexcept { return bits_; }
    std::int32_t min() const noexcept { return -(std::int32_t{1} << (bits_ - 1)); }
    std::int32_t max() const noexcept { return (std::int32_t{1} << (bits_ - 1)) - 1; }

    friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;

private:
    int bits_;
};

/// Default fractional bits for unquantized 16-bit values (Q8.8).
inline constexpr int kDefaultFracBits = 8;

/// round(x * 2^frac_bits), half away from zero, saturated to the format range.
std::int32_t to_fixed(double x, FixedPointFormat fmt, int frac_bits);

double from_fixed(std::int32_t value, int frac_bits);

/// Round half away from zero then clamp to [lo, hi].
std::int32_t round_clamp(double x, std::int32_t lo, std::int32_t hi);

}  // namespace aaq
