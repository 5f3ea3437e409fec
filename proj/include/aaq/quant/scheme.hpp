// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aaq {

/// Outlier indices are stored as u8, so a token holds at most 256 channels.
inline constexpr std::size_t kMaxTokenChannels = 256;

/// Static activation classes. A: residual-carried, before LayerNorm.
/// B: after LayerNorm, before a Linear. C: every other quantized edge.
/// Unquantized: edges kept in 16-bit (intra-attention scores).
enum class ActivationGroup : std::uint8_t { A, B, C, Unquantized };

std::string_view to_string(ActivationGroup g);
/// Accepts "A", "B", "C", "U"/"Unquantized".
ActivationGroup parse_group(std::string_view s);

/// Precision and outlier budget of one quantized token.
struct QuantScheme {
    int inlier_bits = 4;    ///< 4 or 8
    int outlier_count = 0;  ///< k, number of 16-bit outliers per token
    static constexpr int kOutlierBits = 16;
    static constexpr int kScaleBits = 16;
    static constexpr int kIndexBits = 8;

    /// Throws ContractError unless inlier_bits is 4/8 and 0 <= k <= hz.
    void validate(std::size_t hz) const;

    /// Largest inlier code magnitude, 2^(m-1) - 1.
    int max_code() const noexcept { return (1 << (inlier_bits - 1)) - 1; }

    /// Serialized scheme id: bit 7 set for 8-bit inliers, bits 0..6 = k.
    std::uint8_t id() const;
    static QuantScheme from_id(std::uint8_t id);

    std::string to_string() const;  ///< e.g. "8:4"
    /// Inverse of to_string. Throws ContractError on malformed input.
    static QuantScheme parse(std::string_view spec);

    friend bool operator==(const QuantScheme&, const QuantScheme&) = default;
};

/// Default scheme of a quantized group: A -> (8, 4), B -> (4, 4), C -> (4, 0).
/// Throws ContractError for Unquantized.
QuantScheme scheme_for_group(ActivationGroup g);

/// Per-group scheme assignment with overrides for design-space sweeps.
class SchemeTable {
public:
    SchemeTable();  ///< group defaults

    QuantScheme at(ActivationGroup g) const;
    void set(ActivationGroup g, QuantScheme s);

    /// Parses "A:8:4,B:4:4,C:4:0"; unspecified groups keep defaults.
    static SchemeTable parse(std::string_view spec);
    std::string to_string() const;

    friend bool operator==(const SchemeTable&, const SchemeTable&) = default;

private:
    std::array<QuantScheme, 3> schemes_;
};

}  // namespace aaq
