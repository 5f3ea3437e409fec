// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aaq/core/tensor.hpp"

namespace aaq {

struct HeavyTailSpec {
    std::size_t hz = 128;
    std::size_t outliers = 4;    ///< injected channels per token
    double stddev = 1.0;         ///< of the Gaussian inliers
    double min_multiple = 10.0;  ///< outlier magnitude range, in stddevs
    double max_multiple = 50.0;
};

/// Tokens of Gaussian inliers with `outliers` channels at distinct random
/// positions replaced by +-U(min, max) * stddev. Deterministic in `seed`.
std::vector<TokenVector> heavy_tailed_corpus(std::size_t count, std::uint64_t seed, const HeavyTailSpec& spec = {});

}  // namespace aaq
