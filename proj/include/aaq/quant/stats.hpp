// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "aaq/core/tensor.hpp"

namespace aaq {

struct ThreeSigmaStats {
    double mean = 0.0;
    double stddev = 0.0;  ///< population standard deviation
    std::size_t outliers = 0;
};

/// Counts entries with |x - mean| > 3 * stddev. A constant token has no
/// outliers. Throws ContractError for fewer than two values.
ThreeSigmaStats stats_3sigma(TokenView token);

}  // namespace aaq
