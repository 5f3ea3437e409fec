// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/quant/stats.hpp"

#include <cmath>

#include "aaq/core/error.hpp"

namespace aaq {

ThreeSigmaStats stats_3sigma(TokenView token) {
    if (token.size() < 2) {
        throw ContractError("3-sigma statistics need at least two values");
    }
    const auto n = static_cast<double>(token.size());
    double sum = 0.0;
    for (double v : token) sum += v;
    ThreeSigmaStats st;
    st.mean = sum / n;
    double ss = 0.0;
    for (double v : token) ss += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(ss / n);
    if (st.stddev == 0.0) return st;
    for (double v : token) {
        if (std::abs(v - st.mean) > 3.0 * st.stddev) ++st.outliers;
    }
    return st;
}

}  // namespace aaq
