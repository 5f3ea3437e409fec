// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aaq/core/error.hpp"

namespace aaq {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ContractError("length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    if (a.empty()) {
        throw ContractError("metric over empty sequences");
    }
}

}  // namespace

double rmse(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

}  // namespace aaq
