// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

namespace aaq {

/// Root-mean-square difference. Throws ContractError on empty or
/// mismatched inputs.
double rmse(std::span<const double> a, std::span<const double> b);

double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace aaq
