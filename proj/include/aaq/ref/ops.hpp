// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "aaq/core/tensor.hpp"

namespace aaq::ref {

inline constexpr double kLayerNormEps = 1e-5;

/// Layer normalization over the token's channels, then gamma * x + beta.
/// Empty gamma/beta mean identity affine. Throws for fewer than 2 channels.
TokenVector layernorm_ref(TokenView t, std::span<const double> gamma = {}, std::span<const double> beta = {});

/// Max-subtracted softmax. Throws ContractError on empty or non-finite input.
std::vector<double> softmax_ref(std::span<const double> v);

double sigmoid(double x);

}  // namespace aaq::ref
