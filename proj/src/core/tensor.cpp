// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/core/tensor.hpp"

#include <cmath>
#include <string>

#include "aaq/core/error.hpp"
#include "aaq/core/fixed_point.hpp"

namespace aaq {

void require_finite(TokenView values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ContractError(std::string(what) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

ActivationTensor::ActivationTensor(std::size_t ns, std::size_t hz, std::string role)
    : ActivationTensor(ns, hz, std::vector<double>(ns * ns * hz, 0.0), std::move(role)) {}

ActivationTensor::ActivationTensor(std::size_t ns, std::size_t hz, std::vector<double> data, std::string role)
    : ns_(ns), hz_(hz), data_(std::move(data)), role_(std::move(role)) {
    if (ns == 0 || hz == 0) {
        throw ContractError("activation tensor needs Ns >= 1 and Hz >= 1");
    }
    if (data_.size() != ns * ns * hz) {
        throw ContractError("activation tensor data has " + std::to_string(data_.size()) +
                            " elements, expected Ns*Ns*Hz = " + std::to_string(ns * ns * hz));
    }
}

std::vector<TokenView> token_iter(const ActivationTensor& t) {
    std::vector<TokenView> out;
    out.reserve(t.token_count());
    for (std::size_t k = 0; k < t.token_count(); ++k) {
        out.push_back(t.token(k));
    }
    return out;
}

ActivationTensor tensor_from_tokens(std::span<const TokenVector> tokens) {
    if (tokens.empty()) {
        throw ContractError("cannot assemble a tensor from zero tokens");
    }
    const auto ns = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(tokens.size()))));
    if (ns * ns != tokens.size()) {
        throw ContractError("token count " + std::to_string(tokens.size()) + " is not a perfect square");
    }
    const std::size_t hz = tokens.front().size();
    std::vector<double> data;
    data.reserve(tokens.size() * hz);
    for (const auto& tok : tokens) {
        if (tok.size() != hz) {
            throw ContractError("tokens have inconsistent lengths");
        }
        data.insert(data.end(), tok.begin(), tok.end());
    }
    return ActivationTensor(ns, hz, std::move(data));
}

WeightMatrix::WeightMatrix(std::size_t in, std::size_t out, std::span<const double> values, int frac_bits)
    : in_(in), out_(out), frac_bits_(frac_bits) {
    if (values.size() != in * out) {
        throw ContractError("weight matrix expects in*out values");
    }
    const FixedPointFormat q16(16);
    data_.reserve(values.size());
    for (double v : values) {
        data_.push_back(static_cast<std::int16_t>(to_fixed(v, q16, frac_bits)));
    }
}

double WeightMatrix::value(std::size_t r, std::size_t c) const {
    return from_fixed(raw(r, c), frac_bits_);
}

std::vector<double> WeightMatrix::column(std::size_t c) const {
    std::vector<double> col(in_);
    for (std::size_t r = 0; r < in_; ++r) {
        col[r] = value(r, c);
    }
    return col;
}

}  // namespace aaq
