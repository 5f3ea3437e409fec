// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aaq {

inline constexpr int kDefaultHz = 128;

/// One Hz-length slice of the pair tensor; the quantization unit.
using TokenVector = std::vector<double>;
using TokenView = std::span<const double>;

/// Throws ContractError if any value is NaN or infinite.
void require_finite(TokenView values, const char* what);

/// Dense (Ns, Ns, Hz) pair activation, row-major with channel fastest.
class ActivationTensor {
public:
    ActivationTensor() = default;
    ActivationTensor(std::size_t ns, std::size_t hz, std::string role = {});
    ActivationTensor(std::size_t ns, std::size_t hz, std::vector<double> data, std::string role = {});

    std::size_t ns() const noexcept { return ns_; }
    std::size_t hz() const noexcept { return hz_; }
    std::size_t token_count() const noexcept { return ns_ * ns_; }
    const std::string& role() const noexcept { return role_; }
    void set_role(std::string role) { role_ = std::move(role); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double& at(std::size_t i, std::size_t j, std::size_t c) { return data_[index(i, j, c)]; }
    double at(std::size_t i, std::size_t j, std::size_t c) const { return data_[index(i, j, c)]; }

    std::span<double> token(std::size_t i, std::size_t j) { return {data_.data() + index(i, j, 0), hz_}; }
    TokenView token(std::size_t i, std::size_t j) const { return {data_.data() + index(i, j, 0), hz_}; }

    /// Token by flat row-major position i * Ns + j.
    TokenView token(std::size_t flat) const { return {data_.data() + flat * hz_, hz_}; }
    std::span<double> token(std::size_t flat) { return {data_.data() + flat * hz_, hz_}; }

    friend bool operator==(const ActivationTensor& a, const ActivationTensor& b) {
        return a.ns_ == b.ns_ && a.hz_ == b.hz_ && a.data_ == b.data_;
    }

private:
    std::size_t index(std::size_t i, std::size_t j, std::size_t c) const noexcept {
        return (i * ns_ + j) * hz_ + c;
    }

    std::size_t ns_ = 0;
    std::size_t hz_ = 0;
    std::vector<double> data_;
    std::string role_;
};

/// All Ns*Ns tokens in row-major (i, j) order.
std::vector<TokenView> token_iter(const ActivationTensor& t);

/// Inverse of token_iter: reassembles an (Ns, Ns, Hz) tensor. Throws if the
/// token count is not a perfect square or token lengths differ.
ActivationTensor tensor_from_tokens(std::span<const TokenVector> tokens);

/// (in, out) weight matrix stored as 16-bit fixed point sharing one
/// fractional-bit exponent.
class WeightMatrix {
public:
    WeightMatrix() = default;
    /// `values` is row-major (in, out). Values are rounded and saturated.
    WeightMatrix(std::size_t in, std::size_t out, std::span<const double> values, int frac_bits);

    std::size_t in() const noexcept { return in_; }
    std::size_t out() const noexcept { return out_; }
    int frac_bits() const noexcept { return frac_bits_; }

    std::int16_t raw(std::size_t r, std::size_t c) const { return data_[r * out_ + c]; }
    double value(std::size_t r, std::size_t c) const;
    /// Column c as real values (length in()).
    std::vector<double> column(std::size_t c) const;

private:
    std::size_t in_ = 0;
    std::size_t out_ = 0;
    int frac_bits_ = 8;
    std::vector<std::int16_t> data_;
};

}  // namespace aaq
