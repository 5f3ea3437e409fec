// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aaq {

/// Violated precondition of a public operation (bad sizes, out-of-range
/// parameters, mismatched schemes).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed serialized data. Carries the byte offset where decoding failed.
class CorruptionError : public std::runtime_error {
public:
    CorruptionError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Invalid or unsatisfiable configuration (e.g. a tile that cannot fit a scratchpad).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File system failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aaq
