// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aaq/quant/quantizer.hpp"
#include "aaq/quant/scheme.hpp"

namespace aaq {

// Token block wire format (all multi-byte fields little-endian):
//
//   byte 0      magic 0xA9
//   byte 1      scheme id (bit 7: 8-bit inliers, bits 0-6: outlier count)
//   bytes 2-3   token count (u16)
//   payload     token_count encoded tokens, each byte aligned:
//                 inlier codes, m-bit two's complement packed LSB first
//                 (zero nibble pad when the code bits are not a byte multiple)
//                 outliers, int16 Q8.8
//                 scale, binary16
//                 outlier indices, u8
//   tail        zero padding up to a multiple of the transaction width

inline constexpr std::uint8_t kBlockMagic = 0xA9;
inline constexpr std::size_t kBlockHeaderBytes = 4;
inline constexpr std::size_t kDefaultTxnBytes = 64;
inline constexpr std::size_t kDefaultTokensPerBlock = 256;

/// (hz-k)*m + 16k + 16 + 8k.
std::size_t token_encoded_bits(const QuantScheme& s, std::size_t hz);
/// Byte-aligned size of one encoded token.
std::size_t token_encoded_bytes(const QuantScheme& s, std::size_t hz);
/// Header plus payload rounded up to the transaction width.
std::size_t block_encoded_bytes(std::size_t token_count, const QuantScheme& s, std::size_t hz, std::size_t txn_width);

struct BlockLayout {
    std::size_t hz = 128;
    std::size_t txn_width = kDefaultTxnBytes;
    std::size_t tokens_per_block = kDefaultTokensPerBlock;
};

/// Bytes of `token_count` tokens split into blocks of at most
/// layout.tokens_per_block tokens.
std::uint64_t stream_encoded_bytes(std::uint64_t token_count, const QuantScheme& s, const BlockLayout& layout);

struct TokenBlock {
    QuantScheme scheme;
    std::uint16_t token_count = 0;
    std::vector<std::uint8_t> bytes;  ///< full encoding incl. header and padding
};

/// Throws ContractError if a token does not match `s` or there are more
/// than 65535 tokens.
TokenBlock encode_block(std::span<const QuantizedToken> tokens, const QuantScheme& s, std::size_t hz,
                        std::size_t txn_width = kDefaultTxnBytes);

/// Decodes exactly one block occupying all of `bytes`. Throws
/// CorruptionError (with byte offset) on bad magic, inconsistent length,
/// nonzero padding or invalid outlier indices.
std::vector<QuantizedToken> decode_block(std::span<const std::uint8_t> bytes, std::size_t hz,
                                         std::size_t txn_width = kDefaultTxnBytes);

/// Scheme recorded in a block header.
QuantScheme block_scheme(std::span<const std::uint8_t> bytes);

/// Concatenated blocks.
std::vector<std::uint8_t> encode_stream(std::span<const QuantizedToken> tokens, const QuantScheme& s,
                                        const BlockLayout& layout);
std::vector<QuantizedToken> decode_stream(std::span<const std::uint8_t> bytes, const BlockLayout& layout);

}  // namespace aaq
