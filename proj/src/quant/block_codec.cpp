// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/quant/block_codec.hpp"

#include <algorithm>
#include <string>

#include "aaq/core/error.hpp"
#include "aaq/core/tensor_io.hpp"

namespace aaq {

namespace {

std::size_t round_up(std::size_t n, std::size_t m) { return (n + m - 1) / m * m; }

std::size_t inlier_bytes(const QuantScheme& s, std::size_t hz) {
    return (( hz - static_cast<std::size_t>(s.outlier_count)) * static_cast<std::size_t>(s.inlier_bits) + 7) / 8;
}

void check_token(const QuantizedToken& t, const QuantScheme& s, std::size_t hz) {
    const auto k = static_cast<std::size_t>(s.outlier_count);
    if (t.outliers.size() != k || t.outlier_indices.size() != k || t.inliers.size() != hz - k) {
        throw ContractError("token shape does not match scheme " + s.to_string());
    }
    const int lo = -(1 << (s.inlier_bits - 1));
    const int hi = (1 << (s.inlier_bits - 1)) - 1;
    for (auto c : t.inliers) {
        if (c < lo || c > hi) {
            throw ContractError("inlier code " + std::to_string(c) + " exceeds " + std::to_string(s.inlier_bits) + " bits");
        }
    }
}

void encode_token(std::vector<std::uint8_t>& out, const QuantizedToken& t, const QuantScheme& s, std::size_t hz) {
    const std::size_t start = out.size();
    out.resize(start + inlier_bytes(s, hz), 0);
    const auto m = static_cast<std::size_t>(s.inlier_bits);
    const std::uint32_t mask = (1u << m) - 1;
    for (std::size_t i = 0; i < t.inliers.size(); ++i) {
        const auto code = static_cast<std::uint32_t>(t.inliers[i]) & mask;
        const std::size_t bit = i * m;
        out[start + bit / 8] |= static_cast<std::uint8_t>(code << (bit % 8));
    }
    for (auto v : t.outliers) put_u16(out, static_cast<std::uint16_t>(v));
    put_u16(out, t.scale_bits);
    out.insert(out.end(), t.outlier_indices.begin(), t.outlier_indices.end());
}

QuantizedToken decode_token(std::span<const std::uint8_t> in, std::size_t off, const QuantScheme& s, std::size_t hz) {
    const auto k = static_cast<std::size_t>(s.outlier_count);
    const auto m = static_cast<std::size_t>(s.inlier_bits);
    QuantizedToken t;
    t.inliers.resize(hz - k);
    const std::uint32_t mask = (1u << m) - 1;
    const std::uint32_t sign = 1u << (m - 1);
    for (std::size_t i = 0; i < t.inliers.size(); ++i) {
        const std::size_t bit = i * m;
        const std::uint32_t raw = (static_cast<std::uint32_t>(in[off + bit / 8]) >> (bit % 8)) & mask;
        t.inliers[i] = static_cast<std::int16_t>((raw & sign) ? static_cast<int>(raw) - static_cast<int>(1u << m)
                                                              : static_cast<int>(raw));
    }
    const std::size_t code_bits = t.inliers.size() * m;
    if (code_bits % 8 != 0) {
        const auto last = in[off + code_bits / 8];
        if ((last >> (code_bits % 8)) != 0) {
            throw CorruptionError("nonzero inlier padding bits", off + code_bits / 8);
        }
    }
    std::size_t p = off + inlier_bytes(s, hz);
    t.outliers.resize(k);
    for (auto& v : t.outliers) {
        v = static_cast<std::int16_t>(get_u16(in, p));
        p += 2;
    }
    t.scale_bits = get_u16(in, p);
    p += 2;
    if ((t.scale_bits & 0x8000) != 0 || (t.scale_bits & 0x7C00) == 0x7C00) {
        throw CorruptionError("scale is negative or not finite", p - 2);
    }
    t.outlier_indices.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::uint8_t idx = in[p + j];
        if (idx >= hz || (j > 0 && idx <= t.outlier_indices[j - 1])) {
            throw CorruptionError("outlier index " + std::to_string(idx) + " out of range or unordered", p + j);
        }
        t.outlier_indices[j] = idx;
    }
    return t;
}

struct Header {
    QuantScheme scheme;
    std::size_t token_count;
    std::size_t total_bytes;
};

Header read_header(std::span<const std::uint8_t> bytes, std::size_t off, std::size_t hz, std::size_t txn) {
    if (bytes.size() < off + kBlockHeaderBytes) {
        throw CorruptionError("truncated block header", bytes.size());
    }
    if (bytes[off] != kBlockMagic) {
        throw CorruptionError("bad block magic", off);
    }
    const QuantScheme s = QuantScheme::from_id(bytes[off + 1]);
    if (static_cast<std::size_t>(s.outlier_count) > hz) {
        throw CorruptionError("scheme outlier count exceeds token length", off + 1);
    }
    const std::size_t count = get_u16(bytes, off + 2);
    return {s, count, block_encoded_bytes(count, s, hz, txn)};
}

std::vector<QuantizedToken> decode_body(std::span<const std::uint8_t> bytes, std::size_t off, const Header& h,
                                        std::size_t hz) {
    const std::size_t tok = token_encoded_bytes(h.scheme, hz);
    std::vector<QuantizedToken> out;
    out.reserve(h.token_count);
    std::size_t p = off + kBlockHeaderBytes;
    for (std::size_t i = 0; i < h.token_count; ++i, p += tok) {
        out.push_back(decode_token(bytes, p, h.scheme, hz));
    }
    for (; p < off + h.total_bytes; ++p) {
        if (bytes[p] != 0) throw CorruptionError("nonzero block padding", p);
    }
    return out;
}

}  // namespace

std::size_t token_encoded_bits(const QuantScheme& s, std::size_t hz) {
    const auto k = static_cast<std::size_t>(s.outlier_count);
    return (hz - k) * static_cast<std::size_t>(s.inlier_bits) + k * QuantScheme::kOutlierBits +
           QuantScheme::kScaleBits + k * QuantScheme::kIndexBits;
}

std::size_t token_encoded_bytes(const QuantScheme& s, std::size_t hz) {
    const auto k = static_cast<std::size_t>(s.outlier_count);
    return inlier_bytes(s, hz) + 2 * k + 2 + k;
}

std::size_t block_encoded_bytes(std::size_t token_count, const QuantScheme& s, std::size_t hz, std::size_t txn_width) {
    return round_up(kBlockHeaderBytes + token_count * token_encoded_bytes(s, hz), txn_width);
}

std::uint64_t stream_encoded_bytes(std::uint64_t token_count, const QuantScheme& s, const BlockLayout& layout) {
    const std::uint64_t full = token_count / layout.tokens_per_block;
    const std::uint64_t rest = token_count % layout.tokens_per_block;
    std::uint64_t bytes = full * block_encoded_bytes(layout.tokens_per_block, s, layout.hz, layout.txn_width);
    if (rest != 0) bytes += block_encoded_bytes(rest, s, layout.hz, layout.txn_width);
    return bytes;
}

TokenBlock encode_block(std::span<const QuantizedToken> tokens, const QuantScheme& s, std::size_t hz,
                        std::size_t txn_width) {
    s.validate(hz);
    if (tokens.size() > 0xFFFF) {
        throw ContractError("a block holds at most 65535 tokens");
    }
    TokenBlock block;
    block.scheme = s;
    block.token_count = static_cast<std::uint16_t>(tokens.size());
    auto& out = block.bytes;
    out.reserve(block_encoded_bytes(tokens.size(), s, hz, txn_width));
    out.push_back(kBlockMagic);
    out.push_back(s.id());
    put_u16(out, block.token_count);
    for (const auto& t : tokens) {
        check_token(t, s, hz);
        encode_token(out, t, s, hz);
    }
    out.resize(round_up(out.size(), txn_width), 0);
    return block;
}

QuantScheme block_scheme(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kBlockHeaderBytes || bytes[0] != kBlockMagic) {
        throw CorruptionError("bad block magic", 0);
    }
    return QuantScheme::from_id(bytes[1]);
}

std::vector<QuantizedToken> decode_block(std::span<const std::uint8_t> bytes, std::size_t hz, std::size_t txn_width) {
    const Header h = read_header(bytes, 0, hz, txn_width);
    if (bytes.size() != h.total_bytes) {
        throw CorruptionError("block of " + std::to_string(bytes.size()) + " bytes inconsistent with token count " +
                                  std::to_string(h.token_count) + " (expected " + std::to_string(h.total_bytes) + ")",
                              2);
    }
    return decode_body(bytes, 0, h, hz);
}

std::vector<std::uint8_t> encode_stream(std::span<const QuantizedToken> tokens, const QuantScheme& s,
                                        const BlockLayout& layout) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < tokens.size(); i += layout.tokens_per_block) {
        const std::size_t n = std::min(layout.tokens_per_block, tokens.size() - i);
        const auto block = encode_block(tokens.subspan(i, n), s, layout.hz, layout.txn_width);
        out.insert(out.end(), block.bytes.begin(), block.bytes.end());
    }
    return out;
}

std::vector<QuantizedToken> decode_stream(std::span<const std::uint8_t> bytes, const BlockLayout& layout) {
    std::vector<QuantizedToken> out;
    std::size_t off = 0;
    while (off < bytes.size()) {
        const Header h = read_header(bytes, off, layout.hz, layout.txn_width);
        if (off + h.total_bytes > bytes.size()) {
            throw CorruptionError("truncated block payload", bytes.size());
        }
        auto tokens = decode_body(bytes, off, h, layout.hz);
        out.insert(out.end(), std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end()));
        off += h.total_bytes;
    }
    return out;
}

}  // namespace aaq
