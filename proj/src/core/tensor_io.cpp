// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/core/tensor_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <string>

#include "aaq/core/error.hpp"

namespace aaq {

namespace {
constexpr std::uint8_t kMagic[4] = {'A', 'A', 'Q', 'T'};
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t off) {
    return static_cast<std::uint16_t>(in[off] | (in[off + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t off) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | in[off + static_cast<std::size_t>(b)];
    return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t off) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | in[off + static_cast<std::size_t>(b)];
    return v;
}

std::vector<std::uint8_t> encode_tensor(const ActivationTensor& t) {
    std::vector<std::uint8_t> out;
    out.reserve(kTensorHeaderBytes + t.data().size() * 8);
    for (std::uint8_t b : kMagic) out.push_back(b);
    put_u32(out, static_cast<std::uint32_t>(t.ns()));
    put_u32(out, static_cast<std::uint32_t>(t.hz()));
    put_u32(out, 0);
    for (double v : t.data()) {
        put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    return out;
}

ActivationTensor decode_tensor(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kTensorHeaderBytes) {
        throw CorruptionError("tensor dump shorter than its header", bytes.size());
    }
    for (std::size_t i = 0; i < 4; ++i) {
        if (bytes[i] != kMagic[i]) throw CorruptionError("bad tensor magic", i);
    }
    const std::size_t ns = get_u32(bytes, 4);
    const std::size_t hz = get_u32(bytes, 8);
    if (ns == 0 || hz == 0) {
        throw CorruptionError("tensor dump declares an empty shape", 4);
    }
    const std::size_t count = ns * ns * hz;
    if (bytes.size() != kTensorHeaderBytes + count * 8) {
        throw CorruptionError("tensor payload length does not match Ns*Ns*Hz", bytes.size());
    }
    std::vector<double> data(count);
    for (std::size_t k = 0; k < count; ++k) {
        data[k] = std::bit_cast<double>(get_u64(bytes, kTensorHeaderBytes + k * 8));
    }
    return ActivationTensor(ns, hz, std::move(data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void save_tensor(const std::filesystem::path& path, const ActivationTensor& t) {
    write_file_atomic(path, encode_tensor(t));
}

ActivationTensor load_tensor(const std::filesystem::path& path) {
    return decode_tensor(read_file(path));
}

}  // namespace aaq
