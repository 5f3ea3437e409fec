// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aaq/core/tensor.hpp"

namespace aaq {

/// Tensor dump layout: "AAQT", u32 Ns, u32 Hz, u32 reserved (0), then
/// Ns*Ns*Hz little-endian IEEE-754 doubles.
inline constexpr std::size_t kTensorHeaderBytes = 16;

std::vector<std::uint8_t> encode_tensor(const ActivationTensor& t);
/// Throws CorruptionError on bad magic or length.
ActivationTensor decode_tensor(std::span<const std::uint8_t> bytes);

void save_tensor(const std::filesystem::path& path, const ActivationTensor& t);
/// Throws IoError if unreadable, CorruptionError if malformed.
ActivationTensor load_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// Little-endian helpers shared by the binary formats.
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t off);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t off);
std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t off);

}  // namespace aaq
