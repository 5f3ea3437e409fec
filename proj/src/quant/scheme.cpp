// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/quant/scheme.hpp"

#include <charconv>
#include <vector>

#include "aaq/core/error.hpp"

namespace aaq {

std::string_view to_string(ActivationGroup g) {
    switch (g) {
        case ActivationGroup::A: return "A";
        case ActivationGroup::B: return "B";
        case ActivationGroup::C: return "C";
        case ActivationGroup::Unquantized: return "Unquantized";
    }
    return "?";
}

ActivationGroup parse_group(std::string_view s) {
    if (s == "A") return ActivationGroup::A;
    if (s == "B") return ActivationGroup::B;
    if (s == "C") return ActivationGroup::C;
    if (s == "U" || s == "Unquantized") return ActivationGroup::Unquantized;
    throw ContractError("unknown activation group '" + std::string(s) + "'");
}

void QuantScheme::validate(std::size_t hz) const {
    if (inlier_bits != 4 && inlier_bits != 8) {
        throw ContractError("inlier precision must be 4 or 8 bits, got " + std::to_string(inlier_bits));
    }
    if (outlier_count < 0 || static_cast<std::size_t>(outlier_count) > hz) {
        throw ContractError("outlier count " + std::to_string(outlier_count) + " outside [0, " + std::to_string(hz) + "]");
    }
}

std::uint8_t QuantScheme::id() const {
    if (outlier_count < 0 || outlier_count > 0x7F) {
        throw ContractError("outlier count " + std::to_string(outlier_count) + " does not fit the 7-bit scheme id");
    }
    return static_cast<std::uint8_t>((inlier_bits == 8 ? 0x80 : 0x00) | outlier_count);
}

QuantScheme QuantScheme::from_id(std::uint8_t id) {
    return QuantScheme{(id & 0x80) ? 8 : 4, id & 0x7F};
}

std::string QuantScheme::to_string() const {
    return std::to_string(inlier_bits) + ":" + std::to_string(outlier_count);
}

QuantScheme scheme_for_group(ActivationGroup g) {
    switch (g) {
        case ActivationGroup::A: return {8, 4};
        case ActivationGroup::B: return {4, 4};
        case ActivationGroup::C: return {4, 0};
        case ActivationGroup::Unquantized: break;
    }
    throw ContractError("unquantized activations have no quantization scheme");
}

SchemeTable::SchemeTable()
    : schemes_{scheme_for_group(ActivationGroup::A), scheme_for_group(ActivationGroup::B),
               scheme_for_group(ActivationGroup::C)} {}

QuantScheme SchemeTable::at(ActivationGroup g) const {
    if (g == ActivationGroup::Unquantized) {
        throw ContractError("unquantized activations have no quantization scheme");
    }
    return schemes_[static_cast<std::size_t>(g)];
}

void SchemeTable::set(ActivationGroup g, QuantScheme s) {
    if (g == ActivationGroup::Unquantized) {
        throw ContractError("cannot assign a scheme to unquantized activations");
    }
    s.validate(kMaxTokenChannels);
    schemes_[static_cast<std::size_t>(g)] = s;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

int parse_int(std::string_view s, std::string_view spec) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ContractError("malformed scheme spec '" + std::string(spec) + "'");
    }
    return v;
}

}  // namespace

QuantScheme QuantScheme::parse(std::string_view spec) {
    const auto fields = split(spec, ':');
    if (fields.size() != 2) throw ContractError("malformed scheme '" + std::string(spec) + "', expected bits:k");
    QuantScheme s{parse_int(fields[0], spec), parse_int(fields[1], spec)};
    s.validate(kMaxTokenChannels);
    return s;
}

SchemeTable SchemeTable::parse(std::string_view spec) {
    SchemeTable table;
    if (spec.empty()) return table;
    for (auto item : split(spec, ',')) {
        const auto fields = split(item, ':');
        if (fields.size() != 3) {
            throw ContractError("malformed scheme spec '" + std::string(spec) + "', expected G:bits:k entries");
        }
        table.set(parse_group(fields[0]), QuantScheme{parse_int(fields[1], spec), parse_int(fields[2], spec)});
    }
    return table;
}

std::string SchemeTable::to_string() const {
    return "A:" + schemes_[0].to_string() + ",B:" + schemes_[1].to_string() + ",C:" + schemes_[2].to_string();
}

}  // namespace aaq
