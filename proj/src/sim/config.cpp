// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/sim/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "aaq/core/error.hpp"
#include "aaq/core/tensor_io.hpp"

namespace aaq {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    in.imbue(std::locale::classic());
    double out = 0.0;
    in >> out;
    if (!in || !in.eof() || !std::isfinite(out)) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt_double(double d) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(17);
    out << d;
    return out.str();
}

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field uint_field(T RunConfig::*section, std::size_t T::*member) {
    return {[=](RunConfig& c, const std::string& k, const std::string& v) {
                (c.*section).*member = static_cast<std::size_t>(parse_uint(k, v));
            },
            [=](const RunConfig& c) { return std::to_string((c.*section).*member); }};
}

template <typename T>
Field u64_field(T RunConfig::*section, std::uint64_t T::*member) {
    return {[=](RunConfig& c, const std::string& k, const std::string& v) { (c.*section).*member = parse_uint(k, v); },
            [=](const RunConfig& c) { return std::to_string((c.*section).*member); }};
}

template <typename T>
Field double_field(T RunConfig::*section, double T::*member) {
    return {[=](RunConfig& c, const std::string& k, const std::string& v) { (c.*section).*member = parse_double(k, v); },
            [=](const RunConfig& c) { return fmt_double((c.*section).*member); }};
}

template <typename T>
Field bool_field(T RunConfig::*section, bool T::*member) {
    return {[=](RunConfig& c, const std::string& k, const std::string& v) { (c.*section).*member = parse_bool(k, v); },
            [=](const RunConfig& c) { return std::string((c.*section).*member ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> f;
        using S = SimConfig;
        using W = WorkloadConfig;
        using L = TraceLayout;
        f["sim.num_rmpus"] = uint_field(&RunConfig::sim, &S::num_rmpus);
        f["sim.vvpus_per_rmpu"] = uint_field(&RunConfig::sim, &S::vvpus_per_rmpu);
        f["sim.clock_ghz"] = double_field(&RunConfig::sim, &S::clock_ghz);
        f["sim.mem_bandwidth_GBps"] = double_field(&RunConfig::sim, &S::mem_bandwidth_GBps);
        f["sim.mem_txn_bytes"] = uint_field(&RunConfig::sim, &S::mem_txn_bytes);
        f["sim.mem_fixed_overhead_cycles"] = u64_field(&RunConfig::sim, &S::mem_fixed_overhead_cycles);
        f["sim.token_scratchpad_bytes"] = u64_field(&RunConfig::sim, &S::token_scratchpad_bytes);
        f["sim.weight_scratchpad_bytes"] = u64_field(&RunConfig::sim, &S::weight_scratchpad_bytes);
        f["sim.output_scratchpad_bytes"] = u64_field(&RunConfig::sim, &S::output_scratchpad_bytes);
        f["sim.simd_lanes_per_vvpu"] = uint_field(&RunConfig::sim, &S::simd_lanes_per_vvpu);
        f["sim.crossbar_hop_cycles"] = u64_field(&RunConfig::sim, &S::crossbar_hop_cycles);
        f["sim.group_a_two_pass"] = bool_field(&RunConfig::sim, &S::group_a_two_pass);
        f["sim.clusters_per_engine"] = uint_field(&RunConfig::sim, &S::clusters_per_engine);
        f["sim.lanes_per_cluster"] = uint_field(&RunConfig::sim, &S::lanes_per_cluster);
        f["sim.units_per_lane"] = uint_field(&RunConfig::sim, &S::units_per_lane);
        f["workload.hz"] = uint_field(&RunConfig::workload, &W::hz);
        f["workload.tri_mul_hidden"] = uint_field(&RunConfig::workload, &W::tri_mul_hidden);
        f["workload.num_heads"] = uint_field(&RunConfig::workload, &W::num_heads);
        f["workload.head_dim"] = uint_field(&RunConfig::workload, &W::head_dim);
        f["workload.transition_factor"] = uint_field(&RunConfig::workload, &W::transition_factor);
        f["workload.num_blocks"] = uint_field(&RunConfig::workload, &W::num_blocks);
        f["workload.seq_channels"] = uint_field(&RunConfig::workload, &W::seq_channels);
        f["workload.quantize"] = bool_field(&RunConfig::workload, &W::quantize);
        f["workload.streaming_mha"] = bool_field(&RunConfig::workload, &W::streaming_mha);
        f["workload.chunk"] = uint_field(&RunConfig::workload, &W::chunk);
        f["quant.txn_bytes"] = uint_field(&RunConfig::layout, &L::txn_bytes);
        f["quant.tokens_per_block"] = uint_field(&RunConfig::layout, &L::tokens_per_block);
        f["quant.schemes"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                  try {
                                      c.schemes = SchemeTable::parse(v);
                                  } catch (const ContractError& e) {
                                      throw ConfigError(k + ": " + e.what());
                                  }
                              },
                              [](const RunConfig& c) { return c.schemes.to_string(); }};
        return f;
    }();
    return table;
}

}  // namespace

void SimConfig::validate() const {
    auto positive = [](bool ok, const char* key) {
        if (!ok) throw ConfigError(std::string("sim.") + key + " must be positive");
    };
    positive(num_rmpus > 0, "num_rmpus");
    positive(vvpus_per_rmpu > 0, "vvpus_per_rmpu");
    positive(clock_ghz > 0.0, "clock_ghz");
    positive(mem_bandwidth_GBps > 0.0, "mem_bandwidth_GBps");
    positive(mem_txn_bytes > 0, "mem_txn_bytes");
    positive(token_scratchpad_bytes > 0, "token_scratchpad_bytes");
    positive(weight_scratchpad_bytes > 0, "weight_scratchpad_bytes");
    positive(output_scratchpad_bytes > 0, "output_scratchpad_bytes");
    positive(simd_lanes_per_vvpu > 0, "simd_lanes_per_vvpu");
    positive(clusters_per_engine > 0, "clusters_per_engine");
    positive(lanes_per_cluster > 0, "lanes_per_cluster");
    positive(units_per_lane > 0, "units_per_lane");
}

void RunConfig::validate() const {
    sim.validate();
    workload.validate();
    if (layout.txn_bytes == 0) throw ConfigError("quant.txn_bytes must be positive");
    if (layout.tokens_per_block == 0 || layout.tokens_per_block > 65535) {
        throw ConfigError("quant.tokens_per_block must be in [1, 65535]");
    }
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key " + key);
        }
    }
    return out;
}

void apply_key_values(const std::map<std::string, std::string>& kv, RunConfig& cfg) {
    const auto& table = fields();
    for (const auto& [k, v] : kv) {
        const auto it = table.find(k);
        if (it == table.end()) throw ConfigError("unknown config key: " + k);
        it->second.set(cfg, k, v);
    }
    cfg.validate();
}

RunConfig load_run_config(const std::string& path) {
    const auto bytes = read_file(path);
    RunConfig cfg;
    apply_key_values(parse_key_values(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size())),
                     cfg);
    return cfg;
}

std::string to_key_values(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, f] : fields()) out += k + " = " + f.get(cfg) + "\n";
    return out;
}

}  // namespace aaq
