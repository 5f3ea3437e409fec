// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/cli/fixtures.hpp"

#include <cstdint>
#include <functional>
#include <map>

#include "aaq/core/error.hpp"
#include "aaq/core/metrics.hpp"
#include "aaq/core/rng.hpp"
#include "aaq/core/tensor_io.hpp"
#include "aaq/graph/folding_block.hpp"
#include "aaq/quant/block_codec.hpp"
#include "aaq/quant/corpus.hpp"
#include "aaq/ref/triangular.hpp"
#include "aaq/sim/rmpu.hpp"
#include "aaq/sim/simulator.hpp"
#include "json.hpp"

namespace aaq {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kWeightSeedSalt = 0x5eedULL;

ActivationTensor random_pair(std::size_t ns, std::size_t hz, std::uint64_t seed) {
    Rng rng(seed);
    ActivationTensor t(ns, hz);
    for (double& x : t.data()) x = rng.normal();
    return t;
}

ref::TriMulDirection parse_direction(const std::string& s) {
    if (s == "outgoing") return ref::TriMulDirection::Outgoing;
    if (s == "incoming") return ref::TriMulDirection::Incoming;
    throw ContractError("unknown direction " + s);
}

ref::TriAttnNode parse_node(const std::string& s) {
    if (s == "starting") return ref::TriAttnNode::Starting;
    if (s == "ending") return ref::TriAttnNode::Ending;
    throw ContractError("unknown attention node " + s);
}

ActivationTensor run_tri_mul(const json& f, const ActivationTensor& z) {
    Rng rng(f.at("seed").get<std::uint64_t>() ^ kWeightSeedSalt);
    const auto w = ref::TriMulWeights::random(f.at("hz").get<std::size_t>(), f.at("hidden").get<std::size_t>(), rng);
    return ref::triangular_multiplication_ref(z, w, parse_direction(f.at("direction").get<std::string>()));
}

ref::AttentionParams attention_params(const json& f) {
    ref::AttentionParams p;
    p.hz = f.at("hz").get<std::size_t>();
    p.num_heads = f.at("heads").get<std::size_t>();
    p.head_dim = p.hz / p.num_heads;
    return p;
}

ref::TriAttnWeights attention_weights(const json& f) {
    Rng rng(f.at("seed").get<std::uint64_t>() ^ kWeightSeedSalt);
    return ref::TriAttnWeights::random(attention_params(f), rng);
}

std::vector<QuantizedToken> quantize_all(const ActivationTensor& t, const QuantScheme& s) {
    std::vector<QuantizedToken> q;
    for (std::size_t i = 0; i < t.token_count(); ++i) q.push_back(quantize_token(t.token(i), s));
    return q;
}

BlockLayout fixture_layout(std::size_t hz) { return BlockLayout{hz, kDefaultTxnBytes, kDefaultTokensPerBlock}; }

void compare_tensors(const ActivationTensor& got, const ActivationTensor& want, double tol) {
    if (got.ns() != want.ns() || got.hz() != want.hz()) throw ContractError("shape mismatch");
    const double err = max_abs_diff(got.data(), want.data());
    if (!(err <= tol)) throw ContractError("max abs error " + std::to_string(err) + " exceeds " + std::to_string(tol));
}

std::string check_tri_mul(const fs::path& dir, const json& f) {
    const auto z = load_tensor(dir / f.at("input").get<std::string>());
    const auto want = load_tensor(dir / f.at("expected").get<std::string>());
    compare_tensors(run_tri_mul(f, z), want, f.at("tolerance").get<double>());
    return "ok";
}

std::string check_tri_att(const fs::path& dir, const json& f) {
    const auto z = load_tensor(dir / f.at("input").get<std::string>());
    const auto want = load_tensor(dir / f.at("expected").get<std::string>());
    // The stored reference is the materialized path; replay with the streaming one.
    const auto got = ref::tokenwise_mha_ref(z, attention_params(f), attention_weights(f),
                                            parse_node(f.at("node").get<std::string>()));
    compare_tensors(got, want, f.at("tolerance").get<double>());
    return "ok";
}

std::string check_layout(const fs::path& dir, const json& f) {
    const auto input = load_tensor(dir / f.at("input").get<std::string>());
    const auto stored = read_file(dir / f.at("expected").get<std::string>());
    const QuantScheme s = QuantScheme::parse(f.at("scheme").get<std::string>());
    const auto layout = fixture_layout(input.hz());
    if (token_encoded_bytes(s, input.hz()) != f.at("token_bytes").get<std::size_t>()) {
        throw ContractError("per-token size differs from " + f.at("token_bytes").dump());
    }
    const auto decoded = decode_stream(stored, layout);
    if (decoded != quantize_all(input, s)) throw ContractError("decoded tokens differ from requantized input");
    if (encode_stream(decoded, s, layout) != stored) throw ContractError("re-encoding is not byte identical");
    return "ok";
}

std::string check_lanes(const json& f) {
    SimConfig cfg;
    for (const json& c : f.at("cases")) {
        const int bits = c.at("bits").get<int>();
        const int k = c.at("outliers").get<int>();
        const std::uint64_t units = dot_units(bits, k, 16, 128);
        if (units != c.at("units").get<std::uint64_t>()) {
            throw ContractError("units for " + c.dump() + " computed as " + std::to_string(units));
        }
        std::vector<std::size_t> lanes;
        std::vector<std::string> modes;
        for (const auto& j : decompose_dot(bits, k, 16, 128)) {
            lanes.push_back(j.lanes);
            modes.emplace_back(to_string(j.mode));
        }
        if (lanes != c.at("lanes").get<std::vector<std::size_t>>() ||
            modes != c.at("modes").get<std::vector<std::string>>()) {
            throw ContractError("lane split for " + c.dump() + " differs");
        }
    }
    const auto c_jobs = decompose_dot(4, 0, 16, 128);
    if (groups_per_engine_cycle(c_jobs, cfg) != f.at("scheme_c_tokens_per_engine_cycle").get<std::uint64_t>()) {
        throw ContractError("scheme C tokens per engine cycle differs");
    }
    return "ok";
}

SimReport default_sim(std::size_t ns) {
    const RunConfig cfg;
    const Trace t = emit_trace(build_folding_block(ns, cfg.workload), cfg.schemes, cfg.layout);
    return simulate_trace(t, cfg.sim, cfg.workload.num_blocks);
}

std::string check_sim(const json& f) {
    const SimReport r = default_sim(f.at("ns").get<std::size_t>());
    if (r.block_cycles != f.at("block_cycles").get<std::uint64_t>()) {
        throw ContractError("block cycles " + std::to_string(r.block_cycles) + " != " + f.at("block_cycles").dump());
    }
    if (r.traffic_bytes != f.at("traffic_bytes").get<std::uint64_t>()) {
        throw ContractError("traffic bytes " + std::to_string(r.traffic_bytes) + " != " + f.at("traffic_bytes").dump());
    }
    return "ok";
}

}  // namespace

void generate_fixtures(const fs::path& dir) {
    fs::create_directories(dir);
    json list = json::array();

    // Triangular multiplication, Ns=4, Hz=8.
    {
        const auto z = random_pair(4, 8, 11);
        save_tensor(dir / "tri_mul_input.aaqt", z);
        for (const char* d : {"outgoing", "incoming"}) {
            json f = {{"name", std::string("tri_mul_") + d}, {"type", "tri_mul"}, {"ns", 4},  {"hz", 8},
                      {"hidden", 8}, {"seed", 11}, {"direction", d}, {"input", "tri_mul_input.aaqt"},
                      {"expected", std::string("tri_mul_") + d + ".aaqt"}, {"tolerance", 1e-12}};
            save_tensor(dir / f["expected"].get<std::string>(), run_tri_mul(f, z));
            list.push_back(f);
        }
    }
    // Triangular attention, Ns=4, Hz=8, 2 heads; expected from the materialized path.
    {
        const auto z = random_pair(4, 8, 13);
        save_tensor(dir / "tri_att_input.aaqt", z);
        for (const char* n : {"starting", "ending"}) {
            json f = {{"name", std::string("tri_att_") + n}, {"type", "tri_att"}, {"ns", 4},  {"hz", 8},
                      {"heads", 2}, {"seed", 13}, {"node", n}, {"input", "tri_att_input.aaqt"},
                      {"expected", std::string("tri_att_") + n + ".aaqt"}, {"tolerance", 1e-10}};
            const auto out =
                ref::triangular_attention_ref(z, attention_params(f), attention_weights(f), parse_node(n));
            save_tensor(dir / f["expected"].get<std::string>(), out);
            list.push_back(f);
        }
    }
    // Block layout of 16 heavy-tailed tokens per scheme.
    {
        const auto tokens = heavy_tailed_corpus(16, 17);
        const auto t = tensor_from_tokens(tokens);
        save_tensor(dir / "layout_input.aaqt", t);
        for (const auto& [name, scheme] : std::map<std::string, QuantScheme>{{"A", {8, 4}}, {"B", {4, 4}}, {"C", {4, 0}}}) {
            const auto bytes = encode_stream(quantize_all(t, scheme), scheme, fixture_layout(t.hz()));
            write_file_atomic(dir / ("layout_" + name + ".bin"), bytes);
            list.push_back({{"name", "layout_" + name},
                            {"type", "layout"},
                            {"scheme", scheme.to_string()},
                            {"token_bytes", token_encoded_bytes(scheme, t.hz())},
                            {"input", "layout_input.aaqt"},
                            {"expected", "layout_" + name + ".bin"}});
        }
    }
    // Lane requirements of 128-channel tokens against 16-bit weights.
    {
        json cases = json::array();
        for (const auto& [bits, k] : std::vector<std::pair<int, int>>{{4, 4}, {4, 0}, {16, 0}, {8, 4}}) {
            json lanes = json::array();
            json modes = json::array();
            for (const auto& j : decompose_dot(bits, k, 16, 128)) {
                lanes.push_back(j.lanes);
                modes.push_back(std::string(to_string(j.mode)));
            }
            cases.push_back({{"bits", bits}, {"outliers", k}, {"units", dot_units(bits, k, 16, 128)},
                             {"lanes", lanes}, {"modes", modes}});
        }
        list.push_back({{"name", "lane_counts"},
                        {"type", "lanes"},
                        {"cases", cases},
                        {"scheme_c_tokens_per_engine_cycle", groups_per_engine_cycle(decompose_dot(4, 0, 16, 128), {})}});
    }
    // Default-configuration folding block at Ns=64.
    {
        const SimReport r = default_sim(64);
        list.push_back({{"name", "sim_ns64"},
                        {"type", "sim"},
                        {"ns", 64},
                        {"block_cycles", r.block_cycles},
                        {"traffic_bytes", r.traffic_bytes}});
    }
    write_text_atomic(dir / kFixtureIndex, json{{"version", 1}, {"fixtures", list}}.dump(2) + "\n");
}

std::vector<FixtureResult> verify_fixtures(const fs::path& dir) {
    json index;
    try {
        const auto bytes = read_file(dir / kFixtureIndex);
        index = json::parse(bytes.begin(), bytes.end());
        if (!index.contains("fixtures") || !index["fixtures"].is_array()) throw ContractError("no fixture list");
    } catch (const std::exception& e) {
        return {{kFixtureIndex, false, e.what()}};
    }
    std::vector<FixtureResult> results;
    for (const json& f : index["fixtures"]) {
        FixtureResult r;
        r.name = f.value("name", std::string("<unnamed>"));
        try {
            const std::string type = f.at("type").get<std::string>();
            if (type == "tri_mul") {
                r.detail = check_tri_mul(dir, f);
            } else if (type == "tri_att") {
                r.detail = check_tri_att(dir, f);
            } else if (type == "layout") {
                r.detail = check_layout(dir, f);
            } else if (type == "lanes") {
                r.detail = check_lanes(f);
            } else if (type == "sim") {
                r.detail = check_sim(f);
            } else {
                throw ContractError("unknown fixture type " + type);
            }
            r.passed = true;
        } catch (const std::exception& e) {
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace aaq
