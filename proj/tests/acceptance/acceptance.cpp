// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aaq/cli/commands.hpp"
#include "aaq/core/metrics.hpp"
#include "aaq/core/rng.hpp"
#include "aaq/core/tensor_io.hpp"
#include "aaq/cost/cost_model.hpp"
#include "aaq/graph/folding_block.hpp"
#include "aaq/quant/block_codec.hpp"
#include "aaq/quant/corpus.hpp"
#include "aaq/quant/quantizer.hpp"
#include "aaq/ref/triangular.hpp"
#include "aaq/sim/rmpu.hpp"
#include "aaq/sim/simulator.hpp"
#include "aaq/sim/sweep.hpp"

using namespace aaq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const QuantScheme kSchemes[] = {{8, 4}, {4, 4}, {4, 0}};

TokenVector mixed_token(Rng& rng) {
    TokenVector t(128);
    const double scale = std::pow(10.0, rng.uniform(-3.0, 2.0));
    const auto shape = rng.below(3);
    for (double& v : t) v = shape == 1 ? rng.uniform(-scale, scale) : rng.normal(0.0, scale);
    if (shape == 2) {
        for (int i = 0; i < 4; ++i) t[rng.below(128)] = scale * rng.uniform(10.0, 50.0) * (rng.below(2) ? 1 : -1);
    }
    return t;
}

Outcome eq1_conformance() {
    Outcome o;
    Rng rng(1001);
    std::size_t violations = 0;
    std::size_t checked = 0;
    for (int i = 0; i < 100000; ++i) {
        const QuantScheme& s = kSchemes[i % 3];
        const TokenVector t = mixed_token(rng);
        const auto split = select_outliers(t, s.outlier_count);
        const double sigma = exact_scale(split, s);
        const auto q = quantize_token(t, s);
        const auto back = dequantize_token(q, s);
        std::size_t o_idx = 0;
        std::size_t in_idx = 0;
        for (std::size_t c = 0; c < 128; ++c) {
            if (o_idx < q.outlier_indices.size() && q.outlier_indices[o_idx] == c) {
                ++o_idx;
                continue;
            }
            const std::int16_t code = q.inliers[in_idx++];
            const double bound = sigma / 2.0 + std::abs(q.scale() - sigma) * std::abs(code);
            ++checked;
            if (std::abs(back[c] - t[c]) > bound * (1.0 + 1e-12) + 1e-300) ++violations;
        }
    }
    o.require(violations == 0, std::to_string(violations) + " bound violations");
    o.detail = std::to_string(checked) + " inliers, " + std::to_string(violations) + " violations" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome layout_bijection() {
    Outcome o;
    Rng rng(2002);
    const BlockLayout layout{};
    const std::size_t expected[] = {138, 76, 66};
    for (int si = 0; si < 3; ++si) {
        const QuantScheme& s = kSchemes[si];
        o.require(token_encoded_bytes(s, 128) == expected[si],
                  "scheme " + s.to_string() + " token is " + std::to_string(token_encoded_bytes(s, 128)) + " bytes");
        std::vector<QuantizedToken> tokens;
        tokens.reserve(10000);
        for (int i = 0; i < 10000; ++i) tokens.push_back(quantize_token(mixed_token(rng), s));
        const auto bytes = encode_stream(tokens, s, layout);
        const auto back = decode_stream(bytes, layout);
        o.require(back == tokens, "scheme " + s.to_string() + " decode differs");
        o.require(encode_stream(back, s, layout) == bytes, "scheme " + s.to_string() + " re-encode differs");
        o.require(bytes.size() == stream_encoded_bytes(10000, s, layout), "stream size arithmetic");
    }
    o.detail = "A/B/C = 138/76/66 bytes, 3x10^4 tokens round-tripped" + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome resource_arithmetic() {
    Outcome o;
    o.require(units_required(QuantScheme{4, 4}, 16, 128) == 560, "units(B) != 560");
    o.require(lanes_required(512).lanes == 4, "512 units != 4 lanes");
    o.require(lanes_required(560).lanes == 5, "560 units != 5 lanes");
    o.require(lanes_required(2048).lanes == 16, "2048 units != 16 lanes");
    SimConfig one;
    one.num_rmpus = 1;
    DotWork d;
    d.dots = 20000;
    d.length = 128;
    d.lhs_bits = 4;
    d.rhs_bits = 16;
    const auto cost = rmpu_cycles({&d, 1}, one);
    const double per_cycle = static_cast<double>(d.dots) / static_cast<double>(cost.engine_cycles);
    o.require(per_cycle == 20.0, "scheme-C throughput " + fmt("%.3f", per_cycle));
    o.detail = "units(B)=560, lanes 4/5/16, " + fmt("%.0f", per_cycle) + " tokens/engine/cycle" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome outlier_ablation() {
    Outcome o;
    const auto corpus = heavy_tailed_corpus(10000, 3003);
    const QuantScheme k4{4, 4};
    const QuantScheme k0{4, 0};
    std::size_t wins = 0;
    double sum4 = 0.0;
    double sum0 = 0.0;
    for (const TokenVector& t : corpus) {
        const double e4 = rmse(t, fake_quantize(t, k4));
        const double e0 = rmse(t, fake_quantize(t, k0));
        wins += e4 < e0 ? 1 : 0;
        sum4 += e4;
        sum0 += e0;
    }
    const double frac = static_cast<double>(wins) / static_cast<double>(corpus.size());
    const double ratio = sum4 / sum0;
    o.require(frac >= 0.99, "k=4 better on only " + fmt("%.4f", frac));
    o.require(ratio < 0.6, "mean RMSE ratio " + fmt("%.4f", ratio));
    o.detail = "k=4 better on " + fmt("%.2f", 100.0 * frac) + "% of tokens, mean RMSE ratio " + fmt("%.4f", ratio) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome streaming_mha() {
    Outcome o;
    double worst = 0.0;
    struct Toy {
        std::size_t ns, heads, head_dim;
    };
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> peaks;
    for (const Toy& toy : {Toy{4, 2, 4}, Toy{16, 4, 8}, Toy{32, 4, 32}, Toy{64, 4, 32}}) {
        const ref::AttentionParams p{toy.heads, toy.head_dim, toy.heads * toy.head_dim};
        Rng rng(5000 + toy.ns);
        ActivationTensor z(toy.ns, p.hz);
        for (double& v : z.data()) v = rng.normal();
        for (auto node : {ref::TriAttnNode::Starting, ref::TriAttnNode::Ending}) {
            const auto w = ref::TriAttnWeights::random(p, rng);
            ref::BufferMeter naive;
            ref::BufferMeter streaming;
            const auto a = ref::triangular_attention_ref(z, p, w, node, {}, &naive);
            const auto b = ref::tokenwise_mha_ref(z, p, w, node, {}, &streaming);
            worst = std::max(worst, max_abs_diff(a.data(), b.data()));
            if (p.head_dim == 32) peaks[toy.ns] = {naive.peak, streaming.peak};
            o.require(streaming.peak <= toy.ns * p.num_heads * (p.head_dim + 2),
                      "streaming buffer above Ns*head_dim bound at Ns=" + std::to_string(toy.ns));
            o.require(naive.peak >= toy.ns * toy.ns, "materialized buffer below Ns^2 at Ns=" + std::to_string(toy.ns));
        }
    }
    o.require(worst <= 1e-10, "max difference " + fmt("%.3e", worst));
    // Doubling Ns: materialized buffer grows 4x, streaming buffer 2x.
    const double naive_growth = static_cast<double>(peaks[64].first) / static_cast<double>(peaks[32].first);
    const double stream_growth = static_cast<double>(peaks[64].second) / static_cast<double>(peaks[32].second);
    o.require(std::abs(naive_growth - 4.0) < 0.01, "materialized growth " + fmt("%.3f", naive_growth));
    o.require(std::abs(stream_growth - 2.0) < 0.01, "streaming growth " + fmt("%.3f", stream_growth));
    o.detail = "max |diff| " + fmt("%.2e", worst) + ", buffer growth x" + fmt("%.2f", stream_growth) +
               " streaming vs x" + fmt("%.2f", naive_growth) + " materialized per Ns doubling" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome scaling_exponents() {
    Outcome o;
    const CostConfig cfg;
    std::vector<double> xs, pair, score, weights;
    for (std::size_t ns : {64, 128, 256, 512, 1024}) {
        const auto aaq = cost_report(ns, Variant::Aaq, cfg);
        const auto van = cost_report(ns, Variant::Vanilla, cfg);
        xs.push_back(static_cast<double>(ns));
        pair.push_back(static_cast<double>(aaq.peak_activation_bytes));
        score.push_back(static_cast<double>(van.score_bytes));
        weights.push_back(static_cast<double>(van.weight_bytes));
    }
    const double sp = fit_scaling_exponent(xs, pair);
    const double ss = fit_scaling_exponent(xs, score);
    const double sw = fit_scaling_exponent(xs, weights);
    o.require(std::abs(sp - 2.0) <= 0.05, "pair slope " + fmt("%.4f", sp));
    o.require(std::abs(ss - 3.0) <= 0.05, "score slope " + fmt("%.4f", ss));
    o.require(std::abs(sw) <= 0.01, "weight slope " + fmt("%.4f", sw));
    o.detail = "slopes pair " + fmt("%.4f", sp) + ", score " + fmt("%.4f", ss) + ", weights " + fmt("%.4f", sw) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome calibration() {
    Outcome o;
    const CostConfig cfg;
    const auto v2034 = cost_report(2034, Variant::Vanilla, cfg);
    const double peak_gb = static_cast<double>(v2034.peak_bytes) / 1e9;
    const double ratio = static_cast<double>(v2034.peak_activation_bytes) / static_cast<double>(v2034.weight_bytes);
    o.require(peak_gb >= 144.0 * 0.75 && peak_gb <= 144.0 * 1.25, "vanilla peak " + fmt("%.2f", peak_gb) + " GB");
    o.require(ratio >= 24.15 * 0.7 && ratio <= 24.15 * 1.3, "activation/weight " + fmt("%.2f", ratio));

    double foot_min = 100.0, foot_max = 0.0, foot_sum = 0.0;
    double ops_min = 100.0, ops_max = 0.0;
    int n = 0;
    for (std::size_t ns : {256, 512, 1024, 2048}) {
        const auto van = cost_report(ns, Variant::Vanilla, cfg);
        const auto aaq = cost_report(ns, Variant::Aaq, cfg);
        const double foot = 100.0 * (1.0 - static_cast<double>(aaq.shared_footprint_bytes) /
                                               static_cast<double>(van.shared_footprint_bytes));
        const double ops = 100.0 * (1.0 - aaq.int8_ops / van.int8_ops);
        foot_min = std::min(foot_min, foot);
        foot_max = std::max(foot_max, foot);
        foot_sum += foot;
        ops_min = std::min(ops_min, ops);
        ops_max = std::max(ops_max, ops);
        ++n;
    }
    o.require(foot_min >= 65.0 && foot_max <= 80.0,
              "footprint reduction " + fmt("%.2f", foot_min) + ".." + fmt("%.2f", foot_max) + "%");
    o.require(ops_min >= 35.0 && ops_max <= 50.0,
              "INT8 reduction " + fmt("%.2f", ops_min) + ".." + fmt("%.2f", ops_max) + "%");

    double prev = 0.0;
    double peak_ratio = 0.0;
    for (std::size_t ns : {256, 512, 1024, 2048, 4096}) {
        peak_ratio = static_cast<double>(peak_memory(ns, Variant::Vanilla, cfg)) /
                     static_cast<double>(peak_memory(ns, Variant::Aaq, cfg));
        o.require(peak_ratio > prev, "peak ratio not increasing at Ns=" + std::to_string(ns));
        prev = peak_ratio;
    }
    o.require(peak_ratio > 50.0, "peak ratio at 4096 " + fmt("%.2f", peak_ratio));
    o.detail = "vanilla peak " + fmt("%.1f", peak_gb) + " GB, act/weight " + fmt("%.2f", ratio) + "x, footprint -" +
               fmt("%.1f", foot_sum / n) + "% (" + fmt("%.1f", foot_min) + ".." + fmt("%.1f", foot_max) +
               "), INT8 ops -" + fmt("%.1f", ops_min) + ".." + fmt("%.1f", ops_max) + "%, peak ratio@4096 " +
               fmt("%.1f", peak_ratio) + "x" + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome dse_shape() {
    Outcome o;
    RunConfig base;
    const auto vv = sweep(SweepGrid{{512}, {32}, {1, 2, 4, 8, 16}}, base);
    const auto rr = sweep(SweepGrid{{512}, parse_size_list("1:64"), {4}}, base);
    auto cycles = [](const SweepRow& r) { return static_cast<double>(r.report.block_cycles); };
    for (std::size_t i = 1; i < vv.size(); ++i) {
        o.require(cycles(vv[i]) <= cycles(vv[i - 1]), "latency rises at " + std::to_string(vv[i].vvpus_per_rmpu) +
                                                          " VVPUs");
    }
    for (std::size_t i = 1; i < rr.size(); ++i) {
        o.require(cycles(rr[i]) <= cycles(rr[i - 1]), "latency rises at " + std::to_string(rr[i].num_rmpus) + " RMPUs");
    }
    const double vgain = 100.0 * (1.0 - cycles(vv[3]) / cycles(vv[2]));
    const double rgain = 100.0 * (1.0 - cycles(rr[63]) / cycles(rr[31]));
    o.require(vgain < 5.0, "VVPU count not saturated at 4");
    o.require(rgain < 5.0, "RMPU count not saturated at 32");
    o.detail = "monotone; gain 4->8 VVPUs " + fmt("%.1f", vgain) + "%, 32->64 RMPUs " + fmt("%.1f", rgain) + "%" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"aaq"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "aaq_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands{
        {"quantize", "--synthetic", "2000", "--scheme", "B"},
        {"verify", "--fixtures", AAQ_FIXTURE_DIR},
        {"simulate", "--ns", "64"},
        {"simulate", "--ns", "32", "--no-streaming-mha", "--chunk4", "--report", "csv"},
        {"sweep", "--ns", "32", "--rmpus", "8,16,32", "--vvpus", "2,4"},
        {"cost", "--ns", "256,512,1024,2048", "--variant", "all"},
        {"trace", "--ns", "16"},
    };
    for (const char* run : {"a", "b"}) {
        for (const auto& c : commands) {
            std::vector<std::string> args{"--seed", "7", "--jobs", "3", "--out-dir", (root / run).string()};
            args.insert(args.end(), c.begin(), c.end());
            const int code = cli(args);
            o.require(code == kExitOk, c[0] + " exited " + std::to_string(code));
        }
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        const auto name = entry.path().filename().string();
        if (name.find(".manifest.json") != std::string::npos) continue;
        const fs::path other = root / "b" / name;
        o.require(fs::exists(other) && read_file(entry.path()) == read_file(other), name + " differs");
        ++compared;
    }
    o.require(compared >= 7, "only " + std::to_string(compared) + " outputs");
    fs::remove_all(root);
    o.detail = std::to_string(compared) + " outputs byte-identical across two runs" +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "quantization error bound", 10, eq1_conformance},
        {2, "block layout bijection", 5, layout_bijection},
        {3, "resource arithmetic", 0, resource_arithmetic},
        {4, "outlier ablation", 30, outlier_ablation},
        {5, "streaming attention equivalence", 30, streaming_mha},
        {6, "scaling exponents", 0, scaling_exponents},
        {7, "calibration", 0, calibration},
        {8, "design-space shape", 300, dse_shape},
        {9, "determinism", 0, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && secs > c.budget_seconds) {
            o.pass = false;
            o.detail += "; took " + fmt("%.1f", secs) + " s, budget " + fmt("%.0f", c.budget_seconds) + " s";
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
