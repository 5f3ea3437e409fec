// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/cli/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "aaq/cli/fixtures.hpp"
#include "aaq/cli/manifest.hpp"
#include "aaq/core/error.hpp"
#include "aaq/core/metrics.hpp"
#include "aaq/core/tensor_io.hpp"
#include "aaq/cost/cost_model.hpp"
#include "aaq/graph/folding_block.hpp"
#include "aaq/quant/block_codec.hpp"
#include "aaq/quant/corpus.hpp"
#include "aaq/quant/quantizer.hpp"
#include "aaq/sim/simulator.hpp"
#include "aaq/sim/sweep.hpp"

namespace aaq {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
    std::string config_path;
    std::uint64_t seed = kDefaultSeed;
    std::size_t jobs = 1;
    std::string out_dir = "out";
};

struct WorkloadFlags {
    std::string schemes;
    bool chunk4 = false;
    bool no_streaming = false;
    bool no_quant = false;
};

struct Context {
    GlobalOptions global;
    RunConfig cfg;
    RunManifest manifest;
    std::chrono::steady_clock::time_point start;
    std::ostream* out = nullptr;

    fs::path out_path(const std::string& name) const {
        const fs::path p(name);
        return p.is_absolute() ? p : fs::path(global.out_dir) / p;
    }
    void write(const std::string& name, const std::string& text) { write_output(manifest, out_path(name), text); }
    void write(const std::string& name, std::span<const std::uint8_t> bytes) {
        write_output(manifest, out_path(name), bytes);
    }
    void finish() {
        manifest.config_snapshot = to_key_values(cfg);
        manifest.seed = global.seed;
        manifest.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto path = write_manifest(manifest, global.out_dir);
        *out << "manifest: " << path.string() << "\n";
    }
};

std::size_t parse_size(std::string_view s, std::string_view text) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v == 0) {
        throw ConfigError("malformed list '" + std::string(text) + "': expected positive integers");
    }
    return v;
}

void apply_workload_flags(const WorkloadFlags& f, RunConfig& cfg) {
    if (!f.schemes.empty()) {
        try {
            cfg.schemes = SchemeTable::parse(f.schemes);
        } catch (const ContractError& e) {
            throw ConfigError(std::string("--schemes: ") + e.what());
        }
    }
    if (f.no_quant) cfg.workload.quantize = false;
    if (f.no_streaming) cfg.workload.streaming_mha = false;
    if (f.chunk4) cfg.workload.chunk = 4;
    cfg.validate();
}

void add_workload_flags(CLI::App* cmd, WorkloadFlags& f) {
    cmd->add_option("--schemes", f.schemes, "Group schemes, e.g. A:8:4,B:4:4,C:4:0");
    cmd->add_flag("--chunk4", f.chunk4, "Chunk baseline intermediates by 4 (needs --no-streaming-mha)");
    cmd->add_flag("--no-streaming-mha", f.no_streaming, "Materialize attention score tensors");
    cmd->add_flag("--no-quant", f.no_quant, "Keep every activation at 16 bit");
}

// quantize -------------------------------------------------------------------

struct QuantizeOptions {
    std::string input;
    std::size_t synthetic = 0;
    std::string scheme;
    std::string name = "quantized";
};

int cmd_quantize(Context& ctx, const QuantizeOptions& o) {
    if (o.input.empty() == (o.synthetic == 0)) throw ConfigError("quantize: give exactly one of --input or --synthetic");
    QuantScheme scheme;
    std::string group = "custom";
    if (o.scheme.size() == 1) {
        try {
            const ActivationGroup g = parse_group(o.scheme);
            scheme = ctx.cfg.schemes.at(g);
            group = o.scheme;
        } catch (const ContractError& e) {
            throw ConfigError(std::string("--scheme: ") + e.what());
        }
    } else {
        try {
            scheme = QuantScheme::parse(o.scheme);
        } catch (const ContractError& e) {
            throw ConfigError(std::string("--scheme: ") + e.what());
        }
    }

    std::vector<TokenVector> tokens;
    std::size_t hz = 0;
    if (!o.input.empty()) {
        const ActivationTensor t = load_tensor(o.input);
        hz = t.hz();
        for (std::size_t i = 0; i < t.token_count(); ++i) tokens.emplace_back(t.token(i).begin(), t.token(i).end());
    } else {
        tokens = heavy_tailed_corpus(o.synthetic, ctx.global.seed);
        hz = tokens.front().size();
    }
    try {
        scheme.validate(hz);
    } catch (const ContractError& e) {
        throw ConfigError(std::string("--scheme: ") + e.what());
    }

    std::vector<QuantizedToken> q;
    q.reserve(tokens.size());
    double sq = 0.0;
    double token_rmse_sum = 0.0;
    double max_err = 0.0;
    for (const TokenVector& t : tokens) {
        q.push_back(quantize_token(t, scheme));
        const TokenVector back = dequantize_token(q.back(), scheme);
        const double r = rmse(t, back);
        token_rmse_sum += r;
        sq += r * r * static_cast<double>(t.size());
        max_err = std::max(max_err, max_abs_diff(t, back));
    }
    const BlockLayout layout{hz, ctx.cfg.layout.txn_bytes, ctx.cfg.layout.tokens_per_block};
    const auto bytes = encode_stream(q, scheme, layout);
    const double values = static_cast<double>(tokens.size() * hz);
    json sidecar = {{"tokens", tokens.size()},
                    {"hz", hz},
                    {"scheme", scheme.to_string()},
                    {"group", group},
                    {"bytes", bytes.size()},
                    {"token_bytes", token_encoded_bytes(scheme, hz)},
                    {"rmse", values > 0 ? std::sqrt(sq / values) : 0.0},
                    {"mean_token_rmse", tokens.empty() ? 0.0 : token_rmse_sum / static_cast<double>(tokens.size())},
                    {"max_abs_error", max_err},
                    {"group_counts", {{group, tokens.size()}}},
                    {"source", o.input.empty() ? "synthetic" : o.input}};
    ctx.write(o.name + ".blocks", bytes);
    ctx.write(o.name + ".json", sidecar.dump(2) + "\n");
    *ctx.out << "quantized " << tokens.size() << " tokens with scheme " << scheme.to_string() << " into "
             << bytes.size() << " bytes, rmse " << sidecar["rmse"].get<double>() << "\n";
    return kExitOk;
}

// verify ---------------------------------------------------------------------

int cmd_verify(Context& ctx, const std::string& fixtures) {
    const auto results = verify_fixtures(fixtures);
    json report = json::array();
    bool ok = true;
    for (const FixtureResult& r : results) {
        *ctx.out << (r.passed ? "PASS " : "FAIL ") << r.name << (r.passed ? "" : ": " + r.detail) << "\n";
        report.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        ok = ok && r.passed;
    }
    ctx.write("verify.json", report.dump(2) + "\n");
    return ok ? kExitOk : kExitVerifyFailed;
}

// simulate / trace -------------------------------------------------------------

int cmd_simulate(Context& ctx, std::size_t ns, const std::string& format, const std::string& trace_out) {
    if (format != "json" && format != "csv") throw ConfigError("--report must be json or csv");
    const DataflowGraph g = build_folding_block(ns, ctx.cfg.workload);
    const Trace t = emit_trace(g, ctx.cfg.schemes, ctx.cfg.layout);
    const SimReport r = simulate_trace(t, ctx.cfg.sim, ctx.cfg.workload.num_blocks);
    if (!trace_out.empty()) ctx.write(trace_out, trace_to_json(g, t).dump(2) + "\n");
    if (format == "json") {
        ctx.write("simulate.json", report_to_json(r).dump(2) + "\n");
    } else {
        ctx.write("simulate.csv", report_to_csv(r));
    }
    *ctx.out << "ns " << ns << ": " << r.block_cycles << " cycles per block, " << r.total_cycles << " total\n";
    return kExitOk;
}

int cmd_trace(Context& ctx, std::size_t ns) {
    const DataflowGraph g = build_folding_block(ns, ctx.cfg.workload);
    const Trace t = emit_trace(g, ctx.cfg.schemes, ctx.cfg.layout);
    ctx.write("trace.json", trace_to_json(g, t).dump(2) + "\n");
    *ctx.out << "trace of " << g.nodes.size() << " nodes, " << t.total_traffic() << " bytes per block\n";
    return kExitOk;
}

// sweep / cost -------------------------------------------------------------------

int cmd_sweep(Context& ctx, const std::string& ns, const std::string& rmpus, const std::string& vvpus,
              const std::string& format) {
    if (format != "json" && format != "csv") throw ConfigError("--report must be json or csv");
    SweepGrid grid;
    grid.ns = parse_size_list(ns);
    if (!rmpus.empty()) grid.num_rmpus = parse_size_list(rmpus);
    if (!vvpus.empty()) grid.vvpus_per_rmpu = parse_size_list(vvpus);
    const auto rows = sweep(grid, ctx.cfg, ctx.global.jobs);
    if (format == "csv") {
        ctx.write("sweep.csv", sweep_to_csv(rows));
    } else {
        ctx.write("sweep.json", sweep_to_json(rows).dump(2) + "\n");
    }
    *ctx.out << "sweep: " << rows.size() << " grid points\n";
    return kExitOk;
}

int cmd_cost(Context& ctx, const std::string& ns, const std::string& variant) {
    std::vector<Variant> variants;
    if (variant == "all") {
        variants = {Variant::Vanilla, Variant::Chunk4, Variant::Aaq};
    } else {
        try {
            variants = {parse_variant(variant)};
        } catch (const ContractError& e) {
            throw ConfigError(std::string("--variant: ") + e.what());
        }
    }
    CostConfig cc;
    cc.workload = ctx.cfg.workload;
    cc.schemes = ctx.cfg.schemes;
    cc.layout = ctx.cfg.layout;
    std::vector<CostReport> rows;
    for (std::size_t n : parse_size_list(ns)) {
        for (Variant v : variants) rows.push_back(cost_report(n, v, cc));
    }
    ctx.write("cost.csv", cost_to_csv(rows));
    *ctx.out << "cost: " << rows.size() << " rows\n";
    return kExitOk;
}

}  // namespace

std::vector<std::size_t> parse_size_list(std::string_view text) {
    std::vector<std::size_t> out;
    if (text.empty()) throw ConfigError("empty list");
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
        const std::size_t lo = parse_size(text.substr(0, colon), text);
        const std::size_t hi = parse_size(text.substr(colon + 1), text);
        if (lo > hi) throw ConfigError("range '" + std::string(text) + "' is empty");
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_size(text.substr(0, comma), text));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Token-wise adaptive activation quantization and accelerator model"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--config", global.config_path, "key=value configuration file (sim., workload., quant.)");
    app.add_option("--seed", global.seed, "Seed for synthetic inputs")->capture_default_str();
    app.add_option("--jobs", global.jobs, "Worker threads for sweeps")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--out-dir", global.out_dir, "Directory for outputs and the run manifest")->capture_default_str();

    QuantizeOptions qo;
    auto* quantize = app.add_subcommand("quantize", "Quantize a tensor dump or a synthetic corpus into token blocks");
    quantize->add_option("--input", qo.input, "Tensor dump to quantize");
    quantize->add_option("--synthetic", qo.synthetic, "Generate this many heavy-tailed tokens instead");
    quantize->add_option("--scheme", qo.scheme, "Group letter (A, B, C) or bits:k")->required();
    quantize->add_option("--name", qo.name, "Output base name")->capture_default_str();

    std::string fixtures = "fixtures";
    auto* verify = app.add_subcommand("verify", "Replay golden fixtures");
    verify->add_option("--fixtures", fixtures, "Fixture directory")->capture_default_str();

    std::size_t sim_ns = 0;
    std::string sim_format = "json";
    std::string trace_out;
    WorkloadFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Simulate one folding-block trace");
    simulate->add_option("--ns", sim_ns, "Sequence length")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--report", sim_format, "json or csv")->capture_default_str();
    simulate->add_option("--trace-out", trace_out, "Also write the trace JSON to this file");
    add_workload_flags(simulate, sim_flags);

    std::string sweep_ns = "512";
    std::string sweep_rmpus;
    std::string sweep_vvpus;
    std::string sweep_format = "csv";
    WorkloadFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep RMPU and VVPU counts");
    sweep_cmd->add_option("--ns", sweep_ns, "Sequence lengths, list or lo:hi")->capture_default_str();
    sweep_cmd->add_option("--rmpus", sweep_rmpus, "RMPU counts, list or lo:hi");
    sweep_cmd->add_option("--vvpus", sweep_vvpus, "VVPUs per RMPU, list or lo:hi");
    sweep_cmd->add_option("--report", sweep_format, "csv or json")->capture_default_str();
    add_workload_flags(sweep_cmd, sweep_flags);

    std::string cost_ns;
    std::string cost_variant = "all";
    std::string cost_schemes;
    auto* cost = app.add_subcommand("cost", "Closed-form memory and compute accounting");
    cost->add_option("--ns", cost_ns, "Sequence lengths, list or lo:hi")->required();
    cost->add_option("--variant", cost_variant, "vanilla, chunk4, aaq or all")->capture_default_str();
    cost->add_option("--schemes", cost_schemes, "Group schemes for the aaq variant");

    std::size_t trace_ns = 0;
    WorkloadFlags trace_flags;
    auto* trace = app.add_subcommand("trace", "Export the dataflow trace as JSON");
    trace->add_option("--ns", trace_ns, "Sequence length")->required()->check(CLI::PositiveNumber);
    add_workload_flags(trace, trace_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    Context ctx;
    ctx.global = global;
    ctx.out = &out;
    ctx.start = std::chrono::steady_clock::now();
    ctx.manifest.args.assign(argv + 1, argv + argc);
    try {
        if (!global.config_path.empty()) ctx.cfg = load_run_config(global.config_path);
        fs::create_directories(global.out_dir);
        int code = kExitOk;
        if (quantize->parsed()) {
            ctx.manifest.command = "quantize";
            code = cmd_quantize(ctx, qo);
        } else if (verify->parsed()) {
            ctx.manifest.command = "verify";
            code = cmd_verify(ctx, fixtures);
        } else if (simulate->parsed()) {
            ctx.manifest.command = "simulate";
            apply_workload_flags(sim_flags, ctx.cfg);
            code = cmd_simulate(ctx, sim_ns, sim_format, trace_out);
        } else if (sweep_cmd->parsed()) {
            ctx.manifest.command = "sweep";
            apply_workload_flags(sweep_flags, ctx.cfg);
            code = cmd_sweep(ctx, sweep_ns, sweep_rmpus, sweep_vvpus, sweep_format);
        } else if (cost->parsed()) {
            ctx.manifest.command = "cost";
            apply_workload_flags(WorkloadFlags{cost_schemes, false, false, false}, ctx.cfg);
            code = cmd_cost(ctx, cost_ns, cost_variant);
        } else if (trace->parsed()) {
            ctx.manifest.command = "trace";
            apply_workload_flags(trace_flags, ctx.cfg);
            code = cmd_trace(ctx, trace_ns);
        }
        ctx.finish();
        return code;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const CorruptionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace aaq
