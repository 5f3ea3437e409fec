// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/sim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "aaq/core/error.hpp"
#include "aaq/graph/folding_block.hpp"

namespace aaq {

std::vector<SweepRow> sweep(const SweepGrid& grid, const RunConfig& base, std::size_t jobs) {
    if (grid.ns.empty()) throw ContractError("sweep: at least one Ns value is required");
    base.validate();
    const std::vector<std::size_t> rmpus = grid.num_rmpus.empty() ? std::vector{base.sim.num_rmpus} : grid.num_rmpus;
    const std::vector<std::size_t> vvpus =
        grid.vvpus_per_rmpu.empty() ? std::vector{base.sim.vvpus_per_rmpu} : grid.vvpus_per_rmpu;

    std::map<std::size_t, Trace> traces;
    for (std::size_t ns : grid.ns) {
        if (!traces.count(ns)) {
            traces.emplace(ns, emit_trace(build_folding_block(ns, base.workload), base.schemes, base.layout));
        }
    }

    std::vector<SweepRow> rows;
    for (std::size_t ns : grid.ns) {
        for (std::size_t r : rmpus) {
            for (std::size_t v : vvpus) rows.push_back({ns, r, v, {}});
        }
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            try {
                SimConfig cfg = base.sim;
                cfg.num_rmpus = rows[i].num_rmpus;
                cfg.vvpus_per_rmpu = rows[i].vvpus_per_rmpu;
                rows[i].report = simulate_trace(traces.at(rows[i].ns), cfg, base.workload.num_blocks);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, rows.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(10);
    out << "ns,num_rmpus,vvpus_per_rmpu,block_cycles,total_cycles,rmpu_utilization,vvpu_utilization,"
           "achieved_bandwidth_GBps\n";
    for (const SweepRow& r : rows) {
        out << r.ns << ',' << r.num_rmpus << ',' << r.vvpus_per_rmpu << ',' << r.report.block_cycles << ','
            << r.report.total_cycles << ',' << r.report.rmpu_utilization << ',' << r.report.vvpu_utilization << ','
            << r.report.achieved_bandwidth_GBps << '\n';
    }
    return out.str();
}

nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const SweepRow& r : rows) {
        out.push_back({{"ns", r.ns},
                       {"num_rmpus", r.num_rmpus},
                       {"vvpus_per_rmpu", r.vvpus_per_rmpu},
                       {"block_cycles", r.report.block_cycles},
                       {"total_cycles", r.report.total_cycles},
                       {"rmpu_utilization", r.report.rmpu_utilization},
                       {"vvpu_utilization", r.report.vvpu_utilization},
                       {"achieved_bandwidth_GBps", r.report.achieved_bandwidth_GBps}});
    }
    return out;
}

}  // namespace aaq
