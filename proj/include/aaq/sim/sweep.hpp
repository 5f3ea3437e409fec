// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aaq/sim/config.hpp"
#include "aaq/sim/simulator.hpp"
#include "json.hpp"

namespace aaq {

/// Cartesian grid; an empty axis keeps the base configuration's value.
struct SweepGrid {
    std::vector<std::size_t> ns;
    std::vector<std::size_t> num_rmpus;
    std::vector<std::size_t> vvpus_per_rmpu;
};

struct SweepRow {
    std::size_t ns = 0;
    std::size_t num_rmpus = 0;
    std::size_t vvpus_per_rmpu = 0;
    SimReport report;
};

/// One report per grid point in (ns, rmpus, vvpus) order. Points run on up
/// to `jobs` threads; output order and content do not depend on `jobs`.
/// Throws ContractError if the grid has no Ns value.
std::vector<SweepRow> sweep(const SweepGrid& grid, const RunConfig& base, std::size_t jobs = 1);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows);

}  // namespace aaq
