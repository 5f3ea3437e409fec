// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "aaq/quant/corpus.hpp"

#include <numeric>

#include "aaq/core/error.hpp"
#include "aaq/core/rng.hpp"

namespace aaq {

std::vector<TokenVector> heavy_tailed_corpus(std::size_t count, std::uint64_t seed, const HeavyTailSpec& spec) {
    if (spec.hz == 0 || spec.outliers > spec.hz) throw ContractError("heavy_tailed_corpus: need 0 <= outliers <= hz");
    if (!(spec.stddev > 0.0) || !(spec.min_multiple <= spec.max_multiple)) {
        throw ContractError("heavy_tailed_corpus: invalid magnitude range");
    }
    Rng rng(seed);
    std::vector<TokenVector> out(count, TokenVector(spec.hz));
    std::vector<std::size_t> channels(spec.hz);
    for (TokenVector& t : out) {
        for (double& x : t) x = rng.normal(0.0, spec.stddev);
        // Partial Fisher-Yates picks distinct outlier channels.
        std::iota(channels.begin(), channels.end(), std::size_t{0});
        for (std::size_t i = 0; i < spec.outliers; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(spec.hz - i));
            std::swap(channels[i], channels[j]);
            const double mag = rng.uniform(spec.min_multiple, spec.max_multiple) * spec.stddev;
            t[channels[i]] = rng.uniform() < 0.5 ? -mag : mag;
        }
    }
    return out;
}

}  // namespace aaq
