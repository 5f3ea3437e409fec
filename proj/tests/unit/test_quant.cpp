// Copyright (c) 2026 The aaq-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "aaq/core/error.hpp"
#include "aaq/core/metrics.hpp"
#include "aaq/core/rng.hpp"
#include "aaq/quant/block_codec.hpp"
#include "aaq/quant/corpus.hpp"
#include "aaq/quant/half.hpp"
#include "aaq/quant/quantizer.hpp"
#include "aaq/quant/scheme.hpp"
#include "aaq/quant/stats.hpp"
#include "doctest.h"

using namespace aaq;

namespace {

const QuantScheme kA{8, 4};
const QuantScheme kB{4, 4};
const QuantScheme kC{4, 0};

TokenVector seed7_token() {
    Rng rng(7);
    TokenVector t(128);
    for (double& v : t) v = rng.uniform(-1.0, 1.0);
    for (std::size_t c : {5u, 40u, 77u, 120u}) t[c] = (c % 2 == 0 ? 50.0 : -50.0);
    return t;
}

TokenVector random_token(Rng& rng, double scale = 1.0) {
    TokenVector t(128);
    for (double& v : t) v = scale * rng.normal();
    return t;
}

// Quantization error ceiling for an inlier channel: half a step plus the
// binary16 rounding of sigma carried through the stored code.
double inlier_bound(const QuantizedToken& q, double exact_sigma, std::int16_t code) {
    return exact_sigma / 2.0 + std::abs(q.scale() - exact_sigma) * std::abs(code) + 1e-12;
}

}  // namespace

TEST_CASE("group schemes") {
    CHECK(scheme_for_group(ActivationGroup::A) == kA);
    CHECK(scheme_for_group(ActivationGroup::B) == kB);
    CHECK(scheme_for_group(ActivationGroup::C) == kC);
    CHECK_THROWS_AS(scheme_for_group(ActivationGroup::Unquantized), ContractError);
    CHECK(parse_group("B") == ActivationGroup::B);
    CHECK_THROWS_AS(parse_group("D"), ContractError);
}

TEST_CASE("scheme validation and parsing") {
    CHECK_THROWS_AS((QuantScheme{6, 0}.validate(128)), ContractError);
    CHECK_THROWS_AS((QuantScheme{4, 129}.validate(128)), ContractError);
    CHECK(QuantScheme::parse("8:4") == kA);
    CHECK_THROWS_AS(QuantScheme::parse("8"), ContractError);
    CHECK(QuantScheme::from_id(kA.id()) == kA);
    CHECK(QuantScheme::from_id(kC.id()) == kC);

    const SchemeTable t = SchemeTable::parse("A:8:2,B:4:4,C:4:1");
    CHECK(t.at(ActivationGroup::A) == QuantScheme{8, 2});
    CHECK(t.at(ActivationGroup::C) == QuantScheme{4, 1});
    CHECK(SchemeTable::parse(t.to_string()) == t);
    CHECK_THROWS_AS(SchemeTable::parse("A:8"), ContractError);
}

TEST_CASE("select_outliers examples") {
    TokenVector t(128, 0.0);
    t[0] = 0.1;
    t[1] = -9.0;
    t[2] = 0.2;
    t[3] = 8.5;
    const auto s = select_outliers(t, 2);
    CHECK(s.indices == std::vector<std::uint8_t>{1, 3});
    CHECK(s.outliers == std::vector<double>{-9.0, 8.5});
    CHECK(s.inliers.size() == 126);

    const auto none = select_outliers(t, 0);
    CHECK(none.indices.empty());
    CHECK(none.inliers == t);

    const TokenVector flat(128, 5.0);
    CHECK(select_outliers(flat, 4).indices == std::vector<std::uint8_t>{0, 1, 2, 3});
    CHECK_THROWS_AS(select_outliers(flat, 129), ContractError);
}

TEST_CASE("quantize_token worked example") {
    TokenVector t(128, 0.0);
    t[0] = 7;
    t[1] = -7;
    t[2] = 3.5;
    const auto q = quantize_token(t, kC);
    CHECK(q.scale() == 1.0);
    CHECK(q.inliers[0] == 7);
    CHECK(q.inliers[1] == -7);
    CHECK(q.inliers[2] == 4);
    CHECK(q.inliers[3] == 0);
}

TEST_CASE("all-zero token") {
    const TokenVector z(128, 0.0);
    for (const QuantScheme& s : {kA, kB, kC}) {
        const auto q = quantize_token(z, s);
        CHECK(q.scale() == 0.0);
        CHECK(std::all_of(q.inliers.begin(), q.inliers.end(), [](std::int16_t c) { return c == 0; }));
        CHECK(dequantize_token(q, s) == z);
    }
}

TEST_CASE("non-finite input is rejected") {
    TokenVector t(128, 0.0);
    t[9] = std::nan("");
    CHECK_THROWS_AS(quantize_token(t, kB), ContractError);
}

TEST_CASE("seed-7 heavy token under scheme B") {
    const TokenVector t = seed7_token();
    const auto q = quantize_token(t, kB);
    CHECK(q.outlier_indices == std::vector<std::uint8_t>{5, 40, 77, 120});

    // Oracle: recompute sigma over the inliers in double precision.
    double m = 0.0;
    for (std::size_t c = 0; c < 128; ++c) {
        if (c != 5 && c != 40 && c != 77 && c != 120) m = std::max(m, std::abs(t[c]));
    }
    const double sigma = m / 7.0;
    CHECK(q.scale() == doctest::Approx(sigma).epsilon(1e-3));
    const TokenVector back = dequantize_token(q, kB);
    std::size_t next = 0;
    for (std::size_t c = 0; c < 128; ++c) {
        if (c == 5 || c == 40 || c == 77 || c == 120) {
            CHECK(std::abs(back[c] - t[c]) <= 1.0 / 512.0);
        } else {
            CHECK(std::abs(back[c] - t[c]) <= inlier_bound(q, sigma, q.inliers[next++]));
        }
    }
    // Independent reconstruction: codes from the exact sigma, values from its binary16 rounding.
    const double sigma16 = half_to_double(double_to_half(sigma));
    double acc = 0.0;
    for (std::size_t c = 0; c < 128; ++c) {
        double r = 0.0;
        if (c == 5 || c == 40 || c == 77 || c == 120) {
            r = std::round(t[c] * 256.0) / 256.0;
        } else {
            r = sigma16 * std::clamp(std::round(t[c] / sigma), -7.0, 7.0);
        }
        acc += (r - t[c]) * (r - t[c]);
    }
    const double oracle = std::sqrt(acc / 128.0);
    CHECK(rmse(t, back) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(0.039718227366385674).epsilon(1e-12));
}

TEST_CASE("roundtrip bound on random tokens") {
    Rng rng(21);
    for (int i = 0; i < 500; ++i) {
        const TokenVector t = random_token(rng, rng.uniform(0.01, 20.0));
        for (const QuantScheme& s : {kA, kB, kC}) {
            const auto split = select_outliers(t, s.outlier_count);
            const double sigma = exact_scale(split, s);
            const auto q = quantize_token(t, s);
            const TokenVector back = dequantize_token(q, s);
            std::size_t next = 0;
            std::size_t o = 0;
            for (std::size_t c = 0; c < 128; ++c) {
                if (o < q.outlier_indices.size() && q.outlier_indices[o] == c) {
                    CHECK(std::abs(back[c] - t[c]) <= 1.0 / 512.0);
                    ++o;
                } else {
                    CHECK(std::abs(back[c] - t[c]) <= inlier_bound(q, sigma, q.inliers[next++]));
                }
            }
        }
    }
}

TEST_CASE("codes are scale invariant") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const TokenVector t = random_token(rng);
        const double c = std::ldexp(1.0, static_cast<int>(rng.below(8)) - 4);
        TokenVector scaled(t);
        for (double& v : scaled) v *= c;
        for (const QuantScheme& s : {kB, kC}) {
            const auto a = quantize_token(t, s);
            const auto b = quantize_token(scaled, s);
            CHECK(a.inliers == b.inliers);
            CHECK(a.outlier_indices == b.outlier_indices);
        }
    }
}

TEST_CASE("more outliers never grow sigma") {
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const TokenVector t = random_token(rng);
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 16; ++k) {
            const double s = exact_scale(select_outliers(t, k), QuantScheme{4, k});
            CHECK(s <= prev);
            prev = s;
        }
    }
}

TEST_CASE("dequantize rejects corrupt outlier indices") {
    auto q = quantize_token(seed7_token(), kB);
    q.outlier_indices[2] = q.outlier_indices[1];
    CHECK_THROWS_AS(dequantize_token(q, kB), CorruptionError);
    q.outlier_indices[2] = 200;
    CHECK_THROWS_AS(dequantize_token(q, kB), CorruptionError);
}

TEST_CASE("binary16 conversion") {
    CHECK(half_to_double(double_to_half(1.0)) == 1.0);
    CHECK(half_to_double(double_to_half(65504.0)) == 65504.0);
    CHECK(half_to_double(double_to_half_saturating(1e9)) == kHalfMax);
    CHECK(half_to_double(double_to_half(0.1)) == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(half_to_double(double_to_half(std::ldexp(1.0, -24))) == std::ldexp(1.0, -24));
}

TEST_CASE("per-token layout sizes") {
    CHECK(token_encoded_bits(kC, 128) == 528);
    CHECK(token_encoded_bits(kB, 128) == 608);
    CHECK(token_encoded_bits(kA, 128) == 1104);
    CHECK(token_encoded_bytes(kC, 128) == 66);
    CHECK(token_encoded_bytes(kB, 128) == 76);
    CHECK(token_encoded_bytes(kA, 128) == 138);
    CHECK(block_encoded_bytes(0, kB, 128, 64) == 64);
    CHECK(block_encoded_bytes(256, kC, 128, 64) % 64 == 0);
}

TEST_CASE("block codec round-trips bit-exactly") {
    Rng rng(1000);
    std::vector<QuantizedToken> tokens;
    for (int i = 0; i < 1000; ++i) tokens.push_back(quantize_token(random_token(rng, 3.0), kB));
    const BlockLayout layout{};
    const auto bytes = encode_stream(tokens, kB, layout);
    CHECK(bytes.size() % 64 == 0);
    CHECK(bytes.size() == stream_encoded_bytes(1000, kB, layout));
    CHECK(decode_stream(bytes, layout) == tokens);

    const auto block = encode_block(std::span(tokens).first(10), kB, 128);
    CHECK(block.bytes[0] == kBlockMagic);
    CHECK(block_scheme(block.bytes) == kB);
    CHECK(decode_block(block.bytes, 128) == std::vector<QuantizedToken>(tokens.begin(), tokens.begin() + 10));
}

TEST_CASE("empty block") {
    const auto block = encode_block({}, kC, 128);
    CHECK(block.bytes.size() == 64);
    CHECK(decode_block(block.bytes, 128).empty());
}

TEST_CASE("block codec corruption") {
    Rng rng(3);
    std::vector<QuantizedToken> tokens;
    for (int i = 0; i < 4; ++i) tokens.push_back(quantize_token(random_token(rng), kC));
    const auto block = encode_block(tokens, kC, 128);

    auto bad = block.bytes;
    bad[0] = 0x00;
    CHECK_THROWS_AS(decode_block(bad, 128), CorruptionError);

    bad = block.bytes;
    bad[2] = 9;  // token count no longer matches the payload
    try {
        decode_block(bad, 128);
        FAIL("expected corruption");
    } catch (const CorruptionError& e) {
        CHECK(e.offset() <= bad.size());
    }

    bad = block.bytes;
    bad.resize(bad.size() - 64);
    CHECK_THROWS_AS(decode_block(bad, 128), CorruptionError);
    CHECK_THROWS_AS(decode_block(std::span(block.bytes).first(2), 128), CorruptionError);
}

TEST_CASE("mixed schemes cannot share a block") {
    Rng rng(2);
    std::vector<QuantizedToken> tokens{quantize_token(random_token(rng), kB),
                                       quantize_token(random_token(rng), kC)};
    CHECK_THROWS_AS(encode_block(tokens, kB, 128), ContractError);
}

TEST_CASE("3-sigma statistics") {
    const TokenVector flat(128, 3.0);
    CHECK(stats_3sigma(flat).outliers == 0);

    TokenVector spike(128, 0.0);
    spike[17] = 100.0;
    const auto s = stats_3sigma(spike);
    CHECK(s.mean == doctest::Approx(0.78125));
    CHECK(s.stddev == doctest::Approx(8.8043).epsilon(1e-4));
    CHECK(s.outliers == 1);

    Rng rng(1);
    TokenVector normal(128);
    for (double& v : normal) v = rng.normal();
    double mean = 0.0;
    for (double v : normal) mean += v;
    mean /= 128.0;
    double var = 0.0;
    for (double v : normal) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / 128.0);
    const auto recount = static_cast<std::size_t>(
        std::count_if(normal.begin(), normal.end(), [&](double v) { return std::abs(v - mean) > 3.0 * sd; }));
    CHECK(stats_3sigma(normal).outliers == recount);
    CHECK(recount == 1);
}

TEST_CASE("heavy-tailed corpus favours outlier extraction") {
    const auto corpus = heavy_tailed_corpus(2000, 99);
    std::size_t wins = 0;
    for (const TokenVector& t : corpus) {
        if (rmse(t, fake_quantize(t, kB)) < rmse(t, fake_quantize(t, kC))) ++wins;
    }
    CHECK(wins >= 1980);
    CHECK(heavy_tailed_corpus(5, 1) == heavy_tailed_corpus(5, 1));
}
