// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hand-rolled generators for property tests.

#include "common/bytes.hpp"
#include "family/airquality.hpp"
#include "ledger/crypto.hpp"

#include <random>
#include <string>

namespace airchain::fixture
{
using Rng = std::mt19937_64;

inline int64_t uniform(Rng& rng, int64_t lo, int64_t hi)
{
    return std::uniform_int_distribution<int64_t>{lo, hi}(rng);
}

inline Bytes random_bytes(Rng& rng, size_t n)
{
    Bytes b(n);
    for (auto& x : b)
        x = static_cast<uint8_t>(rng());
    return b;
}

inline std::string random_hex(Rng& rng, size_t chars)
{
    static constexpr char d[] = "0123456789abcdef";
    std::string s(chars, '0');
    for (auto& c : s)
        c = d[rng() & 15];
    return s;
}

/// Deterministic key from a small integer label.
inline crypto::KeyPair test_key(uint64_t label)
{
    const auto seed = crypto::sha256(as_bytes("airchain-test-key-" + std::to_string(label)));
    return crypto::keypair_generate(ByteView{seed});
}

inline family::AirReading random_reading(Rng& rng, const std::string& reporter)
{
    family::AirReading r;
    r.pm1_0 = uniform(rng, 0, family::kPmMax);
    r.pm2_5 = uniform(rng, 0, family::kPmMax);
    r.pm10_0 = uniform(rng, 0, family::kPmMax);
    r.lat_udeg = uniform(rng, -family::kLatMaxUdeg, family::kLatMaxUdeg);
    r.lon_udeg = uniform(rng, -family::kLonMaxUdeg, family::kLonMaxUdeg);
    r.timestamp_s = uniform(rng, 1'600'000'000, 1'800'000'000);
    r.source_flag = static_cast<family::SourceFlag>(uniform(rng, 0, 3));
    r.reporter_public_key = reporter;
    return r;
}
}  // namespace airchain::fixture
