// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "consensus/analysis.hpp"
#include "common/error.hpp"

#include <cmath>
#include <numbers>

namespace airchain::consensus
{
int64_t max_faults(int64_t n)
{
    if (n < 1)
        throw Error{"max_faults: n must be positive"};
    return (n - 1) / 3;
}

double sybil_threshold(double n)
{
    if (!(n > std::numbers::e))
        throw Error{"sybil_threshold: n must exceed e"};
    const double ln = std::log(n);
    return std::log(ln) / ln;
}

ZTest ztest_winrate(int64_t wins, int64_t rounds, int64_t n)
{
    if (n < 2)
        throw Error{"ztest_winrate: n must be at least 2"};
    if (rounds < kZMinRounds)
        throw InsufficientDataError{"ztest_winrate: " + std::to_string(rounds) + " rounds, need " +
                                    std::to_string(kZMinRounds)};
    const double p = 1.0 / static_cast<double>(n);
    const double r = static_cast<double>(rounds);
    const double z = (static_cast<double>(wins) - r * p) / std::sqrt(r * p * (1 - p));
    return {z, z > kZThreshold};
}

int64_t poet_wait_from_uniform(int64_t mean_wait_ms, double u)
{
    if (mean_wait_ms <= 0)
        throw Error{"poet: mean wait must be positive"};
    if (!(u > 0 && u <= 1))
        throw Error{"poet: uniform draw outside (0, 1]"};
    const double w = std::ceil(-static_cast<double>(mean_wait_ms) * std::log(u));
    return w <= 0 ? 0 : static_cast<int64_t>(w);
}

int64_t poet_draw_wait(int64_t mean_wait_ms, std::mt19937_64& rng)
{
    // 53 random mantissa bits mapped onto (0, 1].
    const double u = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    return poet_wait_from_uniform(mean_wait_ms, u);
}

std::string poet_elect(const std::map<std::string, int64_t>& waits)
{
    if (waits.empty())
        throw Error{"poet_elect: no participants"};
    auto best = waits.begin();
    for (auto it = std::next(best); it != waits.end(); ++it)
    {
        if (it->second < best->second)
            best = it;
    }
    return best->first;
}

void PoetState::record(const std::string& winner)
{
    ++wins[winner];
    ++rounds_observed;
    ++round;
}

std::map<std::string, ZTest> PoetState::ztests(int64_t n) const
{
    std::map<std::string, ZTest> out;
    if (rounds_observed < kZMinRounds || n < 2)
        return out;
    for (const auto& [id, w] : wins)
        out.emplace(id, ztest_winrate(w, rounds_observed, n));
    return out;
}
}  // namespace airchain::consensus
