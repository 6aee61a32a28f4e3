// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

namespace airchain::consensus
{
/// Largest Byzantine count n nodes tolerate: floor((n - 1) / 3).
int64_t max_faults(int64_t n);

/// ln(ln n) / ln n. Throws Error when n <= e.
double sybil_threshold(double n);

inline constexpr double kZThreshold = 2.575;
inline constexpr int64_t kZMinRounds = 100;

struct ZTest
{
    double z = 0;
    bool flagged = false;
};

/// One-sided test of a node's win count against the fair rate 1/n.
/// Throws InsufficientDataError below kZMinRounds rounds.
ZTest ztest_winrate(int64_t wins, int64_t rounds, int64_t n);

/// ceil(-mean * ln u) for u in (0, 1].
int64_t poet_wait_from_uniform(int64_t mean_wait_ms, double u);

/// Draws u uniformly from (0, 1] and maps it through poet_wait_from_uniform.
int64_t poet_draw_wait(int64_t mean_wait_ms, std::mt19937_64& rng);

/// Smallest wait wins; equal waits go to the smaller node id.
/// Throws Error on an empty map.
std::string poet_elect(const std::map<std::string, int64_t>& waits);

/// Win bookkeeping for the PoET lottery.
struct PoetState
{
    int64_t round = 0;
    int64_t mean_wait_ms = 1;
    std::map<std::string, int64_t> wins;
    int64_t rounds_observed = 0;

    void record(const std::string& winner);
    /// z-statistic for every node seen so far, given n participants.
    std::map<std::string, ZTest> ztests(int64_t n) const;
};
}  // namespace airchain::consensus
