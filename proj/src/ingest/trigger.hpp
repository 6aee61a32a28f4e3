// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "family/airquality.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace airchain::ingest
{
struct BatchTriggerConfig
{
    int64_t count_threshold = 10;
    int64_t age_threshold_s = 60;
};

/// Throws ConfigError unless both thresholds are positive.
void check(const BatchTriggerConfig& config);

enum class TriggerDecision
{
    hold,
    flush,
};

/// Flush once the buffer holds `count_threshold` readings or its oldest
/// reading is `age_threshold_s` old. An empty buffer always holds.
TriggerDecision batch_trigger(size_t count, std::optional<int64_t> oldest_at_s,
    const BatchTriggerConfig& config, int64_t now_s) noexcept;

/// Readings waiting for submission with their arrival times.
class ReadingBuffer
{
public:
    explicit ReadingBuffer(BatchTriggerConfig config = {});

    void add(family::AirReading reading, int64_t now_s);
    TriggerDecision decide(int64_t now_s) const noexcept;
    /// Empties the buffer; the age clock restarts with the next reading.
    std::vector<family::AirReading> take();

    size_t size() const noexcept { return readings_.size(); }
    std::optional<int64_t> oldest_at() const noexcept { return oldest_at_; }

private:
    BatchTriggerConfig config_;
    std::vector<family::AirReading> readings_;
    std::optional<int64_t> oldest_at_;
};

/// One transaction per reading wrapped in one batch signed by `key`. Nonces
/// are drawn from `nonce_rng` when given, otherwise from the system source.
ledger::Batch make_reading_batch(const std::vector<family::AirReading>& readings,
    const crypto::KeyPair& key, std::mt19937_64* nonce_rng = nullptr);
}  // namespace airchain::ingest
