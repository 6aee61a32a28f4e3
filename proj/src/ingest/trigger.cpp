// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ingest/trigger.hpp"
#include "common/error.hpp"

namespace airchain::ingest
{
void check(const BatchTriggerConfig& config)
{
    if (config.count_threshold <= 0 || config.age_threshold_s <= 0)
        throw ConfigError{"batch trigger: thresholds must be positive"};
}

TriggerDecision batch_trigger(size_t count, std::optional<int64_t> oldest_at_s,
    const BatchTriggerConfig& config, int64_t now_s) noexcept
{
    if (count == 0)
        return TriggerDecision::hold;
    if (static_cast<int64_t>(count) >= config.count_threshold)
        return TriggerDecision::flush;
    if (oldest_at_s && now_s - *oldest_at_s >= config.age_threshold_s)
        return TriggerDecision::flush;
    return TriggerDecision::hold;
}

ReadingBuffer::ReadingBuffer(BatchTriggerConfig config) : config_{config}
{
    check(config_);
}

void ReadingBuffer::add(family::AirReading reading, int64_t now_s)
{
    if (readings_.empty())
        oldest_at_ = now_s;
    readings_.push_back(std::move(reading));
}

TriggerDecision ReadingBuffer::decide(int64_t now_s) const noexcept
{
    return batch_trigger(readings_.size(), oldest_at_, config_, now_s);
}

std::vector<family::AirReading> ReadingBuffer::take()
{
    oldest_at_.reset();
    return std::exchange(readings_, {});
}

ledger::Batch make_reading_batch(const std::vector<family::AirReading>& readings,
    const crypto::KeyPair& key, std::mt19937_64* nonce_rng)
{
    if (readings.empty())
        throw Error{"reading batch: no readings"};
    std::vector<ledger::Transaction> txns;
    txns.reserve(readings.size());
    for (const auto& r : readings)
    {
        std::string nonce;
        if (nonce_rng)
        {
            Bytes b(16);
            for (auto& x : b)
                x = static_cast<uint8_t>((*nonce_rng)());
            nonce = to_hex(b);
        }
        txns.push_back(family::make_reading_transaction(r, key, std::move(nonce)));
    }
    return ledger::build_batch(std::move(txns), key);
}
}  // namespace airchain::ingest
