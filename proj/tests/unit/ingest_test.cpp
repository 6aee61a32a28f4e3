// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "common/error.hpp"
#include "ingest/emulator.hpp"
#include "ingest/serial.hpp"
#include "ingest/submitter.hpp"
#include "ingest/trigger.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace airchain::ingest
{
namespace
{
// ------------------------------------------------------------------ serial

TEST(serial_parser, one_complete_triple)
{
    SerialParser p;
    EXPECT_EQ(p.feed("PM1: 3\r\nPM2.5: 7\r\nPM10: 12\r\n"), (std::vector<RawReading>{{3, 7, 12}}));
    EXPECT_TRUE(p.carry().empty());
    EXPECT_TRUE(p.diagnostics().empty());
}

TEST(serial_parser, split_delimiter_is_carried)
{
    SerialParser p;
    EXPECT_TRUE(p.feed("PM1: 3\r").empty());
    EXPECT_EQ(p.carry(), "PM1: 3\r");
    EXPECT_TRUE(p.feed("\nPM2.5: 7\r\nPM10: 1").empty());
    EXPECT_EQ(p.feed("2\r\n"), (std::vector<RawReading>{{3, 7, 12}}));
}

TEST(serial_parser, malformed_and_out_of_order_lines_are_skipped)
{
    SerialParser p;
    const auto out = p.feed("garbage\r\nPM2.5: 7\r\nPM1: x\r\nPM1: -1\r\nPM1: 1\r\nPM2.5: 2\r\nPM10: 3\r\n");
    EXPECT_EQ(out, (std::vector<RawReading>{{1, 2, 3}}));
    EXPECT_EQ(p.diagnostics().size(), 4u);
}

TEST(serial_parser, restarting_a_triple_drops_the_partial_one)
{
    SerialParser p;
    const auto out = p.feed("PM1: 1\r\nPM2.5: 2\r\nPM1: 4\r\nPM2.5: 5\r\nPM10: 6\r\n");
    EXPECT_EQ(out, (std::vector<RawReading>{{4, 5, 6}}));
}

TEST(serial_parser, unbounded_line_is_discarded)
{
    SerialParser p;
    EXPECT_TRUE(p.feed(std::string(1000, 'z')).empty());
    EXPECT_LE(p.carry().size(), 1u);
    EXPECT_EQ(p.feed("\r\nPM1: 1\r\nPM2.5: 2\r\nPM10: 3\r\n").size(), 1u);
}

TEST(serial_parser, chunking_does_not_change_output)
{
    fixture::Rng rng{21};
    std::string stream;
    std::vector<RawReading> expected;
    for (int i = 0; i < 200; ++i)
    {
        RawReading r{fixture::uniform(rng, 0, 999), fixture::uniform(rng, 0, 999), fixture::uniform(rng, 0, 999)};
        expected.push_back(r);
        stream += format_serial(r);
        if (i % 17 == 0)
            stream += "noise line\r\n";
    }
    for (int trial = 0; trial < 40; ++trial)
    {
        SerialParser p;
        std::vector<RawReading> got;
        for (size_t pos = 0; pos < stream.size();)
        {
            const auto n = static_cast<size_t>(fixture::uniform(rng, 1, 40));
            for (const auto& r : p.feed(std::string_view{stream}.substr(pos, n)))
                got.push_back(r);
            pos += n;
        }
        ASSERT_EQ(got, expected) << "trial " << trial;
    }
}

// ---------------------------------------------------------------- emulator

TEST(emulator, zero_stays_zero)
{
    std::mt19937_64 rng{1};
    for (int i = 0; i < 1000; ++i)
        ASSERT_EQ(emulate_sensor(0, {}, rng), 0);
}

TEST(emulator, output_stays_within_consistency_bound)
{
    std::mt19937_64 rng{2};
    const SensorNoiseModel m;
    for (int64_t t : {5, 20, 35, 100, 400})
    {
        for (int i = 0; i < 500; ++i)
        {
            const auto v = emulate_sensor(t, m, rng);
            ASSERT_GE(v, static_cast<int64_t>(std::ceil(t * 0.9)));
            ASSERT_LE(v, static_cast<int64_t>(std::floor(t * 1.1)));
        }
    }
}

TEST(emulator, same_seed_same_stream)
{
    DeviceConfig c;
    c.key = fixture::test_key(3);
    c.seed = 77;
    EmulatedDevice a{c}, b{c};
    const Ambient amb{10, 35, 60, 20, 50};
    for (int i = 0; i < 50; ++i)
        ASSERT_EQ(a.sample_serial(amb), b.sample_serial(amb));
    c.seed = 78;
    EmulatedDevice other{c};
    bool differs = false;
    for (int i = 0; i < 50; ++i)
        differs |= other.sample_serial(amb) != a.sample_serial(amb);
    EXPECT_TRUE(differs);
}

TEST(emulator, outside_envelope_yields_nothing)
{
    DeviceConfig c;
    c.key = fixture::test_key(3);
    EmulatedDevice d{c};
    EXPECT_FALSE(d.read({10, 35, 60, 70, 50}, 100));
    EXPECT_FALSE(d.read({10, 35, 60, 20, 100}, 100));
    const auto r = d.read({10, 35, 60, -10, 0}, 100);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->reporter_public_key, c.key.public_key);
    EXPECT_EQ(r->timestamp_s, 100);
}

TEST(emulator, readings_are_calibrated)
{
    DeviceConfig c;
    c.key = fixture::test_key(3);
    c.noise.consistency_bound = 0;
    c.calibration = {2, 1, 5, 1};
    EmulatedDevice d{c};
    const auto r = d.read({10, 30, 50, 20, 50}, 1);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->pm1_0, 25);
    EXPECT_EQ(r->pm2_5, 65);
    EXPECT_EQ(r->pm10_0, 105);
}

TEST(emulator, rejects_bad_noise_model)
{
    SensorNoiseModel m;
    m.rmse_ug_m3 = 0;
    EXPECT_THROW(check(m), ConfigError);
    m.rmse_ug_m3 = 2;
    m.consistency_bound = 1.5;
    EXPECT_THROW(check(m), ConfigError);
}

// ----------------------------------------------------------------- trigger

TEST(batch_trigger, examples)
{
    const BatchTriggerConfig c{10, 60};
    EXPECT_EQ(batch_trigger(0, std::nullopt, c, 1000), TriggerDecision::hold);
    EXPECT_EQ(batch_trigger(9, 990, c, 1000), TriggerDecision::hold);
    EXPECT_EQ(batch_trigger(10, 1000, c, 1000), TriggerDecision::flush);
    EXPECT_EQ(batch_trigger(1, 940, c, 1000), TriggerDecision::flush);
    EXPECT_EQ(batch_trigger(1, 941, c, 1000), TriggerDecision::hold);
    EXPECT_THROW(check(BatchTriggerConfig{0, 60}), ConfigError);
}

TEST(reading_buffer, age_clock_restarts_after_take)
{
    ReadingBuffer buf{{3, 60}};
    buf.add({}, 100);
    buf.add({}, 150);
    EXPECT_EQ(buf.decide(159), TriggerDecision::hold);
    EXPECT_EQ(buf.decide(160), TriggerDecision::flush);
    EXPECT_EQ(buf.take().size(), 2u);
    EXPECT_FALSE(buf.oldest_at());
    buf.add({}, 500);
    EXPECT_EQ(buf.oldest_at(), std::optional<int64_t>{500});
}

TEST(make_reading_batch, signs_each_reading)
{
    const auto key = fixture::test_key(4);
    fixture::Rng rng{1};
    const auto batch = make_reading_batch({fixture::random_reading(rng, key.public_key),
                                              fixture::random_reading(rng, key.public_key)},
        key);
    EXPECT_EQ(batch.transactions.size(), 2u);
    EXPECT_TRUE(ledger::validate_batch(batch).empty());
    EXPECT_THROW(make_reading_batch({}, key), Error);
}

// --------------------------------------------------------------- submitter

ledger::Batch sample_batch()
{
    const auto key = fixture::test_key(4);
    fixture::Rng rng{1};
    return make_reading_batch({fixture::random_reading(rng, key.public_key)}, key);
}

std::string receipt_body(const ledger::Batch& b, std::string_view status)
{
    return codec::encode({{"receipts", {{{"batch_id", b.id()}, {"status", std::string{status}}}}}});
}

TEST(submitter, retries_with_backoff_until_endpoint_is_up)
{
    const auto batch = sample_batch();
    int calls = 0;
    std::vector<int64_t> sleeps;
    RetryPolicy policy;
    policy.sleep = [&](int64_t ms) { sleeps.push_back(ms); };
    const auto out = submit_batch(batch, "k", [&](const std::string& path, const std::string&, const std::string& key) {
        EXPECT_EQ(path, "/batches");
        EXPECT_EQ(key, "k");
        if (++calls < 3)
            throw TransportError{"connection refused"};
        return api::HttpResponse{202, receipt_body(batch, "accepted")};
    }, policy);
    EXPECT_TRUE(out.accepted());
    EXPECT_EQ(out.attempts, 3);
    EXPECT_EQ(sleeps, (std::vector<int64_t>{200, 400}));
    EXPECT_TRUE(out.transport_error.empty());
}

TEST(submitter, gives_up_after_retries)
{
    RetryPolicy policy;
    policy.retries = 2;
    policy.sleep = [](int64_t) {};
    const auto out = submit_batch(sample_batch(), "k", [](const std::string&, const std::string&, const std::string&) -> api::HttpResponse {
        throw TransportError{"down"};
    }, policy);
    EXPECT_FALSE(out.accepted());
    EXPECT_EQ(out.attempts, 3);
    EXPECT_EQ(out.transport_error, "down");
}

TEST(submitter, rejection_is_not_retried)
{
    const auto batch = sample_batch();
    int calls = 0;
    const auto out = submit_batch(batch, "k", [&](const std::string&, const std::string&, const std::string&) {
        ++calls;
        return api::HttpResponse{401, receipt_body(batch, "unauthorized")};
    });
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(out.rejected_status, std::optional<int>{401});
    ASSERT_TRUE(out.receipt);
    EXPECT_EQ(out.receipt->status, api::ReceiptStatus::unauthorized);
    EXPECT_FALSE(out.accepted());
}
}  // namespace
}  // namespace airchain::ingest
