// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "common/error.hpp"
#include "family/airquality.hpp"
#include "ledger/types.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace airchain;

namespace
{
ledger::Transaction random_txn(fixture::Rng& rng, const crypto::KeyPair& key)
{
    ledger::TransactionSpec spec{"airquality", "1.0",
        fixture::random_bytes(rng, static_cast<size_t>(fixture::uniform(rng, 1, 80))), {}, {}};
    return ledger::build_transaction(spec, key, fixture::random_hex(rng, 32));
}

ledger::Batch random_batch(fixture::Rng& rng, const crypto::KeyPair& key, size_t n)
{
    std::vector<ledger::Transaction> txns;
    for (size_t i = 0; i < n; ++i)
        txns.push_back(random_txn(rng, key));
    return ledger::build_batch(std::move(txns), key);
}

bool mentions(const std::vector<std::string>& violations, std::string_view what)
{
    for (const auto& v : violations)
    {
        if (v.find(what) != std::string::npos)
            return true;
    }
    return false;
}

/// Golden block built from fixed keys and nonces.
ledger::Block golden_block()
{
    const auto key = fixture::test_key(42);
    family::AirReading r{12, 35, 40, 38'889'484, -77'035'278, 1'700'000'000,
        family::SourceFlag::citizen, key.public_key};
    auto txn = family::make_reading_transaction(r, key, std::string(32, 'a'));
    auto batch = ledger::build_batch({txn}, key);
    ledger::BlockSpec spec{1, ledger::kGenesisPreviousId, {batch}, std::string(128, 'b'), {}};
    return ledger::build_block(std::move(spec), key);
}
}  // namespace

TEST(transaction, payload_digest_is_sha512_of_payload)
{
    const auto key = fixture::test_key(1);
    ledger::TransactionSpec spec{"airquality", "1.0", to_bytes("payload"), {}, {}};
    const auto t = ledger::build_transaction(spec, key);
    EXPECT_EQ(t.header.payload_sha512, crypto::sha512_hex(std::string_view{"payload"}));
    EXPECT_EQ(t.header.nonce.size(), 32u);
    EXPECT_TRUE(ledger::validate_transaction(t).empty());
}

TEST(transaction, empty_payload_rejected)
{
    EXPECT_THROW(ledger::build_transaction({"airquality", "1.0", {}, {}, {}}, fixture::test_key(1)),
        Error);
}

TEST(batch, lists_transaction_ids_in_order)
{
    fixture::Rng rng{3};
    const auto key = fixture::test_key(2);
    const auto b = random_batch(rng, key, 3);
    ASSERT_EQ(b.header.transaction_ids.size(), 3u);
    for (size_t i = 0; i < 3; ++i)
        EXPECT_EQ(b.header.transaction_ids[i], b.transactions[i].header_signature);
}

TEST(batch, empty_transaction_list_rejected)
{
    EXPECT_THROW(ledger::build_batch({}, fixture::test_key(1)), Error);
}

TEST(batch, built_batches_validate)
{
    fixture::Rng rng{4};
    for (int i = 0; i < 50; ++i)
    {
        const auto key = fixture::test_key(static_cast<uint64_t>(i % 5));
        const auto b = random_batch(rng, key, static_cast<size_t>(fixture::uniform(rng, 1, 4)));
        EXPECT_TRUE(ledger::validate_batch(b).empty());
    }
}

TEST(batch, mutated_payload_reports_digest_mismatch)
{
    fixture::Rng rng{5};
    auto b = random_batch(rng, fixture::test_key(1), 2);
    b.transactions[1].payload[0] ^= 0xff;
    const auto v = ledger::validate_batch(b);
    EXPECT_TRUE(mentions(v, "payload digest mismatch"));
    EXPECT_TRUE(mentions(v, b.transactions[1].id().substr(0, 16)));
}

TEST(batch, reordered_ids_report_id_list_mismatch)
{
    fixture::Rng rng{6};
    auto b = random_batch(rng, fixture::test_key(1), 3);
    std::swap(b.transactions[0], b.transactions[2]);
    EXPECT_TRUE(mentions(ledger::validate_batch(b), "id list mismatch"));
}

TEST(batch, reports_all_violations)
{
    fixture::Rng rng{7};
    auto b = random_batch(rng, fixture::test_key(1), 2);
    b.transactions[0].payload.push_back(1);
    b.transactions[1].header.nonce = "xyz";
    b.header_signature[0] = b.header_signature[0] == 'a' ? 'b' : 'a';
    const auto v = ledger::validate_batch(b);
    EXPECT_TRUE(mentions(v, "payload digest mismatch"));
    EXPECT_TRUE(mentions(v, "malformed nonce"));
    EXPECT_GE(v.size(), 3u);
}

TEST(batch, every_single_field_mutation_is_detected)
{
    fixture::Rng rng{8};
    const auto key = fixture::test_key(1);
    const auto original = random_batch(rng, key, 2);
    std::vector<std::function<void(ledger::Batch&)>> mutations = {
        [](auto& b) { b.header.signer_public_key = fixture::test_key(9).public_key; },
        [](auto& b) { b.header.transaction_ids.pop_back(); },
        [](auto& b) { b.header_signature[5] ^= 1; },
        [](auto& b) { b.transactions[0].header.family_name = "other"; },
        [](auto& b) { b.transactions[0].header.family_version = "2.0"; },
        [](auto& b) { b.transactions[0].header.inputs.push_back("616972"); },
        [](auto& b) { b.transactions[0].header.outputs.push_back("616972"); },
        [](auto& b) { b.transactions[0].header.nonce[0] ^= 1; },
        [](auto& b) { b.transactions[1].header.payload_sha512[3] ^= 1; },
        [](auto& b) { b.transactions[1].header.signer_public_key = fixture::test_key(9).public_key; },
        [](auto& b) { b.transactions[1].header_signature[7] ^= 1; },
        [](auto& b) { b.transactions[1].payload.back() ^= 0x10; },
    };
    for (size_t i = 0; i < mutations.size(); ++i)
    {
        auto b = original;
        mutations[i](b);
        EXPECT_FALSE(ledger::validate_batch(b).empty()) << "mutation " << i;
    }
}

TEST(batch, codec_round_trip)
{
    fixture::Rng rng{10};
    const auto b = random_batch(rng, fixture::test_key(1), 2);
    EXPECT_EQ(ledger::decode_batch(ledger::encode_batch(b)), b);
    EXPECT_THROW(ledger::decode_batch(ledger::encode_batch(b).substr(0, 40)), CodecError);
}

TEST(block, id_is_sha512_of_header_and_validates)
{
    const auto b = golden_block();
    EXPECT_EQ(b.block_id, crypto::sha512_hex(ledger::header_bytes(b.header)));
    EXPECT_TRUE(ledger::validate_block(b).empty());
    EXPECT_EQ(ledger::decode_block(ledger::encode_block(b)), b);

    auto tampered = b;
    tampered.header.block_num = 2;
    EXPECT_FALSE(ledger::validate_block(tampered).empty());
}

TEST(block, golden_digest_is_stable)
{
    std::ifstream in{std::string{AIRCHAIN_FIXTURE_DIR} + "/golden_block.txt"};
    ASSERT_TRUE(in) << "missing golden fixture";
    std::string encoding, id;
    while (std::getline(in, encoding) && encoding.starts_with("//"))
    {
    }
    std::getline(in, id);
    const auto b = golden_block();
    EXPECT_EQ(ledger::encode_block(b), encoding);
    EXPECT_EQ(b.block_id, id);
}
