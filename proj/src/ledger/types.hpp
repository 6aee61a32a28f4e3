// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common/bytes.hpp"
#include "ledger/codec.hpp"
#include "ledger/crypto.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace airchain::ledger
{
/// Previous-block id of the genesis block.
inline const std::string kGenesisPreviousId(crypto::kDigestHexLen, '0');

struct TransactionHeader
{
    std::string family_name;
    std::string family_version;
    std::string signer_public_key;
    std::string payload_sha512;
    std::string nonce;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    friend bool operator==(const TransactionHeader&, const TransactionHeader&) = default;
};

struct Transaction
{
    TransactionHeader header;
    std::string header_signature;  ///< doubles as the transaction id
    Bytes payload;

    const std::string& id() const noexcept { return header_signature; }
    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct BatchHeader
{
    std::string signer_public_key;
    std::vector<std::string> transaction_ids;

    friend bool operator==(const BatchHeader&, const BatchHeader&) = default;
};

struct Batch
{
    BatchHeader header;
    std::string header_signature;  ///< the batch id
    std::vector<Transaction> transactions;

    const std::string& id() const noexcept { return header_signature; }
    friend bool operator==(const Batch&, const Batch&) = default;
};

struct BlockHeader
{
    uint64_t block_num = 0;
    std::string previous_block_id;
    std::string signer_public_key;
    std::vector<std::string> batch_ids;
    std::string state_root_hash;
    Bytes consensus_payload;

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block
{
    BlockHeader header;
    std::string header_signature;
    std::vector<Batch> batches;
    std::string block_id;  ///< SHA-512 of the canonical header encoding

    const std::string& id() const noexcept { return block_id; }
    friend bool operator==(const Block&, const Block&) = default;
};

// Record codecs. from_record throws CodecError on any shape problem.
codec::Record to_record(const TransactionHeader& h);
codec::Record to_record(const Transaction& t);
codec::Record to_record(const BatchHeader& h);
codec::Record to_record(const Batch& b);
codec::Record to_record(const BlockHeader& h);
codec::Record to_record(const Block& b);

TransactionHeader transaction_header_from_record(const codec::Record& r);
Transaction transaction_from_record(const codec::Record& r);
BatchHeader batch_header_from_record(const codec::Record& r);
Batch batch_from_record(const codec::Record& r);
BlockHeader block_header_from_record(const codec::Record& r);
/// Recomputes block_id from the decoded header.
Block block_from_record(const codec::Record& r);

Bytes header_bytes(const TransactionHeader& h);
Bytes header_bytes(const BatchHeader& h);
Bytes header_bytes(const BlockHeader& h);

std::string block_id(const BlockHeader& h);

std::string encode_batch(const Batch& b);
Batch decode_batch(std::string_view text);
std::string encode_block(const Block& b);
Block decode_block(std::string_view text);

struct TransactionSpec
{
    std::string family_name;
    std::string family_version;
    Bytes payload;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

/// Builds and signs a transaction. `nonce` is 32 lowercase hex characters;
/// when empty a fresh random nonce is drawn. Throws Error on empty payload.
Transaction build_transaction(const TransactionSpec& spec, const crypto::KeyPair& signer,
    std::string nonce = {});

/// Wraps transactions (non-empty) into a signed batch.
Batch build_batch(std::vector<Transaction> txns, const crypto::KeyPair& signer);

struct BlockSpec
{
    uint64_t block_num = 0;
    std::string previous_block_id;
    std::vector<Batch> batches;
    std::string state_root_hash;
    Bytes consensus_payload;
};

Block build_block(BlockSpec spec, const crypto::KeyPair& signer);

/// Structural validation: every signature, every payload digest and the id
/// list. Returns all violations; empty means valid.
std::vector<std::string> validate_transaction(const Transaction& t);
std::vector<std::string> validate_batch(const Batch& b);
/// Header signature, batch-id list, and every batch.
std::vector<std::string> validate_block(const Block& b);
/// As above, skipping batches for which `known_valid` returns true.
std::vector<std::string> validate_block(const Block& b, const std::function<bool(const Batch&)>& known_valid);
}  // namespace airchain::ledger
