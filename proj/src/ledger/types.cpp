// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ledger/types.hpp"
#include "common/error.hpp"

namespace airchain::ledger
{
using codec::Record;

Record to_record(const TransactionHeader& h)
{
    return Record{{"family_name", h.family_name}, {"family_version", h.family_version},
        {"signer_public_key", h.signer_public_key}, {"payload_sha512", h.payload_sha512},
        {"nonce", h.nonce}, {"inputs", h.inputs}, {"outputs", h.outputs}};
}

Record to_record(const Transaction& t)
{
    return Record{{"header", to_record(t.header)}, {"header_signature", t.header_signature},
        {"payload", to_hex(t.payload)}};
}

Record to_record(const BatchHeader& h)
{
    return Record{{"signer_public_key", h.signer_public_key}, {"transaction_ids", h.transaction_ids}};
}

Record to_record(const Batch& b)
{
    Record txns = Record::array();
    for (const auto& t : b.transactions)
        txns.push_back(to_record(t));
    return Record{{"header", to_record(b.header)}, {"header_signature", b.header_signature},
        {"transactions", std::move(txns)}};
}

Record to_record(const BlockHeader& h)
{
    return Record{{"block_num", h.block_num}, {"previous_block_id", h.previous_block_id},
        {"signer_public_key", h.signer_public_key}, {"batch_ids", h.batch_ids},
        {"state_root_hash", h.state_root_hash}, {"consensus_payload", to_hex(h.consensus_payload)}};
}

Record to_record(const Block& b)
{
    Record batches = Record::array();
    for (const auto& batch : b.batches)
        batches.push_back(to_record(batch));
    return Record{{"header", to_record(b.header)}, {"header_signature", b.header_signature},
        {"batches", std::move(batches)}};
}

TransactionHeader transaction_header_from_record(const Record& r)
{
    codec::expect_keys(r, {"family_name", "family_version", "signer_public_key", "payload_sha512",
                              "nonce", "inputs", "outputs"});
    return {codec::get_string(r, "family_name"), codec::get_string(r, "family_version"),
        codec::get_string(r, "signer_public_key"), codec::get_string(r, "payload_sha512"),
        codec::get_string(r, "nonce"), codec::get_string_list(r, "inputs"),
        codec::get_string_list(r, "outputs")};
}

Transaction transaction_from_record(const Record& r)
{
    codec::expect_keys(r, {"header", "header_signature", "payload"});
    return {transaction_header_from_record(codec::field(r, "header")),
        codec::get_string(r, "header_signature"), from_hex(codec::get_string(r, "payload"))};
}

BatchHeader batch_header_from_record(const Record& r)
{
    codec::expect_keys(r, {"signer_public_key", "transaction_ids"});
    return {codec::get_string(r, "signer_public_key"), codec::get_string_list(r, "transaction_ids")};
}

Batch batch_from_record(const Record& r)
{
    codec::expect_keys(r, {"header", "header_signature", "transactions"});
    Batch b{batch_header_from_record(codec::field(r, "header")),
        codec::get_string(r, "header_signature"), {}};
    const auto& txns = codec::field(r, "transactions");
    if (!txns.is_array())
        throw CodecError("field 'transactions' is not a list");
    for (const auto& t : txns)
        b.transactions.push_back(transaction_from_record(t));
    return b;
}

BlockHeader block_header_from_record(const Record& r)
{
    codec::expect_keys(r, {"block_num", "previous_block_id", "signer_public_key", "batch_ids",
                              "state_root_hash", "consensus_payload"});
    return {codec::get_uint(r, "block_num"), codec::get_string(r, "previous_block_id"),
        codec::get_string(r, "signer_public_key"), codec::get_string_list(r, "batch_ids"),
        codec::get_string(r, "state_root_hash"),
        from_hex(codec::get_string(r, "consensus_payload"))};
}

Block block_from_record(const Record& r)
{
    codec::expect_keys(r, {"header", "header_signature", "batches"});
    Block b;
    b.header = block_header_from_record(codec::field(r, "header"));
    b.header_signature = codec::get_string(r, "header_signature");
    const auto& batches = codec::field(r, "batches");
    if (!batches.is_array())
        throw CodecError("field 'batches' is not a list");
    for (const auto& batch : batches)
        b.batches.push_back(batch_from_record(batch));
    b.block_id = block_id(b.header);
    return b;
}

Bytes header_bytes(const TransactionHeader& h)
{
    return codec::encode_bytes(to_record(h));
}

Bytes header_bytes(const BatchHeader& h)
{
    return codec::encode_bytes(to_record(h));
}

Bytes header_bytes(const BlockHeader& h)
{
    return codec::encode_bytes(to_record(h));
}

std::string block_id(const BlockHeader& h)
{
    return crypto::sha512_hex(header_bytes(h));
}

std::string encode_batch(const Batch& b)
{
    return codec::encode(to_record(b));
}

Batch decode_batch(std::string_view text)
{
    return batch_from_record(codec::decode(text));
}

std::string encode_block(const Block& b)
{
    return codec::encode(to_record(b));
}

Block decode_block(std::string_view text)
{
    return block_from_record(codec::decode(text));
}

Transaction build_transaction(const TransactionSpec& spec, const crypto::KeyPair& signer,
    std::string nonce)
{
    if (spec.payload.empty())
        throw Error("transaction payload must not be empty");
    if (nonce.empty())
        nonce = to_hex(crypto::random_bytes(16));
    else if (!is_lower_hex(nonce, 32))
        throw Error("transaction nonce must be 32 lowercase hex characters");

    Transaction t;
    t.header = {spec.family_name, spec.family_version, signer.public_key,
        crypto::sha512_hex(spec.payload), std::move(nonce), spec.inputs, spec.outputs};
    t.header_signature = crypto::sign(header_bytes(t.header), signer);
    t.payload = spec.payload;
    return t;
}

Batch build_batch(std::vector<Transaction> txns, const crypto::KeyPair& signer)
{
    if (txns.empty())
        throw Error("a batch needs at least one transaction");
    Batch b;
    b.header.signer_public_key = signer.public_key;
    for (const auto& t : txns)
        b.header.transaction_ids.push_back(t.id());
    b.header_signature = crypto::sign(header_bytes(b.header), signer);
    b.transactions = std::move(txns);
    return b;
}

Block build_block(BlockSpec spec, const crypto::KeyPair& signer)
{
    Block b;
    b.header.block_num = spec.block_num;
    b.header.previous_block_id = std::move(spec.previous_block_id);
    b.header.signer_public_key = signer.public_key;
    for (const auto& batch : spec.batches)
        b.header.batch_ids.push_back(batch.id());
    b.header.state_root_hash = std::move(spec.state_root_hash);
    b.header.consensus_payload = std::move(spec.consensus_payload);
    const auto bytes = header_bytes(b.header);
    b.header_signature = crypto::sign(bytes, signer);
    b.block_id = crypto::sha512_hex(bytes);
    b.batches = std::move(spec.batches);
    return b;
}

namespace
{
/// Signature check that reports malformed inputs as a violation rather than
/// throwing.
bool signature_ok(ByteView message, const std::string& sig, const std::string& pub)
{
    try
    {
        return crypto::verify(message, sig, pub);
    }
    catch (const CryptoError&)
    {
        return false;
    }
}

std::string short_id(const std::string& id)
{
    return id.substr(0, 16);
}
}  // namespace

std::vector<std::string> validate_transaction(const Transaction& t)
{
    std::vector<std::string> v;
    const auto tag = "transaction " + short_id(t.id()) + ": ";
    if (t.payload.empty())
        v.push_back(tag + "empty payload");
    if (crypto::sha512_hex(t.payload) != t.header.payload_sha512)
        v.push_back(tag + "payload digest mismatch");
    if (!is_lower_hex(t.header.nonce, 32))
        v.push_back(tag + "malformed nonce");
    if (!signature_ok(header_bytes(t.header), t.header_signature, t.header.signer_public_key))
        v.push_back(tag + "header signature invalid");
    return v;
}

std::vector<std::string> validate_batch(const Batch& b)
{
    std::vector<std::string> v;
    const auto tag = "batch " + short_id(b.id()) + ": ";
    if (b.transactions.empty())
        v.push_back(tag + "empty batch");
    if (!signature_ok(header_bytes(b.header), b.header_signature, b.header.signer_public_key))
        v.push_back(tag + "header signature invalid");

    bool ids_match = b.header.transaction_ids.size() == b.transactions.size();
    for (size_t i = 0; ids_match && i < b.transactions.size(); ++i)
        ids_match = b.header.transaction_ids[i] == b.transactions[i].id();
    if (!ids_match)
        v.push_back(tag + "id list mismatch");

    for (const auto& t : b.transactions)
    {
        auto tv = validate_transaction(t);
        v.insert(v.end(), tv.begin(), tv.end());
    }
    return v;
}

std::vector<std::string> validate_block(const Block& b)
{
    return validate_block(b, [](const Batch&) { return false; });
}

std::vector<std::string> validate_block(const Block& b, const std::function<bool(const Batch&)>& known_valid)
{
    std::vector<std::string> v;
    const auto bytes = header_bytes(b.header);
    const auto tag = "block " + short_id(b.id()) + ": ";
    if (crypto::sha512_hex(bytes) != b.block_id)
        v.push_back(tag + "block id mismatch");
    if (!signature_ok(bytes, b.header_signature, b.header.signer_public_key))
        v.push_back(tag + "header signature invalid");
    if (!is_lower_hex(b.header.previous_block_id, crypto::kDigestHexLen))
        v.push_back(tag + "malformed previous block id");
    if (!is_lower_hex(b.header.state_root_hash, crypto::kDigestHexLen))
        v.push_back(tag + "malformed state root");

    bool ids_match = b.header.batch_ids.size() == b.batches.size();
    for (size_t i = 0; ids_match && i < b.batches.size(); ++i)
        ids_match = b.header.batch_ids[i] == b.batches[i].id();
    if (!ids_match)
        v.push_back(tag + "batch id list mismatch");

    for (const auto& batch : b.batches)
    {
        if (known_valid(batch))
            continue;
        auto bv = validate_batch(batch);
        v.insert(v.end(), bv.begin(), bv.end());
    }
    return v;
}
}  // namespace airchain::ledger
