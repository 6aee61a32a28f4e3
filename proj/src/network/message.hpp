// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ledger/codec.hpp"
#include "ledger/types.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace airchain::network
{
/// Envelope types on the validator channel.
namespace msg
{
inline constexpr std::string_view kConnect = "connect";
inline constexpr std::string_view kConnectReply = "connect_reply";
inline constexpr std::string_view kGetPeers = "get_peers";
inline constexpr std::string_view kPeers = "peers";
inline constexpr std::string_view kBatch = "batch";
inline constexpr std::string_view kBlock = "block";
inline constexpr std::string_view kPbft = "pbft";
inline constexpr std::string_view kRaft = "raft";
}  // namespace msg

/// One validator-to-validator message. Control fields live in `fields`;
/// ledger objects travel alongside as shared values.
struct Message
{
    std::string type;
    std::string sender;
    codec::Record fields = codec::Record::object();
    std::vector<ledger::Block> blocks;
    std::vector<ledger::Batch> batches;

    /// Short content tag for traces.
    std::string tag() const;
};

using MessagePtr = std::shared_ptr<const Message>;

/// {type, sender, payload, signature} with payload = {fields, blocks, batches}.
codec::Record to_envelope(const Message& m, std::string_view signature);
/// Canonical bytes covered by the envelope signature.
Bytes signing_bytes(const Message& m);
struct Envelope
{
    Message message;
    std::string signature;
};
Envelope envelope_from_record(const codec::Record& r);

inline constexpr size_t kMaxFrameBytes = 4u << 20;

/// 4-byte big-endian length prefix followed by `body`. Throws
/// TransportError above kMaxFrameBytes.
std::string frame(std::string_view body);

/// Incremental frame decoder.
class FrameReader
{
public:
    void feed(std::string_view bytes);
    /// Next complete frame body, if any. Throws TransportError on an
    /// oversized length prefix.
    std::optional<std::string> next();

private:
    std::string buffer_;
};
}  // namespace airchain::network
