// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "network/message.hpp"
#include "common/error.hpp"

namespace airchain::network
{
namespace
{
codec::Record payload_record(const Message& m)
{
    auto blocks = codec::Record::array();
    for (const auto& b : m.blocks)
        blocks.push_back(ledger::to_record(b));
    auto batches = codec::Record::array();
    for (const auto& b : m.batches)
        batches.push_back(ledger::to_record(b));
    return {{"fields", m.fields}, {"blocks", std::move(blocks)}, {"batches", std::move(batches)}};
}
}  // namespace

std::string Message::tag() const
{
    if (!blocks.empty())
        return blocks.front().block_id.substr(0, 16);
    if (!batches.empty())
        return batches.front().id().substr(0, 16);
    if (const auto it = fields.find("kind"); it != fields.end() && it->is_string())
        return it->get<std::string>();
    return {};
}

codec::Record to_envelope(const Message& m, std::string_view signature)
{
    return {{"type", m.type}, {"sender", m.sender}, {"payload", payload_record(m)},
        {"signature", signature}};
}

Bytes signing_bytes(const Message& m)
{
    return codec::encode_bytes({{"type", m.type}, {"sender", m.sender}, {"payload", payload_record(m)}});
}

Envelope envelope_from_record(const codec::Record& r)
{
    codec::expect_keys(r, {"type", "sender", "payload", "signature"});
    Envelope e;
    e.message.type = codec::get_string(r, "type");
    e.message.sender = codec::get_string(r, "sender");
    e.signature = codec::get_string(r, "signature");
    const auto& p = codec::field(r, "payload");
    codec::expect_keys(p, {"fields", "blocks", "batches"});
    e.message.fields = codec::field(p, "fields");
    if (!e.message.fields.is_object())
        throw CodecError{"envelope: fields must be a record"};
    const auto& blocks = codec::field(p, "blocks");
    const auto& batches = codec::field(p, "batches");
    if (!blocks.is_array() || !batches.is_array())
        throw CodecError{"envelope: blocks and batches must be lists"};
    for (const auto& b : blocks)
        e.message.blocks.push_back(ledger::block_from_record(b));
    for (const auto& b : batches)
        e.message.batches.push_back(ledger::batch_from_record(b));
    return e;
}

std::string frame(std::string_view body)
{
    if (body.size() > kMaxFrameBytes)
        throw TransportError{"frame of " + std::to_string(body.size()) + " bytes exceeds the limit"};
    const auto n = static_cast<uint32_t>(body.size());
    std::string out;
    out.reserve(4 + body.size());
    out.push_back(static_cast<char>(n >> 24));
    out.push_back(static_cast<char>(n >> 16));
    out.push_back(static_cast<char>(n >> 8));
    out.push_back(static_cast<char>(n));
    out.append(body);
    return out;
}

void FrameReader::feed(std::string_view bytes)
{
    buffer_.append(bytes);
}

std::optional<std::string> FrameReader::next()
{
    if (buffer_.size() < 4)
        return std::nullopt;
    const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data());
    const uint32_t n = (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) | (uint32_t{p[2]} << 8) | p[3];
    if (n > kMaxFrameBytes)
        throw TransportError{"incoming frame of " + std::to_string(n) + " bytes exceeds the limit"};
    if (buffer_.size() < 4 + size_t{n})
        return std::nullopt;
    std::string body = buffer_.substr(4, n);
    buffer_.erase(0, 4 + size_t{n});
    return body;
}
}  // namespace airchain::network
