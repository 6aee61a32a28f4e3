// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "consensus/payload.hpp"
#include "common/error.hpp"

#include <algorithm>

namespace airchain::consensus
{
Bytes encode_payload(const ConsensusPayload& p)
{
    codec::Record r{{"engine", p.engine}};
    if (p.engine == to_string(Algorithm::pbft))
    {
        r["view"] = p.view;
        r["sequence"] = p.sequence;
    }
    else if (p.engine == to_string(Algorithm::poet_cft))
    {
        r["round"] = p.round;
        r["wait_ms"] = p.wait_ms;
    }
    else if (p.engine == to_string(Algorithm::raft))
        r["term"] = p.term;
    return codec::encode_bytes(r);
}

ConsensusPayload decode_payload(ByteView bytes)
{
    const auto r = codec::decode(bytes);
    ConsensusPayload p;
    p.engine = codec::get_string(r, "engine");
    if (p.engine == kGenesisEngine)
        codec::expect_keys(r, {"engine"});
    else if (p.engine == to_string(Algorithm::pbft))
    {
        codec::expect_keys(r, {"engine", "view", "sequence"});
        p.view = codec::get_uint(r, "view");
        p.sequence = codec::get_uint(r, "sequence");
    }
    else if (p.engine == to_string(Algorithm::poet_cft))
    {
        codec::expect_keys(r, {"engine", "round", "wait_ms"});
        p.round = codec::get_uint(r, "round");
        p.wait_ms = codec::get_int(r, "wait_ms");
    }
    else if (p.engine == to_string(Algorithm::raft))
    {
        codec::expect_keys(r, {"engine", "term"});
        p.term = codec::get_uint(r, "term");
    }
    else
        throw CodecError{"consensus payload: unknown engine '" + p.engine + "'"};
    return p;
}

ConsensusPayload pbft_payload(uint64_t view, uint64_t sequence)
{
    return {std::string{to_string(Algorithm::pbft)}, view, sequence, 0, 0, 0};
}

ConsensusPayload poet_payload(uint64_t round, int64_t wait_ms)
{
    return {std::string{to_string(Algorithm::poet_cft)}, 0, 0, round, wait_ms, 0};
}

ConsensusPayload raft_payload(uint64_t term)
{
    return {std::string{to_string(Algorithm::raft)}, 0, 0, 0, 0, term};
}

std::vector<std::string> verify_payload(const ledger::BlockHeader& header,
    const ledger::BlockHeader& previous, Algorithm active, const std::vector<std::string>& members)
{
    std::vector<std::string> v;
    ConsensusPayload p;
    try
    {
        p = decode_payload(header.consensus_payload);
    }
    catch (const CodecError& e)
    {
        v.push_back(std::string{"consensus payload malformed: "} + e.what());
        return v;
    }
    if (p.engine != to_string(active))
    {
        v.push_back("consensus engine '" + p.engine + "' but '" + std::string{to_string(active)} +
                    "' is active at block " + std::to_string(header.block_num));
        return v;
    }
    const auto is_member = [&](const std::string& id) {
        return std::find(members.begin(), members.end(), id) != members.end();
    };
    switch (active)
    {
    case Algorithm::pbft:
        if (members.empty())
            v.push_back("pbft requires a membership list");
        else if (p.sequence != header.block_num)
            v.push_back("pbft sequence does not match block number");
        else if (members[p.view % members.size()] != header.signer_public_key)
            v.push_back("pbft block not signed by the primary of view " + std::to_string(p.view));
        break;
    case Algorithm::poet_cft:
        if (p.round != header.block_num)
            v.push_back("poet round does not match block number");
        if (p.wait_ms < 0)
            v.push_back("poet wait is negative");
        break;
    case Algorithm::raft:
        if (!is_member(header.signer_public_key))
            v.push_back("raft block signer is not a member");
        if (p.term == 0)
            v.push_back("raft term must be positive");
        try
        {
            const auto prev = decode_payload(previous.consensus_payload);
            if (prev.engine == to_string(Algorithm::raft) && p.term < prev.term)
                v.push_back("raft term decreased");
        }
        catch (const CodecError&)
        {
            v.push_back("predecessor consensus payload malformed");
        }
        break;
    }
    return v;
}

int compare_preference(const ledger::BlockHeader& a, const ledger::BlockHeader& b)
{
    try
    {
        const auto pa = decode_payload(a.consensus_payload);
        const auto pb = decode_payload(b.consensus_payload);
        if (pa.engine == to_string(Algorithm::poet_cft) && pb.engine == pa.engine &&
            pa.wait_ms != pb.wait_ms)
            return pa.wait_ms < pb.wait_ms ? -1 : 1;
    }
    catch (const CodecError&)
    {
    }
    return 0;
}
}  // namespace airchain::consensus
