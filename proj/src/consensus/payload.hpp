// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common/bytes.hpp"
#include "consensus/algorithm.hpp"
#include "ledger/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace airchain::consensus
{
/// Engine-tagged fields stored in BlockHeader::consensus_payload.
struct ConsensusPayload
{
    std::string engine;  ///< an Algorithm name, or "genesis"
    uint64_t view = 0;      ///< pbft
    uint64_t sequence = 0;  ///< pbft
    uint64_t round = 0;     ///< poet_cft
    int64_t wait_ms = 0;    ///< poet_cft
    uint64_t term = 0;      ///< raft

    friend bool operator==(const ConsensusPayload&, const ConsensusPayload&) = default;
};

inline constexpr std::string_view kGenesisEngine = "genesis";

Bytes encode_payload(const ConsensusPayload& p);
ConsensusPayload decode_payload(ByteView bytes);

ConsensusPayload pbft_payload(uint64_t view, uint64_t sequence);
ConsensusPayload poet_payload(uint64_t round, int64_t wait_ms);
ConsensusPayload raft_payload(uint64_t term);

/// Checks a block's payload against the engine active at its height.
/// `previous` is the predecessor's header. Returns violations.
std::vector<std::string> verify_payload(const ledger::BlockHeader& header,
    const ledger::BlockHeader& previous, Algorithm active, const std::vector<std::string>& members);

/// Engine preference between two competing blocks at the same height:
/// negative when `a` is preferred, positive for `b`, zero for no opinion.
int compare_preference(const ledger::BlockHeader& a, const ledger::BlockHeader& b);
}  // namespace airchain::consensus
