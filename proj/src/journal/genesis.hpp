// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "consensus/algorithm.hpp"
#include "ledger/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace airchain::journal
{
struct GenesisSpec
{
    consensus::Algorithm algorithm = consensus::Algorithm::poet_cft;
    /// Validator public keys. Required for pbft and raft.
    std::vector<std::string> members;
};

/// Block 0: one settings batch fixing the initial engine and membership.
/// Deterministic for a given spec and signer.
ledger::Block make_genesis(const GenesisSpec& spec, const crypto::KeyPair& signer);

/// Genesis file: the block's canonical encoding on one line.
ledger::Block load_genesis(const std::filesystem::path& path);
void save_genesis(const std::filesystem::path& path, const ledger::Block& genesis);
}  // namespace airchain::journal
