// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "journal/genesis.hpp"
#include "common/error.hpp"
#include "consensus/payload.hpp"
#include "family/executor.hpp"
#include "family/settings.hpp"
#include "state/trie.hpp"

#include <fstream>
#include <sstream>

namespace airchain::journal
{
namespace
{
std::string nonce_for(std::string_view key, std::string_view value)
{
    return crypto::sha512_hex(std::string{"genesis:"} + std::string{key} + "=" + std::string{value}).substr(0, 32);
}
}  // namespace

ledger::Block make_genesis(const GenesisSpec& spec, const crypto::KeyPair& signer)
{
    if (spec.algorithm != consensus::Algorithm::poet_cft && spec.members.empty())
        throw ConfigError{"genesis: " + std::string{to_string(spec.algorithm)} + " needs a member list"};

    std::vector<std::pair<std::string_view, std::string>> settings{
        {family::kConsensusAlgorithmKey, std::string{to_string(spec.algorithm)}}};
    if (!spec.members.empty())
        settings.emplace_back(family::kConsensusMembersKey, family::join_members(spec.members));

    std::vector<ledger::Transaction> txns;
    for (const auto& [key, value] : settings)
        txns.push_back(family::make_setting_transaction(key, value, signer, nonce_for(key, value)));
    auto batch = ledger::build_batch(std::move(txns), signer);

    state::MerkleTrie trie;
    const family::Executor executor;
    const auto r = executor.execute_block(trie, state::empty_root(), {batch}, {});
    if (!r.ok())
        throw ConfigError{"genesis: " + r.violations.front()};

    consensus::ConsensusPayload payload;
    payload.engine = std::string{consensus::kGenesisEngine};
    return ledger::build_block({0, ledger::kGenesisPreviousId, {std::move(batch)}, r.state_root,
                                   consensus::encode_payload(payload)},
        signer);
}

ledger::Block load_genesis(const std::filesystem::path& path)
{
    std::ifstream in{path};
    if (!in)
        throw IoError{"genesis: cannot read " + path.string()};
    std::string line;
    std::getline(in, line);
    return ledger::decode_block(line);
}

void save_genesis(const std::filesystem::path& path, const ledger::Block& genesis)
{
    std::ofstream out{path, std::ios::trunc};
    out << ledger::encode_block(genesis) << '\n';
    if (!out)
        throw IoError{"genesis: cannot write " + path.string()};
}
}  // namespace airchain::journal
