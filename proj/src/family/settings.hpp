// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "family/handler.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace airchain::family
{
inline constexpr std::string_view kSettingsFamily = "settings";
inline constexpr std::string_view kSettingsVersion = "1.0";
inline constexpr std::string_view kSettingsNamespace = "000000";

/// Active consensus engine name: pbft, poet_cft or raft.
inline constexpr std::string_view kConsensusAlgorithmKey = "consensus.algorithm";
/// Comma-separated validator public keys, fixed membership for pbft/raft.
inline constexpr std::string_view kConsensusMembersKey = "consensus.members";

std::string settings_address(std::string_view key);

/// Value of a setting under `root`, if set.
std::optional<std::string> read_setting(
    const state::MerkleTrie& trie, const std::string& root, std::string_view key);

std::vector<std::string> split_members(std::string_view value);
std::string join_members(const std::vector<std::string>& members);

ledger::Transaction make_setting_transaction(std::string_view key, std::string_view value,
    const crypto::KeyPair& signer, std::string nonce = {});

/// Accepts only known keys with well-formed values; anything else rejects
/// the transaction.
class SettingsHandler final : public TransactionHandler
{
public:
    std::string_view family_name() const noexcept override { return kSettingsFamily; }
    std::string_view family_version() const noexcept override { return kSettingsVersion; }
    ApplyResult apply(const ledger::Transaction& txn, const StateReader& state,
        const ExecContext& ctx) const override;
};
}  // namespace airchain::family
