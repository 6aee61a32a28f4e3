// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "family/settings.hpp"
#include "common/error.hpp"
#include "consensus/algorithm.hpp"

namespace airchain::family
{
std::string settings_address(std::string_view key)
{
    return std::string{kSettingsNamespace} + crypto::sha512_hex(key).substr(0, 64);
}

std::optional<std::string> read_setting(
    const state::MerkleTrie& trie, const std::string& root, std::string_view key)
{
    const auto raw = trie.get(root, settings_address(key));
    if (!raw)
        return std::nullopt;
    return codec::get_string(codec::decode(*raw), "value");
}

std::vector<std::string> split_members(std::string_view value)
{
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= value.size() && !value.empty())
    {
        const auto comma = value.find(',', start);
        const auto end = comma == std::string_view::npos ? value.size() : comma;
        out.emplace_back(value.substr(start, end - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::string join_members(const std::vector<std::string>& members)
{
    std::string out;
    for (const auto& m : members)
    {
        if (!out.empty())
            out += ',';
        out += m;
    }
    return out;
}

ledger::Transaction make_setting_transaction(
    std::string_view key, std::string_view value, const crypto::KeyPair& signer, std::string nonce)
{
    const auto address = settings_address(key);
    ledger::TransactionSpec spec{std::string{kSettingsFamily}, std::string{kSettingsVersion},
        codec::encode_bytes(codec::Record{{"key", key}, {"value", value}}), {address}, {address}};
    return ledger::build_transaction(spec, signer, std::move(nonce));
}

ApplyResult SettingsHandler::apply(
    const ledger::Transaction& txn, const StateReader&, const ExecContext&) const
{
    ApplyResult result;
    std::string key, value;
    try
    {
        const auto rec = codec::decode(txn.payload);
        codec::expect_keys(rec, {"key", "value"});
        key = codec::get_string(rec, "key");
        value = codec::get_string(rec, "value");
    }
    catch (const CodecError& e)
    {
        result.violations.push_back(std::string{"payload codec error: "} + e.what());
        return result;
    }

    if (key == kConsensusAlgorithmKey)
    {
        if (!consensus::parse_algorithm(value))
            result.violations.push_back("unknown consensus algorithm '" + value + "'");
    }
    else if (key == kConsensusMembersKey)
    {
        const auto members = split_members(value);
        if (members.empty())
            result.violations.push_back("consensus.members is empty");
        for (const auto& m : members)
        {
            if (!is_lower_hex(m, crypto::kPublicKeyHexLen))
                result.violations.push_back("malformed member key '" + m.substr(0, 16) + "'");
        }
    }
    else
        result.violations.push_back("unknown setting '" + key + "'");

    if (result.ok())
        result.delta.emplace(
            settings_address(key), codec::encode_bytes(codec::Record{{"key", key}, {"value", value}}));
    return result;
}
}  // namespace airchain::family
