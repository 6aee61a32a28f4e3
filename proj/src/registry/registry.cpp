// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "registry/registry.hpp"
#include "common/error.hpp"
#include "ledger/codec.hpp"
#include "ledger/crypto.hpp"

#include <algorithm>
#include <mutex>

namespace airchain::registry
{
namespace
{
constexpr size_t kKeyBytes = 32;
constexpr size_t kMaxAccountIdLen = 128;

bool is_lower_hex(std::string_view s) noexcept
{
    return std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

void check_account_id(const std::string& id)
{
    if (id.empty() || id.size() > kMaxAccountIdLen || !is_lower_hex(id))
        throw ConfigError{"registry: account id must be 1-128 lowercase hex characters"};
}
}  // namespace

std::string_view to_string(KeyStatus s) noexcept
{
    switch (s)
    {
    case KeyStatus::active:
        return "active";
    case KeyStatus::revoked:
        return "revoked";
    case KeyStatus::unknown:
        return "unknown";
    }
    return "unknown";
}

Registry::Registry(const std::filesystem::path& path)
{
    if (std::ifstream in{path})
    {
        std::string line;
        while (std::getline(in, line))
        {
            if (!line.empty())
                apply(line);
        }
    }
    log_.open(path, std::ios::app);
    if (!log_)
        throw IoError{"registry: cannot open " + path.string()};
}

Registry::Registry(const std::vector<std::string>& events)
{
    for (const auto& e : events)
        apply(e);
}

void Registry::apply(const std::string& event_text)
{
    const auto e = codec::decode(event_text);
    const auto type = codec::get_string(e, "type");
    const auto at = codec::get_int(e, "at");
    if (type == "issue")
    {
        const auto account_id = codec::get_string(e, "account");
        const auto key = codec::get_hex(e, "key", kKeyBytes * 2);
        if (owner_.contains(key))
            throw CodecError{"registry: key issued twice"};
        auto& account = accounts_[account_id];
        account.account_id = account_id;
        account.api_keys.push_back({key, KeyStatus::active, at});
        owner_.emplace(key, account_id);
    }
    else if (type == "revoke")
    {
        const auto key = codec::get_hex(e, "key", kKeyBytes * 2);
        const auto it = owner_.find(key);
        if (it == owner_.end())
            throw CodecError{"registry: revoke of unknown key"};
        for (auto& k : accounts_.at(it->second).api_keys)
        {
            if (k.key == key)
                k.status = KeyStatus::revoked;
        }
    }
    else if (type == "flag")
    {
        const auto account_id = codec::get_string(e, "account");
        auto& account = accounts_[account_id];
        account.account_id = account_id;
        AccountFlag f{codec::get_string(e, "reason"), std::nullopt, at};
        if (e.contains("z_score"))
            f.z_score = codec::get_string(e, "z_score");
        account.flags.push_back(std::move(f));
    }
    else
        throw CodecError{"registry: unknown event type " + type};
    events_.push_back(event_text);
}

void Registry::persist(const std::string& event_text)
{
    if (!log_.is_open())
        return;
    log_ << event_text << '\n';
    log_.flush();
    if (!log_)
        throw IoError{"registry: event log write failed"};
}

std::string Registry::issue_key(const std::string& account_id, int64_t now_s)
{
    check_account_id(account_id);
    std::unique_lock lock{mutex_};
    std::string key;
    do
        key = to_hex(crypto::random_bytes(kKeyBytes));
    while (owner_.contains(key));
    const auto event = codec::encode({{"type", "issue"}, {"account", account_id}, {"key", key}, {"at", now_s}});
    persist(event);
    apply(event);
    return key;
}

void Registry::revoke_key(const std::string& key, int64_t now_s)
{
    std::unique_lock lock{mutex_};
    const auto it = owner_.find(key);
    if (it == owner_.end())
        throw NotFoundError{"registry: unknown key"};
    for (const auto& k : accounts_.at(it->second).api_keys)
    {
        if (k.key == key && k.status == KeyStatus::revoked)
            return;
    }
    const auto event = codec::encode({{"type", "revoke"}, {"key", key}, {"at", now_s}});
    persist(event);
    apply(event);
}

KeyStatus Registry::check_key(const std::string& key) const
{
    std::shared_lock lock{mutex_};
    const auto it = owner_.find(key);
    if (it == owner_.end())
        return KeyStatus::unknown;
    for (const auto& k : accounts_.at(it->second).api_keys)
    {
        if (k.key == key)
            return k.status;
    }
    return KeyStatus::unknown;
}

void Registry::flag(const std::string& account_id, const std::string& reason,
    std::optional<std::string> z_score, int64_t now_s)
{
    check_account_id(account_id);
    codec::Record e{{"type", "flag"}, {"account", account_id}, {"reason", reason}, {"at", now_s}};
    if (z_score)
        e["z_score"] = *z_score;
    std::unique_lock lock{mutex_};
    const auto event = codec::encode(e);
    persist(event);
    apply(event);
}

std::optional<Account> Registry::account(const std::string& account_id) const
{
    std::shared_lock lock{mutex_};
    const auto it = accounts_.find(account_id);
    if (it == accounts_.end())
        return std::nullopt;
    return it->second;
}

std::vector<Account> Registry::accounts() const
{
    std::shared_lock lock{mutex_};
    std::vector<Account> out;
    for (const auto& [_, a] : accounts_)
        out.push_back(a);
    return out;
}

std::vector<std::string> Registry::events() const
{
    std::shared_lock lock{mutex_};
    return events_;
}
}  // namespace airchain::registry
