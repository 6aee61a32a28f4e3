// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace airchain::registry
{
enum class KeyStatus
{
    active,
    revoked,
    unknown,
};

std::string_view to_string(KeyStatus s) noexcept;

struct ApiKey
{
    std::string key;  ///< 64 lowercase hex
    KeyStatus status = KeyStatus::active;
    int64_t issued_at = 0;
};

struct AccountFlag
{
    std::string reason;
    std::optional<std::string> z_score;  ///< decimal text
    int64_t at = 0;
};

struct Account
{
    std::string account_id;
    std::vector<ApiKey> api_keys;
    std::vector<AccountFlag> flags;
};

/// API-key accounts rebuilt from an append-only event log. Mutations are
/// serialised; readers see a consistent snapshot.
class Registry
{
public:
    /// Memory only.
    Registry() = default;
    /// Replays `path` if it exists and appends new events to it. Throws
    /// IoError or CodecError on an unreadable log.
    explicit Registry(const std::filesystem::path& path);
    /// Memory only, rebuilt from encoded event records.
    explicit Registry(const std::vector<std::string>& events);

    /// Creates the account on first use. Throws ConfigError for a malformed
    /// account id, IoError when the event cannot be persisted.
    std::string issue_key(const std::string& account_id, int64_t now_s);

    /// Idempotent. Throws NotFoundError for a key never issued.
    void revoke_key(const std::string& key, int64_t now_s);

    KeyStatus check_key(const std::string& key) const;

    void flag(const std::string& account_id, const std::string& reason,
        std::optional<std::string> z_score, int64_t now_s);

    std::optional<Account> account(const std::string& account_id) const;
    std::vector<Account> accounts() const;

    /// Every event applied so far, in order.
    std::vector<std::string> events() const;

private:
    void apply(const std::string& event_text);
    void persist(const std::string& event_text);

    mutable std::shared_mutex mutex_;
    std::map<std::string, Account> accounts_;
    std::map<std::string, std::string> owner_;  ///< key -> account id
    std::vector<std::string> events_;
    std::ofstream log_;
};
}  // namespace airchain::registry
