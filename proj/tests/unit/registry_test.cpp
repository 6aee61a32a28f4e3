// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "common/error.hpp"
#include "registry/registry.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <unistd.h>

namespace airchain::registry
{
namespace
{
TEST(registry, issued_keys_are_active_and_distinct)
{
    Registry r;
    std::set<std::string> keys;
    for (int i = 0; i < 10'000; ++i)
        keys.insert(r.issue_key(i % 2 ? "aa" : "bb", i));
    EXPECT_EQ(keys.size(), 10'000u);
    for (const auto& k : keys)
    {
        ASSERT_EQ(k.size(), 64u);
        ASSERT_EQ(r.check_key(k), KeyStatus::active);
    }
    EXPECT_EQ(r.account("aa")->api_keys.size(), 5'000u);
}

TEST(registry, revoke_is_idempotent)
{
    Registry r;
    const auto k = r.issue_key("0a", 1);
    r.revoke_key(k, 2);
    const auto events = r.events().size();
    r.revoke_key(k, 3);
    EXPECT_EQ(r.check_key(k), KeyStatus::revoked);
    EXPECT_EQ(r.events().size(), events);
}

TEST(registry, unknown_keys)
{
    Registry r;
    EXPECT_EQ(r.check_key(std::string(64, 'f')), KeyStatus::unknown);
    EXPECT_EQ(r.check_key(""), KeyStatus::unknown);
    EXPECT_THROW(r.revoke_key(std::string(64, 'f'), 1), NotFoundError);
}

TEST(registry, account_ids_are_lowercase_hex)
{
    Registry r;
    EXPECT_THROW(r.issue_key("", 1), ConfigError);
    EXPECT_THROW(r.issue_key("ABC", 1), ConfigError);
    EXPECT_THROW(r.issue_key(std::string(129, 'a'), 1), ConfigError);
    EXPECT_NO_THROW(r.issue_key(std::string(128, 'a'), 1));
}

TEST(registry, replaying_events_rebuilds_the_same_state)
{
    fixture::Rng rng{9};
    Registry live;
    std::vector<std::string> issued;
    // Independent model: key -> revoked?
    std::map<std::string, bool> model;
    for (int step = 0; step < 500; ++step)
    {
        const auto op = fixture::uniform(rng, 0, 3);
        if (op <= 1 || issued.empty())
        {
            const auto account = fixture::random_hex(rng, 4);
            issued.push_back(live.issue_key(account, step));
            model[issued.back()] = false;
        }
        else if (op == 2)
        {
            const auto& k = issued[static_cast<size_t>(fixture::uniform(rng, 0, static_cast<int64_t>(issued.size()) - 1))];
            live.revoke_key(k, step);
            model[k] = true;
        }
        else
            live.flag(fixture::random_hex(rng, 4), "poet-z-test", "3.1000", step);
    }
    const Registry replayed{live.events()};
    for (const auto& [k, revoked] : model)
    {
        EXPECT_EQ(live.check_key(k), revoked ? KeyStatus::revoked : KeyStatus::active);
        EXPECT_EQ(replayed.check_key(k), live.check_key(k));
    }
    ASSERT_EQ(replayed.accounts().size(), live.accounts().size());
    for (const auto& a : live.accounts())
    {
        const auto b = replayed.account(a.account_id);
        ASSERT_TRUE(b);
        EXPECT_EQ(b->api_keys.size(), a.api_keys.size());
        EXPECT_EQ(b->flags.size(), a.flags.size());
    }
}

TEST(registry, log_survives_reopen)
{
    const auto path = std::filesystem::temp_directory_path() /
                      ("airchain-registry-" + std::to_string(::getpid()) + ".log");
    std::filesystem::remove(path);
    std::string a, b;
    {
        Registry r{path};
        a = r.issue_key("01", 1);
        b = r.issue_key("02", 2);
        r.revoke_key(a, 3);
        r.flag("02", "poet-z-test", "2.6000", 4);
    }
    {
        Registry r{path};
        EXPECT_EQ(r.check_key(a), KeyStatus::revoked);
        EXPECT_EQ(r.check_key(b), KeyStatus::active);
        ASSERT_EQ(r.account("02")->flags.size(), 1u);
        EXPECT_EQ(r.account("02")->flags[0].z_score, std::optional<std::string>{"2.6000"});
    }
    std::filesystem::remove(path);
}

TEST(registry, malformed_events_are_refused)
{
    EXPECT_THROW(Registry{std::vector<std::string>{"not a record"}}, CodecError);
    EXPECT_THROW(Registry{std::vector<std::string>{R"({"at":1,"type":"mint"})"}}, CodecError);
}
}  // namespace
}  // namespace airchain::registry
