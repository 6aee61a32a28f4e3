// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "common/error.hpp"
#include "ledger/codec.hpp"
#include "state/trie.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>

using namespace airchain;
using state::MerkleTrie;

namespace
{
std::string random_address(fixture::Rng& rng)
{
    // Share a namespace prefix so paths overlap near the root.
    return "616972" + fixture::random_hex(rng, 64);
}

/// Root of a fresh trie holding exactly `m`: the shadow-map oracle.
std::string root_of(const std::map<std::string, Bytes>& m)
{
    MerkleTrie t;
    auto root = state::empty_root();
    for (const auto& [k, v] : m)
        root = t.set(root, k, v);
    return root;
}
}  // namespace

TEST(trie, empty_root_is_sha512_of_nothing)
{
    EXPECT_EQ(state::empty_root().substr(0, 16), "cf83e1357eefb8bd");
    EXPECT_EQ(state::empty_root(), crypto::sha512_hex(ByteView{}));
}

TEST(trie, empty_trie_reads_absent)
{
    MerkleTrie t;
    fixture::Rng rng{1};
    EXPECT_FALSE(t.get(state::empty_root(), random_address(rng)));
}

TEST(trie, set_then_get)
{
    MerkleTrie t;
    fixture::Rng rng{2};
    const auto a = random_address(rng);
    const auto root = t.set(state::empty_root(), a, to_bytes("v"));
    EXPECT_EQ(t.get(root, a), to_bytes("v"));
    EXPECT_NE(root, state::empty_root());
}

TEST(trie, idempotent_write)
{
    MerkleTrie t;
    fixture::Rng rng{3};
    const auto a = random_address(rng);
    const auto r1 = t.set(state::empty_root(), a, to_bytes("v"));
    EXPECT_EQ(t.set(r1, a, to_bytes("v")), r1);
}

TEST(trie, write_order_permutations_yield_identical_roots)
{
    fixture::Rng rng{4};
    std::vector<std::pair<std::string, Bytes>> writes;
    for (int i = 0; i < 6; ++i)
        writes.emplace_back(random_address(rng), fixture::random_bytes(rng, 8));
    // Two addresses sharing a long prefix exercise deep branching.
    writes[1].first = writes[0].first.substr(0, 60) + fixture::random_hex(rng, 10);

    std::vector<size_t> order(writes.size());
    std::iota(order.begin(), order.end(), 0);
    MerkleTrie t;
    std::optional<std::string> expected;
    size_t permutations = 0;
    do
    {
        auto root = state::empty_root();
        for (const auto i : order)
            root = t.set(root, writes[i].first, writes[i].second);
        if (!expected)
            expected = root;
        ASSERT_EQ(root, *expected);
        ++permutations;
    } while (std::next_permutation(order.begin(), order.end()));
    EXPECT_EQ(permutations, 720u);
}

TEST(trie, random_writes_match_shadow_map)
{
    fixture::Rng rng{5};
    MerkleTrie t;
    std::map<std::string, Bytes> shadow;
    auto root = state::empty_root();
    for (int i = 0; i < 100; ++i)
    {
        const auto a = random_address(rng);
        const auto v = fixture::random_bytes(rng, static_cast<size_t>(fixture::uniform(rng, 0, 20)));
        root = t.set(root, a, v);
        shadow[a] = v;
    }
    for (const auto& [a, v] : shadow)
        EXPECT_EQ(t.get(root, a), v);
    EXPECT_EQ(root, root_of(shadow));
}

TEST(trie, old_roots_remain_readable)
{
    fixture::Rng rng{6};
    MerkleTrie t;
    const auto a = random_address(rng);
    const auto b = random_address(rng);
    const auto r1 = t.set(state::empty_root(), a, to_bytes("1"));
    const auto r2 = t.set(r1, a, to_bytes("2"));
    const auto r3 = t.set(r2, b, to_bytes("3"));
    const auto r4 = t.remove(r3, a);
    EXPECT_EQ(t.get(r1, a), to_bytes("1"));
    EXPECT_FALSE(t.get(r1, b));
    EXPECT_EQ(t.get(r2, a), to_bytes("2"));
    EXPECT_EQ(t.get(r3, a), to_bytes("2"));
    EXPECT_FALSE(t.get(r4, a));
    EXPECT_EQ(t.get(r4, b), to_bytes("3"));
}

TEST(trie, delete_restores_previous_root)
{
    fixture::Rng rng{7};
    MerkleTrie t;
    auto root = state::empty_root();
    for (int i = 0; i < 10; ++i)
        root = t.set(root, random_address(rng), to_bytes("x"));
    const auto a = random_address(rng);
    const auto with = t.set(root, a, to_bytes("y"));
    EXPECT_EQ(t.remove(with, a), root);
    EXPECT_EQ(t.remove(root, a), root);
    EXPECT_EQ(t.remove(state::empty_root(), a), state::empty_root());
}

TEST(trie, interleaved_set_delete_matches_shadow_map)
{
    fixture::Rng rng{8};
    MerkleTrie t;
    std::map<std::string, Bytes> shadow;
    std::vector<std::string> pool;
    for (int i = 0; i < 40; ++i)
        pool.push_back(random_address(rng));
    auto root = state::empty_root();
    for (int step = 0; step < 600; ++step)
    {
        const auto& a = pool[rng() % pool.size()];
        if (rng() % 3 == 0)
        {
            root = t.remove(root, a);
            shadow.erase(a);
        }
        else
        {
            const auto v = fixture::random_bytes(rng, 4);
            root = t.set(root, a, v);
            shadow[a] = v;
        }
        if (step % 50 == 0)
            ASSERT_EQ(root, root_of(shadow));
    }
    for (const auto& a : pool)
    {
        const auto it = shadow.find(a);
        EXPECT_EQ(t.get(root, a), it == shadow.end() ? std::nullopt : std::optional{it->second});
    }
    EXPECT_EQ(root, root_of(shadow));
}

TEST(trie, batch_apply_equals_sequential_sets)
{
    fixture::Rng rng{9};
    MerkleTrie t;
    state::ChangeSet changes;
    auto sequential = state::empty_root();
    for (int i = 0; i < 50; ++i)
    {
        const auto a = random_address(rng);
        const auto v = fixture::random_bytes(rng, 6);
        changes[a] = v;
        sequential = t.set(sequential, a, v);
    }
    EXPECT_EQ(t.apply(state::empty_root(), changes), sequential);
}

TEST(trie, malformed_addresses_rejected)
{
    MerkleTrie t;
    const std::string short_addr(69, 'a');
    EXPECT_THROW(t.get(state::empty_root(), short_addr), TrieError);
    EXPECT_THROW(t.set(state::empty_root(), std::string(70, 'A'), {}), TrieError);
    EXPECT_THROW(t.remove(state::empty_root(), std::string(70, 'g')), TrieError);
    EXPECT_THROW(t.get(std::string(128, '1'), std::string(70, 'a')), TrieError);
}

TEST(trie, proofs_verify_and_detect_replay)
{
    fixture::Rng rng{10};
    MerkleTrie t;
    std::map<std::string, Bytes> shadow;
    auto root = state::empty_root();
    for (int i = 0; i < 30; ++i)
    {
        const auto a = random_address(rng);
        shadow[a] = fixture::random_bytes(rng, 5);
        root = t.set(root, a, shadow[a]);
    }
    const auto other_root = t.set(root, random_address(rng), to_bytes("z"));
    for (const auto& [a, v] : shadow)
    {
        const auto proof = t.prove(root, a);
        EXPECT_EQ(proof.size(), state::kAddressLen + 1);
        EXPECT_TRUE(MerkleTrie::verify_proof(root, a, v, proof));
        EXPECT_FALSE(MerkleTrie::verify_proof(root, a, to_bytes("wrong"), proof));
        EXPECT_FALSE(MerkleTrie::verify_proof(root, a, std::nullopt, proof));
        EXPECT_FALSE(MerkleTrie::verify_proof(other_root, a, v, proof));
    }
    const auto absent = random_address(rng);
    const auto absence = t.prove(root, absent);
    EXPECT_TRUE(MerkleTrie::verify_proof(root, absent, std::nullopt, absence));
    EXPECT_FALSE(MerkleTrie::verify_proof(root, absent, to_bytes("v"), absence));

    EXPECT_TRUE(MerkleTrie::verify_proof(state::empty_root(), absent, std::nullopt, {}));
    EXPECT_THROW(MerkleTrie::verify_proof(crypto::sha512_hex(std::string_view{"x"}), absent,
                     std::nullopt, {"x"}),
        TrieError);
}

TEST(trie, node_encoding_matches_codec)
{
    state::TrieNode n;
    n.children[0] = crypto::sha512(as_bytes("a"));
    n.children[11] = crypto::sha512(as_bytes("b"));
    codec::Record r{{"children", {{"0", to_hex(*n.children[0])}, {"b", to_hex(*n.children[11])}}}};
    EXPECT_EQ(n.encode(), codec::encode(r));
    state::TrieNode leaf;
    leaf.value = to_bytes("hi");
    EXPECT_EQ(leaf.encode(), codec::encode(codec::Record{{"children", codec::Record::object()},
                                 {"value", to_hex(to_bytes("hi"))}}));
    EXPECT_EQ(state::TrieNode::decode(n.encode()).encode(), n.encode());
    EXPECT_THROW(state::TrieNode::decode(R"({"value":"00","children":{}, "x":"1"})"), TrieError);
}

TEST(trie, for_each_visits_prefix_in_order)
{
    MerkleTrie t;
    auto root = state::empty_root();
    const std::vector<std::string> addrs = {"616972" + std::string(64, '1'),
        "616972" + std::string(64, '0'), "000000" + std::string(64, 'f')};
    for (const auto& a : addrs)
        root = t.set(root, a, to_bytes(a.substr(0, 6)));
    std::vector<std::string> seen;
    t.for_each(root, "616972", [&](const std::string& a, const Bytes& v) {
        seen.push_back(a);
        EXPECT_EQ(v, to_bytes("616972"));
    });
    EXPECT_EQ(seen, (std::vector<std::string>{addrs[1], addrs[0]}));
    size_t all = 0;
    t.for_each(root, "", [&](const std::string&, const Bytes&) { ++all; });
    EXPECT_EQ(all, 3u);
}

TEST(trie, file_backed_store_survives_reopen)
{
    const auto path = std::filesystem::temp_directory_path() / "airchain_trie_test.nodes";
    std::filesystem::remove(path);
    fixture::Rng rng{12};
    const auto a = random_address(rng);
    std::string root;
    {
        MerkleTrie t{std::make_shared<state::NodeStore>(path)};
        root = t.set(state::empty_root(), a, to_bytes("durable"));
    }
    MerkleTrie reopened{std::make_shared<state::NodeStore>(path)};
    EXPECT_EQ(reopened.get(root, a), to_bytes("durable"));
    std::filesystem::remove(path);
}
