// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "common/error.hpp"
#include "consensus/analysis.hpp"
#include "consensus/payload.hpp"
#include "consensus/pbft.hpp"
#include "consensus/raft.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <numbers>

namespace airchain::consensus
{
namespace
{
// ------------------------------------------------------------------ analysis

TEST(max_faults, examples)
{
    EXPECT_EQ(max_faults(4), 1);
    EXPECT_EQ(max_faults(3), 0);
    EXPECT_EQ(max_faults(10), 3);
    EXPECT_EQ(max_faults(1), 0);
}

TEST(sybil_threshold, examples)
{
    const double ee = std::pow(std::numbers::e, std::numbers::e);
    EXPECT_NEAR(sybil_threshold(ee), 1.0 / std::numbers::e, 1e-12);
    EXPECT_NEAR(sybil_threshold(100), 0.33162, 1e-5);
    EXPECT_THROW(sybil_threshold(2), Error);
}

TEST(ztest, examples)
{
    const auto fair = ztest_winrate(10, 100, 10);
    EXPECT_DOUBLE_EQ(fair.z, 0.0);
    EXPECT_FALSE(fair.flagged);

    const auto hot = ztest_winrate(50, 100, 10);
    EXPECT_NEAR(hot.z, 40.0 / 3.0, 1e-9);
    EXPECT_TRUE(hot.flagged);

    EXPECT_THROW(ztest_winrate(5, 50, 10), InsufficientDataError);
}

TEST(ztest, threshold_is_strict)
{
    // n=2, rounds=100: sigma = 5, so 63 wins gives z = 2.6 and 62 gives 2.4.
    EXPECT_TRUE(ztest_winrate(63, 100, 2).flagged);
    EXPECT_FALSE(ztest_winrate(62, 100, 2).flagged);
}

TEST(poet, wait_from_uniform)
{
    EXPECT_EQ(poet_wait_from_uniform(1000, 1.0), 0);
    EXPECT_EQ(poet_wait_from_uniform(1000, std::exp(-1.0)), 1000);
    EXPECT_EQ(poet_wait_from_uniform(10, 0.5), static_cast<int64_t>(std::ceil(-10 * std::log(0.5))));
}

TEST(poet, elect_breaks_ties_by_id)
{
    EXPECT_EQ(poet_elect({{"a", 5}, {"b", 5}, {"c", 9}}), "a");
    EXPECT_EQ(poet_elect({{"b", 1}, {"a", 2}}), "b");
    EXPECT_THROW(poet_elect({}), Error);
}

TEST(poet, seeded_elections_reproduce)
{
    const auto run = [] {
        std::mt19937_64 rng{42};
        std::vector<std::string> winners;
        for (int round = 0; round < 200; ++round)
        {
            std::map<std::string, int64_t> waits;
            for (const char* id : {"n0", "n1", "n2", "n3"})
                waits[id] = poet_draw_wait(1000, rng);
            winners.push_back(poet_elect(waits));
        }
        return winners;
    };
    EXPECT_EQ(run(), run());
}

TEST(poet, draws_are_positive_with_the_configured_mean)
{
    std::mt19937_64 rng{7};
    double sum = 0;
    constexpr int kDraws = 20000;
    for (int i = 0; i < kDraws; ++i)
    {
        const auto w = poet_draw_wait(1000, rng);
        ASSERT_GE(w, 0);
        sum += static_cast<double>(w);
    }
    // ceil adds about half a millisecond; 4 sigma of the mean is about 28 ms.
    EXPECT_NEAR(sum / kDraws, 1000.5, 30);
}

// ------------------------------------------------------------------ payload

TEST(payload, round_trips_every_engine)
{
    for (const auto& p : {pbft_payload(3, 9), poet_payload(4, 1234), raft_payload(7)})
        EXPECT_EQ(decode_payload(encode_payload(p)), p);
}

// --------------------------------------------------------------------- pbft

struct PbftNet
{
    std::vector<std::string> ids{"r0", "r1", "r2", "r3"};
    std::vector<PbftReplica> replicas;
    std::deque<std::pair<size_t, PbftMessage>> queue;  // (recipient, message)
    std::vector<std::optional<std::string>> commits;
    std::vector<bool> proposals;

    explicit PbftNet(uint64_t sequence = 1)
    {
        for (const auto& id : ids)
            replicas.emplace_back(ids, id, sequence);
        commits.resize(ids.size());
        proposals.resize(ids.size());
    }

    void absorb(size_t from, const PbftOutput& out)
    {
        for (const auto& m : out.broadcast)
        {
            for (size_t to = 0; to < ids.size(); ++to)
            {
                if (to != from)
                    queue.emplace_back(to, m);
            }
        }
        if (out.commit)
            commits[from] = out.commit;
        if (out.propose || out.repropose)
            proposals[from] = true;
    }

    void pump(const std::set<size_t>& silent = {})
    {
        while (!queue.empty())
        {
            auto [to, m] = queue.front();
            queue.pop_front();
            if (silent.contains(to))
                continue;
            absorb(to, replicas[to].on_message(m));
        }
    }
};

TEST(pbft, honest_round_commits_everywhere)
{
    PbftNet net;
    ASSERT_TRUE(net.replicas[0].is_primary());
    EXPECT_EQ(net.replicas[0].f(), 1);
    net.absorb(0, net.replicas[0].propose("d1"));
    net.pump();
    for (size_t i = 0; i < net.ids.size(); ++i)
    {
        ASSERT_TRUE(net.commits[i].has_value()) << "replica " << i;
        EXPECT_EQ(*net.commits[i], "d1");
        EXPECT_EQ(net.replicas[i].phase(), PbftPhase::committed);
    }
}

TEST(pbft, commits_with_one_silent_replica)
{
    PbftNet net;
    net.absorb(0, net.replicas[0].propose("d1"));
    net.pump({3});
    for (size_t i : {0u, 1u, 2u})
        EXPECT_EQ(net.commits[i], std::optional<std::string>{"d1"});
    EXPECT_FALSE(net.commits[3]);
}

TEST(pbft, equivocating_primary_stalls_then_view_changes)
{
    PbftNet net;
    // The primary shows d-a to r1 and r2 and d-b to r3, and then goes quiet.
    for (size_t to : {1u, 2u, 3u})
    {
        PbftMessage pp{PbftMessage::Kind::pre_prepare, 0, 1, to == 3 ? "d-b" : "d-a", "r0", 0};
        net.absorb(to, net.replicas[to].on_message(pp));
    }
    net.pump({0});
    for (size_t i = 0; i < net.ids.size(); ++i)
        EXPECT_FALSE(net.commits[i]) << "replica " << i;

    for (size_t i : {1u, 2u, 3u})
        net.absorb(i, net.replicas[i].on_timeout());
    net.pump({0});
    for (size_t i : {1u, 2u, 3u})
    {
        EXPECT_EQ(net.replicas[i].view(), 1u);
        EXPECT_EQ(net.replicas[i].view_changes(), 1u);
    }
    EXPECT_EQ(net.replicas[1].primary(), "r1");
    EXPECT_TRUE(net.proposals[1]);
}

TEST(pbft, stale_view_message_is_ignored)
{
    PbftNet net;
    for (size_t i = 0; i < net.ids.size(); ++i)
        net.absorb(i, net.replicas[i].on_timeout());
    net.pump();
    ASSERT_EQ(net.replicas[2].view(), 1u);

    const auto before_phase = net.replicas[2].phase();
    const auto out = net.replicas[2].on_message({PbftMessage::Kind::pre_prepare, 0, 1, "old", "r0", 0});
    EXPECT_TRUE(out.broadcast.empty());
    EXPECT_FALSE(out.commit);
    EXPECT_EQ(net.replicas[2].phase(), before_phase);
    EXPECT_FALSE(net.replicas[2].pre_prepared());
}

TEST(pbft, non_member_and_wrong_primary_are_ignored)
{
    PbftNet net;
    auto out = net.replicas[1].on_message({PbftMessage::Kind::pre_prepare, 0, 1, "x", "stranger", 0});
    EXPECT_TRUE(out.broadcast.empty());
    out = net.replicas[1].on_message({PbftMessage::Kind::pre_prepare, 0, 1, "x", "r2", 0});
    EXPECT_TRUE(out.broadcast.empty());
    EXPECT_FALSE(net.replicas[1].pre_prepared());
}

TEST(pbft, prepared_block_is_carried_into_the_next_view)
{
    PbftNet net;
    net.absorb(0, net.replicas[0].propose("d1"));
    // Deliver everything except commits, so replicas prepare without deciding.
    while (!net.queue.empty())
    {
        auto [to, m] = net.queue.front();
        net.queue.pop_front();
        if (m.kind != PbftMessage::Kind::commit)
            net.absorb(to, net.replicas[to].on_message(m));
    }
    ASSERT_EQ(net.replicas[1].phase(), PbftPhase::prepared);
    std::optional<std::string> carried;
    for (size_t i : {1u, 2u, 3u})
    {
        const auto out = net.replicas[i].on_timeout();
        net.absorb(i, out);
    }
    while (!net.queue.empty())
    {
        auto [to, m] = net.queue.front();
        net.queue.pop_front();
        if (to == 0)
            continue;
        const auto out = net.replicas[to].on_message(m);
        if (out.repropose)
            carried = out.repropose;
        net.absorb(to, out);
    }
    EXPECT_EQ(carried, std::optional<std::string>{"d1"});
}

TEST(pbft, message_codec_round_trip)
{
    PbftMessage m{PbftMessage::Kind::view_change, 3, 9, "abc", "r2", 2};
    EXPECT_EQ(pbft_message_from_record(to_record(m)), m);
}

// --------------------------------------------------------------------- raft

struct RaftNet
{
    std::vector<std::string> ids;
    std::map<std::string, RaftNode> nodes;
    std::deque<std::pair<std::string, RaftMessage>> queue;
    std::map<std::string, std::vector<RaftEntry>> committed;
    std::map<uint64_t, std::set<std::string>> leaders;

    explicit RaftNet(size_t n)
    {
        for (size_t i = 0; i < n; ++i)
            ids.push_back("n" + std::to_string(i));
        for (const auto& id : ids)
            nodes.emplace(id, RaftNode{ids, id});
    }

    void absorb(const std::string& from, const RaftOutput& out)
    {
        for (const auto& [to, m] : out.send)
            queue.emplace_back(to, m);
        for (const auto& [_, e] : out.committed)
            committed[from].push_back(e);
        if (out.became_leader)
            leaders[nodes.at(from).term()].insert(from);
    }

    void pump(const std::set<std::string>& down = {})
    {
        while (!queue.empty())
        {
            auto [to, m] = queue.front();
            queue.pop_front();
            if (down.contains(to) || down.contains(m.sender))
                continue;
            absorb(to, nodes.at(to).on_message(m));
        }
    }
};

TEST(raft, single_timeout_elects_aleader_with_two_votes)
{
    RaftNet net{3};
    net.absorb("n0", net.nodes.at("n0").on_election_timeout());
    // Deliver the two vote requests, then only the first grant.
    std::vector<std::pair<std::string, RaftMessage>> replies;
    while (!net.queue.empty())
    {
        auto [to, m] = net.queue.front();
        net.queue.pop_front();
        for (auto& r : net.nodes.at(to).on_message(m).send)
            replies.push_back(r);
    }
    ASSERT_EQ(replies.size(), 2u);
    ASSERT_TRUE(replies[0].second.granted);
    const auto out = net.nodes.at("n0").on_message(replies[0].second);
    EXPECT_TRUE(out.became_leader);
    EXPECT_EQ(net.nodes.at("n0").role(), RaftRole::leader);
    EXPECT_EQ(net.nodes.at("n0").term(), 1u);
}

TEST(raft, split_vote_elects_nobody_then_recovers)
{
    RaftNet net{4};
    // n0 and n1 stand at once; n2 votes for n0 and n3 for n1.
    net.absorb("n0", net.nodes.at("n0").on_election_timeout());
    net.absorb("n1", net.nodes.at("n1").on_election_timeout());
    std::deque<std::pair<std::string, RaftMessage>> q;
    std::swap(q, net.queue);
    for (auto& [to, m] : q)
    {
        const bool deliver = (to == "n2" && m.sender == "n0") || (to == "n3" && m.sender == "n1") ||
                             (to == "n0" && m.sender == "n1") || (to == "n1" && m.sender == "n0");
        if (deliver)
            net.absorb(to, net.nodes.at(to).on_message(m));
    }
    net.pump();
    EXPECT_TRUE(net.leaders.empty());
    for (const auto& [_, node] : net.nodes)
        EXPECT_NE(node.role(), RaftRole::leader);

    net.absorb("n2", net.nodes.at("n2").on_election_timeout());
    net.pump();
    ASSERT_EQ(net.leaders.size(), 1u);
    EXPECT_EQ(net.leaders.begin()->first, 2u);
    EXPECT_EQ(*net.leaders.begin()->second.begin(), "n2");
}

TEST(raft, leader_steps_down_on_higher_term_append)
{
    RaftNet net{3};
    net.absorb("n0", net.nodes.at("n0").on_election_timeout());
    net.pump();
    ASSERT_EQ(net.nodes.at("n0").role(), RaftRole::leader);

    RaftMessage m;
    m.kind = RaftMessage::Kind::append_entries;
    m.term = 5;
    m.sender = "n1";
    const auto out = net.nodes.at("n0").on_message(m);
    EXPECT_TRUE(out.stepped_down);
    EXPECT_EQ(net.nodes.at("n0").role(), RaftRole::follower);
    EXPECT_EQ(net.nodes.at("n0").term(), 5u);
}

TEST(raft, second_vote_in_aterm_is_refused)
{
    RaftNode node{{"a", "b", "c"}, "c"};
    RaftMessage rv;
    rv.kind = RaftMessage::Kind::request_vote;
    rv.term = 1;
    rv.sender = "a";
    ASSERT_TRUE(node.on_message(rv).send.at(0).second.granted);
    rv.sender = "b";
    const auto out = node.on_message(rv);
    ASSERT_EQ(out.send.size(), 1u);
    EXPECT_FALSE(out.send[0].second.granted);
}

TEST(raft, entries_commit_on_amajority_and_logs_match)
{
    RaftNet net{5};
    net.absorb("n0", net.nodes.at("n0").on_election_timeout());
    net.pump();
    for (int i = 0; i < 5; ++i)
    {
        net.absorb("n0", net.nodes.at("n0").append("b" + std::to_string(i)));
        net.pump({"n3", "n4"});
    }
    net.absorb("n0", net.nodes.at("n0").on_heartbeat());
    net.pump({"n3", "n4"});
    EXPECT_EQ(net.nodes.at("n0").commit_index(), 5u);
    EXPECT_EQ(net.committed["n0"].size(), 5u);

    // The lagging followers catch up once they are reachable again.
    net.absorb("n0", net.nodes.at("n0").on_heartbeat());
    net.pump();
    net.absorb("n0", net.nodes.at("n0").on_heartbeat());
    net.pump();
    for (const auto& id : net.ids)
    {
        EXPECT_EQ(net.nodes.at(id).log(), net.nodes.at("n0").log()) << id;
        EXPECT_EQ(net.nodes.at(id).commit_index(), 5u) << id;
    }
}

TEST(raft, message_codec_round_trip)
{
    RaftMessage m;
    m.kind = RaftMessage::Kind::append_entries;
    m.term = 4;
    m.sender = "x";
    m.log_index = 2;
    m.log_term = 3;
    m.entries = {{4, "b1"}, {4, "b2"}};
    m.leader_commit = 1;
    EXPECT_EQ(raft_message_from_record(to_record(m)), m);
}
}  // namespace
}  // namespace airchain::consensus
