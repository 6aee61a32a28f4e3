// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "consensus/raft.hpp"
#include "common/error.hpp"

#include <algorithm>

namespace airchain::consensus
{
namespace
{
constexpr size_t kMaxEntriesPerAppend = 64;

constexpr std::pair<RaftMessage::Kind, std::string_view> kKindNames[] = {
    {RaftMessage::Kind::request_vote, "request_vote"},
    {RaftMessage::Kind::vote_reply, "vote_reply"},
    {RaftMessage::Kind::append_entries, "append_entries"},
    {RaftMessage::Kind::append_reply, "append_reply"},
};
}  // namespace

std::string_view to_string(RaftRole r) noexcept
{
    switch (r)
    {
    case RaftRole::follower:
        return "follower";
    case RaftRole::candidate:
        return "candidate";
    case RaftRole::leader:
        return "leader";
    }
    return "follower";
}

std::string_view to_string(RaftMessage::Kind k) noexcept
{
    for (const auto& [kind, name] : kKindNames)
    {
        if (kind == k)
            return name;
    }
    return "append_entries";
}

codec::Record to_record(const RaftMessage& m)
{
    auto entries = codec::Record::array();
    for (const auto& e : m.entries)
        entries.push_back({{"term", e.term}, {"block_id", e.block_id}});
    return {{"kind", to_string(m.kind)}, {"term", m.term}, {"sender", m.sender},
        {"log_index", m.log_index}, {"log_term", m.log_term}, {"entries", std::move(entries)},
        {"leader_commit", m.leader_commit}, {"granted", m.granted ? 1 : 0},
        {"match_index", m.match_index}};
}

RaftMessage raft_message_from_record(const codec::Record& r)
{
    codec::expect_keys(r, {"kind", "term", "sender", "log_index", "log_term", "entries",
                              "leader_commit", "granted", "match_index"});
    RaftMessage m;
    const auto kind = codec::get_string(r, "kind");
    const auto it = std::find_if(std::begin(kKindNames), std::end(kKindNames),
        [&](const auto& e) { return e.second == kind; });
    if (it == std::end(kKindNames))
        throw CodecError{"raft: unknown message kind '" + kind + "'"};
    m.kind = it->first;
    m.term = codec::get_uint(r, "term");
    m.sender = codec::get_string(r, "sender");
    m.log_index = codec::get_uint(r, "log_index");
    m.log_term = codec::get_uint(r, "log_term");
    const auto& entries = codec::field(r, "entries");
    if (!entries.is_array())
        throw CodecError{"raft: entries must be a list"};
    for (const auto& e : entries)
    {
        codec::expect_keys(e, {"term", "block_id"});
        m.entries.push_back({codec::get_uint(e, "term"), codec::get_string(e, "block_id")});
    }
    m.leader_commit = codec::get_uint(r, "leader_commit");
    m.granted = codec::get_uint(r, "granted") != 0;
    m.match_index = codec::get_uint(r, "match_index");
    return m;
}

RaftNode::RaftNode(std::vector<std::string> members, std::string self, RaftPersistent persisted)
  : members_{std::move(members)}, self_{std::move(self)}, p_{std::move(persisted)}
{
    if (!is_member(self_))
        throw ConfigError{"raft: node is not a member"};
}

bool RaftNode::is_member(const std::string& id) const
{
    return std::find(members_.begin(), members_.end(), id) != members_.end();
}

uint64_t RaftNode::term_at(uint64_t index) const
{
    if (index == 0 || index > p_.log.size())
        return 0;
    return p_.log[index - 1].term;
}

RaftOutput RaftNode::on_election_timeout()
{
    RaftOutput out;
    if (role_ == RaftRole::leader)
        return out;
    ++p_.term;
    role_ = RaftRole::candidate;
    p_.voted_for = self_;
    leader_.reset();
    votes_ = {self_};
    out.reset_election_timer = true;
    if (votes_.size() >= majority())
    {
        become_leader(out);
        return out;
    }
    for (const auto& peer : members_)
    {
        if (peer == self_)
            continue;
        RaftMessage m;
        m.kind = RaftMessage::Kind::request_vote;
        m.term = p_.term;
        m.sender = self_;
        m.log_index = last_index();
        m.log_term = term_at(last_index());
        out.send.emplace_back(peer, std::move(m));
    }
    return out;
}

void RaftNode::become_leader(RaftOutput& out)
{
    role_ = RaftRole::leader;
    leader_ = self_;
    out.became_leader = true;
    next_index_.clear();
    match_index_.clear();
    for (const auto& peer : members_)
    {
        next_index_[peer] = last_index() + 1;
        match_index_[peer] = 0;
    }
    match_index_[self_] = last_index();
    for (const auto& peer : members_)
    {
        if (peer != self_)
            out.send.emplace_back(peer, append_for(peer));
    }
    advance_commit(out);
}

void RaftNode::step_down(uint64_t term, RaftOutput& out)
{
    if (term > p_.term)
    {
        p_.term = term;
        p_.voted_for.reset();
    }
    if (role_ != RaftRole::follower)
        out.stepped_down = true;
    role_ = RaftRole::follower;
}

RaftMessage RaftNode::append_for(const std::string& peer) const
{
    RaftMessage m;
    m.kind = RaftMessage::Kind::append_entries;
    m.term = p_.term;
    m.sender = self_;
    const uint64_t next = next_index_.at(peer);
    m.log_index = next - 1;
    m.log_term = term_at(next - 1);
    for (uint64_t i = next; i <= last_index() && m.entries.size() < kMaxEntriesPerAppend; ++i)
        m.entries.push_back(p_.log[i - 1]);
    m.leader_commit = commit_index_;
    return m;
}

RaftOutput RaftNode::on_heartbeat()
{
    RaftOutput out;
    if (role_ != RaftRole::leader)
        return out;
    for (const auto& peer : members_)
    {
        if (peer != self_)
            out.send.emplace_back(peer, append_for(peer));
    }
    return out;
}

RaftOutput RaftNode::append(const std::string& block_id)
{
    RaftOutput out;
    if (role_ != RaftRole::leader)
        return out;
    p_.log.push_back({p_.term, block_id});
    match_index_[self_] = last_index();
    for (const auto& peer : members_)
    {
        if (peer != self_)
            out.send.emplace_back(peer, append_for(peer));
    }
    advance_commit(out);
    return out;
}

RaftOutput RaftNode::on_message(const RaftMessage& m)
{
    RaftOutput out;
    if (!is_member(m.sender) || m.sender == self_)
        return out;
    if (m.term > p_.term)
    {
        step_down(m.term, out);
        leader_.reset();
    }

    switch (m.kind)
    {
    case RaftMessage::Kind::request_vote: {
        RaftMessage reply;
        reply.kind = RaftMessage::Kind::vote_reply;
        reply.term = p_.term;
        reply.sender = self_;
        const uint64_t my_last_term = term_at(last_index());
        const bool up_to_date = m.log_term > my_last_term ||
                                (m.log_term == my_last_term && m.log_index >= last_index());
        if (m.term == p_.term && up_to_date &&
            (!p_.voted_for || *p_.voted_for == m.sender))
        {
            p_.voted_for = m.sender;
            reply.granted = true;
            out.reset_election_timer = true;
        }
        out.send.emplace_back(m.sender, std::move(reply));
        break;
    }
    case RaftMessage::Kind::vote_reply:
        if (role_ == RaftRole::candidate && m.term == p_.term && m.granted)
        {
            votes_.insert(m.sender);
            if (votes_.size() >= majority())
                become_leader(out);
        }
        break;
    case RaftMessage::Kind::append_entries: {
        RaftMessage reply;
        reply.kind = RaftMessage::Kind::append_reply;
        reply.term = p_.term;
        reply.sender = self_;
        if (m.term < p_.term)
        {
            out.send.emplace_back(m.sender, std::move(reply));
            break;
        }
        if (role_ != RaftRole::follower)
            step_down(m.term, out);
        leader_ = m.sender;
        out.reset_election_timer = true;
        if (m.log_index > last_index() || term_at(m.log_index) != m.log_term)
        {
            reply.match_index = std::min(last_index(), m.log_index > 0 ? m.log_index - 1 : 0);
            out.send.emplace_back(m.sender, std::move(reply));
            break;
        }
        uint64_t index = m.log_index;
        for (const auto& e : m.entries)
        {
            ++index;
            if (index <= last_index())
            {
                if (term_at(index) == e.term)
                    continue;
                for (uint64_t i = index; i <= last_index(); ++i)
                    out.truncated.push_back(p_.log[i - 1]);
                p_.log.resize(index - 1);
            }
            p_.log.push_back(e);
        }
        const uint64_t match = m.log_index + m.entries.size();
        if (m.leader_commit > commit_index_)
            apply_commit(std::min(m.leader_commit, match), out);
        reply.granted = true;
        reply.match_index = match;
        out.send.emplace_back(m.sender, std::move(reply));
        break;
    }
    case RaftMessage::Kind::append_reply:
        if (role_ != RaftRole::leader || m.term != p_.term)
            break;
        if (m.granted)
        {
            match_index_[m.sender] = std::max(match_index_[m.sender], m.match_index);
            next_index_[m.sender] = match_index_[m.sender] + 1;
            advance_commit(out);
            if (next_index_[m.sender] <= last_index())
                out.send.emplace_back(m.sender, append_for(m.sender));
        }
        else
        {
            next_index_[m.sender] = std::max<uint64_t>(1, std::min(next_index_[m.sender] - 1,
                                                              m.match_index + 1));
            out.send.emplace_back(m.sender, append_for(m.sender));
        }
        break;
    }
    return out;
}

void RaftNode::advance_commit(RaftOutput& out)
{
    std::vector<uint64_t> matches;
    for (const auto& peer : members_)
        matches.push_back(match_index_[peer]);
    std::sort(matches.begin(), matches.end(), std::greater<>{});
    const uint64_t n = matches[majority() - 1];
    if (n > commit_index_ && term_at(n) == p_.term)
    {
        apply_commit(n, out);
        // Followers learn the new commit index on the next append.
        for (const auto& peer : members_)
        {
            if (peer != self_)
                out.send.emplace_back(peer, append_for(peer));
        }
    }
}

void RaftNode::apply_commit(uint64_t new_commit, RaftOutput& out)
{
    new_commit = std::min(new_commit, last_index());
    for (uint64_t i = commit_index_ + 1; i <= new_commit; ++i)
        out.committed.emplace_back(i, p_.log[i - 1]);
    commit_index_ = std::max(commit_index_, new_commit);
}
}  // namespace airchain::consensus
