// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ledger/codec.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace airchain::consensus
{
inline constexpr int64_t kRaftElectionMinMs = 150;
inline constexpr int64_t kRaftElectionMaxMs = 300;
inline constexpr int64_t kRaftHeartbeatMs = 50;

enum class RaftRole
{
    follower,
    candidate,
    leader,
};

std::string_view to_string(RaftRole r) noexcept;

struct RaftEntry
{
    uint64_t term = 0;
    std::string block_id;

    friend bool operator==(const RaftEntry&, const RaftEntry&) = default;
};

struct RaftMessage
{
    enum class Kind
    {
        request_vote,
        vote_reply,
        append_entries,
        append_reply,
    };

    Kind kind = Kind::append_entries;
    uint64_t term = 0;
    std::string sender;
    // request_vote: candidate's last log position; append_entries: the
    // position preceding `entries`.
    uint64_t log_index = 0;
    uint64_t log_term = 0;
    std::vector<RaftEntry> entries;
    uint64_t leader_commit = 0;
    bool granted = false;      ///< vote_reply / append_reply success
    uint64_t match_index = 0;  ///< append_reply

    friend bool operator==(const RaftMessage&, const RaftMessage&) = default;
};

std::string_view to_string(RaftMessage::Kind k) noexcept;
codec::Record to_record(const RaftMessage& m);
RaftMessage raft_message_from_record(const codec::Record& r);

/// State that survives a crash.
struct RaftPersistent
{
    uint64_t term = 0;
    std::optional<std::string> voted_for;
    std::vector<RaftEntry> log;  ///< index i + 1 lives at log[i]
};

struct RaftOutput
{
    std::vector<std::pair<std::string, RaftMessage>> send;
    /// Entries newly known committed, in index order.
    std::vector<std::pair<uint64_t, RaftEntry>> committed;
    /// Uncommitted entries removed by a conflicting leader.
    std::vector<RaftEntry> truncated;
    bool became_leader = false;
    bool stepped_down = false;
    /// Heard from a legitimate leader or granted a vote.
    bool reset_election_timer = false;
};

/// Raft over a fixed membership. Log entries name blocks; the caller checks
/// each block before passing append_entries in and may refuse it by
/// dropping the message.
class RaftNode
{
public:
    RaftNode(std::vector<std::string> members, std::string self, RaftPersistent persisted = {});

    const std::string& self() const noexcept { return self_; }
    RaftRole role() const noexcept { return role_; }
    uint64_t term() const noexcept { return p_.term; }
    const std::optional<std::string>& leader() const noexcept { return leader_; }
    uint64_t commit_index() const noexcept { return commit_index_; }
    uint64_t last_index() const noexcept { return p_.log.size(); }
    uint64_t term_at(uint64_t index) const;
    const std::vector<RaftEntry>& log() const noexcept { return p_.log; }
    const RaftPersistent& persistent() const noexcept { return p_; }

    RaftOutput on_election_timeout();
    /// Leader only: send AppendEntries (heartbeat or catch-up) to every peer.
    RaftOutput on_heartbeat();
    RaftOutput on_message(const RaftMessage& m);
    /// Leader only: append an entry for `block_id` in the current term and
    /// replicate it. Returns nothing when not leader.
    RaftOutput append(const std::string& block_id);

private:
    size_t majority() const noexcept { return members_.size() / 2 + 1; }
    bool is_member(const std::string& id) const;
    void step_down(uint64_t term, RaftOutput& out);
    void become_leader(RaftOutput& out);
    RaftMessage append_for(const std::string& peer) const;
    void advance_commit(RaftOutput& out);
    void apply_commit(uint64_t new_commit, RaftOutput& out);

    std::vector<std::string> members_;
    std::string self_;
    RaftPersistent p_;
    RaftRole role_ = RaftRole::follower;
    std::optional<std::string> leader_;
    uint64_t commit_index_ = 0;
    std::set<std::string> votes_;
    std::map<std::string, uint64_t> next_index_;
    std::map<std::string, uint64_t> match_index_;
};
}  // namespace airchain::consensus
