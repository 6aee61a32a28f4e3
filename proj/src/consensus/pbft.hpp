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
enum class PbftPhase
{
    idle,
    pre_prepared,
    prepared,
    committed,
};

std::string_view to_string(PbftPhase p) noexcept;

struct PbftMessage
{
    enum class Kind
    {
        pre_prepare,
        prepare,
        commit,
        view_change,
    };

    Kind kind = Kind::prepare;
    uint64_t view = 0;
    uint64_t sequence = 0;
    std::string digest;  ///< block id; for view_change, the prepared block id or empty
    std::string sender;
    uint64_t prepared_view = 0;  ///< view_change only

    friend bool operator==(const PbftMessage&, const PbftMessage&) = default;
};

std::string_view to_string(PbftMessage::Kind k) noexcept;
codec::Record to_record(const PbftMessage& m);
PbftMessage pbft_message_from_record(const codec::Record& r);

struct PbftOutput
{
    std::vector<PbftMessage> broadcast;
    /// Block id decided at the current sequence.
    std::optional<std::string> commit;
    /// This replica became primary of a new view and should propose;
    /// `repropose` is set when a prepared block must be carried over.
    bool propose = false;
    std::optional<std::string> repropose;
    bool view_changed = false;
};

/// One honest pBFT replica deciding a single sequence at a time. Block
/// contents are out of band: the caller validates a block before passing
/// its pre-prepare in.
class PbftReplica
{
public:
    PbftReplica(std::vector<std::string> members, std::string self, uint64_t sequence);

    const std::string& self() const noexcept { return self_; }
    const std::vector<std::string>& members() const noexcept { return members_; }
    uint64_t view() const noexcept { return view_; }
    uint64_t sequence() const noexcept { return sequence_; }
    PbftPhase phase() const noexcept { return phase_; }
    int64_t f() const noexcept { return f_; }
    bool in_view_change() const noexcept { return vc_target_ > view_; }
    const std::string& primary() const { return primary_of(view_); }
    const std::string& primary_of(uint64_t view) const;
    bool is_primary() const { return primary() == self_ && !in_view_change(); }
    /// Digest pre-prepared at the current (view, sequence), if any.
    const std::optional<std::string>& pre_prepared() const noexcept { return slot_.pre_prepared; }
    uint64_t view_changes() const noexcept { return view_changes_; }

    /// Primary only: pre-prepare `digest` at the current sequence.
    PbftOutput propose(const std::string& digest);
    PbftOutput on_message(const PbftMessage& m);
    /// Progress timer expiry: vote to move to the next view.
    PbftOutput on_timeout();
    /// The chain advanced to `committed` by any route; open the next sequence.
    PbftOutput advance(uint64_t committed);

private:
    struct Slot
    {
        std::optional<std::string> pre_prepared;
        std::map<std::string, std::set<std::string>> prepares;
        std::map<std::string, std::set<std::string>> commits;
        bool commit_sent = false;
        bool decided = false;
    };
    struct Prepared
    {
        uint64_t view = 0;
        std::string digest;
    };

    bool is_member(const std::string& id) const;
    void check_progress(PbftOutput& out);
    void start_view_change(uint64_t target, PbftOutput& out);
    void enter_view(uint64_t v, PbftOutput& out);
    void replay_buffered(PbftOutput& out);
    void handle(const PbftMessage& m, PbftOutput& out);

    std::vector<std::string> members_;
    std::string self_;
    int64_t f_;
    uint64_t view_ = 0;
    uint64_t sequence_;
    uint64_t vc_target_ = 0;
    PbftPhase phase_ = PbftPhase::idle;
    Slot slot_;
    std::optional<Prepared> prepared_;
    std::map<uint64_t, std::map<std::string, PbftMessage>> view_change_votes_;
    std::vector<PbftMessage> buffered_;
    uint64_t view_changes_ = 0;
};
}  // namespace airchain::consensus
