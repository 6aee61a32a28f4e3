// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "consensus/pbft.hpp"
#include "common/error.hpp"
#include "consensus/analysis.hpp"

#include <algorithm>

namespace airchain::consensus
{
namespace
{
constexpr size_t kMaxBuffered = 4096;

constexpr std::pair<PbftMessage::Kind, std::string_view> kKindNames[] = {
    {PbftMessage::Kind::pre_prepare, "pre_prepare"},
    {PbftMessage::Kind::prepare, "prepare"},
    {PbftMessage::Kind::commit, "commit"},
    {PbftMessage::Kind::view_change, "view_change"},
};
}  // namespace

std::string_view to_string(PbftPhase p) noexcept
{
    switch (p)
    {
    case PbftPhase::idle:
        return "idle";
    case PbftPhase::pre_prepared:
        return "pre-prepared";
    case PbftPhase::prepared:
        return "prepared";
    case PbftPhase::committed:
        return "committed";
    }
    return "idle";
}

std::string_view to_string(PbftMessage::Kind k) noexcept
{
    for (const auto& [kind, name] : kKindNames)
    {
        if (kind == k)
            return name;
    }
    return "prepare";
}

codec::Record to_record(const PbftMessage& m)
{
    return {{"kind", to_string(m.kind)}, {"view", m.view}, {"sequence", m.sequence},
        {"digest", m.digest}, {"sender", m.sender}, {"prepared_view", m.prepared_view}};
}

PbftMessage pbft_message_from_record(const codec::Record& r)
{
    codec::expect_keys(r, {"kind", "view", "sequence", "digest", "sender", "prepared_view"});
    PbftMessage m;
    const auto kind = codec::get_string(r, "kind");
    const auto it = std::find_if(std::begin(kKindNames), std::end(kKindNames),
        [&](const auto& e) { return e.second == kind; });
    if (it == std::end(kKindNames))
        throw CodecError{"pbft: unknown message kind '" + kind + "'"};
    m.kind = it->first;
    m.view = codec::get_uint(r, "view");
    m.sequence = codec::get_uint(r, "sequence");
    m.digest = codec::get_string(r, "digest");
    m.sender = codec::get_string(r, "sender");
    m.prepared_view = codec::get_uint(r, "prepared_view");
    return m;
}

PbftReplica::PbftReplica(std::vector<std::string> members, std::string self, uint64_t sequence)
  : members_{std::move(members)},
    self_{std::move(self)},
    f_{max_faults(static_cast<int64_t>(members_.size()))},
    sequence_{sequence}
{
    if (!is_member(self_))
        throw ConfigError{"pbft: replica is not a member"};
}

const std::string& PbftReplica::primary_of(uint64_t view) const
{
    return members_[view % members_.size()];
}

bool PbftReplica::is_member(const std::string& id) const
{
    return std::find(members_.begin(), members_.end(), id) != members_.end();
}

PbftOutput PbftReplica::propose(const std::string& digest)
{
    PbftOutput out;
    if (!is_primary() || slot_.pre_prepared)
        return out;
    PbftMessage m{PbftMessage::Kind::pre_prepare, view_, sequence_, digest, self_, 0};
    slot_.pre_prepared = digest;
    phase_ = PbftPhase::pre_prepared;
    out.broadcast.push_back(m);
    check_progress(out);
    return out;
}

PbftOutput PbftReplica::on_message(const PbftMessage& m)
{
    PbftOutput out;
    handle(m, out);
    return out;
}

void PbftReplica::handle(const PbftMessage& m, PbftOutput& out)
{
    if (!is_member(m.sender) || m.sender == self_)
        return;

    if (m.kind == PbftMessage::Kind::view_change)
    {
        if (m.view <= view_)
            return;
        view_change_votes_[m.view].insert_or_assign(m.sender, m);

        // Join a view change once f+1 replicas are ahead of us.
        const uint64_t floor = std::max(view_, vc_target_);
        std::map<std::string, uint64_t> ahead;
        for (const auto& [v, votes] : view_change_votes_)
        {
            if (v <= floor)
                continue;
            for (const auto& [sender, _] : votes)
            {
                if (!ahead.contains(sender))
                    ahead.emplace(sender, v);
            }
        }
        if (static_cast<int64_t>(ahead.size()) >= f_ + 1)
        {
            uint64_t target = UINT64_MAX;
            for (const auto& [_, v] : ahead)
                target = std::min(target, v);
            start_view_change(target, out);
        }
        for (auto it = view_change_votes_.rbegin(); it != view_change_votes_.rend(); ++it)
        {
            if (it->first > view_ && static_cast<int64_t>(it->second.size()) >= 2 * f_ + 1 &&
                it->second.contains(self_))
            {
                enter_view(it->first, out);
                break;
            }
        }
        return;
    }

    if (m.sequence < sequence_ || m.view < view_)
        return;
    if (m.sequence > sequence_ || m.view > view_)
    {
        if (buffered_.size() >= kMaxBuffered)
            buffered_.erase(buffered_.begin());
        buffered_.push_back(m);
        return;
    }
    if (in_view_change())
        return;

    switch (m.kind)
    {
    case PbftMessage::Kind::pre_prepare:
        if (m.sender != primary() || slot_.pre_prepared)
            return;
        slot_.pre_prepared = m.digest;
        phase_ = PbftPhase::pre_prepared;
        if (self_ != primary())
        {
            slot_.prepares[m.digest].insert(self_);
            out.broadcast.push_back({PbftMessage::Kind::prepare, view_, sequence_, m.digest, self_, 0});
        }
        break;
    case PbftMessage::Kind::prepare:
        if (m.sender == primary())
            return;
        slot_.prepares[m.digest].insert(m.sender);
        break;
    case PbftMessage::Kind::commit:
        slot_.commits[m.digest].insert(m.sender);
        break;
    case PbftMessage::Kind::view_change:
        break;
    }
    check_progress(out);
}

void PbftReplica::check_progress(PbftOutput& out)
{
    if (!slot_.pre_prepared)
        return;
    const auto& d = *slot_.pre_prepared;
    if (!slot_.commit_sent && static_cast<int64_t>(slot_.prepares[d].size()) >= 2 * f_)
    {
        slot_.commit_sent = true;
        phase_ = PbftPhase::prepared;
        prepared_ = Prepared{view_, d};
        slot_.commits[d].insert(self_);
        out.broadcast.push_back({PbftMessage::Kind::commit, view_, sequence_, d, self_, 0});
    }
    if (slot_.commit_sent && !slot_.decided &&
        static_cast<int64_t>(slot_.commits[d].size()) >= 2 * f_ + 1)
    {
        slot_.decided = true;
        phase_ = PbftPhase::committed;
        out.commit = d;
    }
}

PbftOutput PbftReplica::on_timeout()
{
    PbftOutput out;
    start_view_change(std::max(view_, vc_target_) + 1, out);
    return out;
}

void PbftReplica::start_view_change(uint64_t target, PbftOutput& out)
{
    if (target <= std::max(view_, vc_target_))
        return;
    vc_target_ = target;
    PbftMessage m{PbftMessage::Kind::view_change, target, sequence_, {}, self_, 0};
    if (prepared_)
    {
        m.digest = prepared_->digest;
        m.prepared_view = prepared_->view;
    }
    view_change_votes_[target].insert_or_assign(self_, m);
    out.broadcast.push_back(m);
    if (static_cast<int64_t>(view_change_votes_[target].size()) >= 2 * f_ + 1)
        enter_view(target, out);
}

void PbftReplica::enter_view(uint64_t v, PbftOutput& out)
{
    const auto votes = view_change_votes_[v];
    view_ = v;
    vc_target_ = v;
    ++view_changes_;
    out.view_changed = true;
    slot_ = {};
    phase_ = PbftPhase::idle;
    view_change_votes_.erase(view_change_votes_.begin(), view_change_votes_.upper_bound(v));

    if (primary_of(v) == self_)
    {
        const PbftMessage* carry = nullptr;
        for (const auto& [_, vc] : votes)
        {
            if (vc.sequence != sequence_ || vc.digest.empty())
                continue;
            if (!carry || vc.prepared_view > carry->prepared_view ||
                (vc.prepared_view == carry->prepared_view && vc.digest < carry->digest))
                carry = &vc;
        }
        if (carry)
            out.repropose = carry->digest;
        else
            out.propose = true;
    }
    replay_buffered(out);
}

PbftOutput PbftReplica::advance(uint64_t committed)
{
    PbftOutput out;
    if (committed < sequence_)
        return out;
    sequence_ = committed + 1;
    slot_ = {};
    phase_ = PbftPhase::idle;
    prepared_.reset();
    if (is_primary())
        out.propose = true;
    replay_buffered(out);
    return out;
}

void PbftReplica::replay_buffered(PbftOutput& out)
{
    auto pending = std::move(buffered_);
    buffered_.clear();
    for (const auto& m : pending)
        handle(m, out);
}
}  // namespace airchain::consensus
