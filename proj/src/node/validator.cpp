// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "node/validator.hpp"
#include "common/error.hpp"
#include "consensus/payload.hpp"

#include <algorithm>

namespace airchain::node
{
namespace
{
constexpr size_t kSeenCapacity = 200'000;
constexpr size_t kInactiveCapacity = 4096;

using consensus::Algorithm;
using network::Message;

Message make(std::string_view type, codec::Record fields = codec::Record::object())
{
    Message m;
    m.type = std::string{type};
    m.fields = std::move(fields);
    return m;
}

bool contains(const std::vector<std::string>& v, const std::string& x)
{
    return std::find(v.begin(), v.end(), x) != v.end();
}
}  // namespace

std::string_view to_string(Fault f) noexcept
{
    switch (f)
    {
    case Fault::none:
        return "none";
    case Fault::equivocate:
        return "equivocate";
    case Fault::cheat_wait:
        return "cheat_wait";
    }
    return "none";
}

std::optional<Fault> parse_fault(std::string_view s) noexcept
{
    for (const auto f : {Fault::none, Fault::equivocate, Fault::cheat_wait})
    {
        if (to_string(f) == s)
            return f;
    }
    return std::nullopt;
}

Validator::Validator(ValidatorConfig config, Environment& env, Observer observer)
  : config_{std::move(config)},
    env_{env},
    observer_{std::move(observer)},
    journal_{config_.journal, config_.nodes},
    rng_{config_.seed}
{
    journal_.initialize(config_.genesis);
    table_.self_id = id();
    table_.min_connectivity = config_.min_connectivity;
    table_.max_connectivity = config_.max_connectivity;
    if (!config_.adversary)
    {
        config_.adversary = std::make_shared<Adversary>();
        config_.adversary->coalition.insert(id());
    }
}

// ---------------------------------------------------------------- plumbing

void Validator::send(const std::string& to, Message m)
{
    m.sender = id();
    ++sent_;
    env_.send(to, std::make_shared<const Message>(std::move(m)));
}

void Validator::gossip(Message m, const std::string& except)
{
    m.sender = id();
    const network::MessagePtr shared = std::make_shared<const Message>(std::move(m));
    for (const auto& [peer, _] : table_.peers)
    {
        if (peer == except)
            continue;
        ++sent_;
        env_.send(peer, shared);
    }
}

uint64_t Validator::after(int64_t delay_ms, std::function<void()> fn)
{
    return env_.schedule(delay_ms, [this, fn = std::move(fn)] {
        if (running_)
            fn();
    });
}

void Validator::cancel(uint64_t& timer)
{
    if (timer)
        env_.cancel(timer);
    timer = 0;
}

bool Validator::first_seen(const std::string& id)
{
    if (!seen_.insert(id).second)
        return false;
    seen_order_.push_back(id);
    if (seen_order_.size() > kSeenCapacity)
    {
        seen_.erase(seen_order_.front());
        seen_order_.pop_front();
    }
    return true;
}

void Validator::violation(const std::string& what)
{
    if (observer_.on_violation)
        observer_.on_violation(id(), what);
}

// --------------------------------------------------------------- lifecycle

void Validator::start()
{
    running_ = true;
    peering_tick();
    on_head_changed();
}

void Validator::crash()
{
    running_ = false;
    cancel(peering_timer_);
    teardown();
    active_.reset();
    journal_.clear_pending();
    vouches_.clear();
    inactive_.clear();
}

void Validator::restart()
{
    if (raft_)
    {
        const auto settings = journal_.engine_after(journal_.head().block_id);
        raft_->node = consensus::RaftNode{settings.members, id(), raft_->node.persistent()};
    }
    running_ = true;
    active_.reset();
    peering_tick();
    on_head_changed();
}

void Validator::teardown()
{
    cancel(publish_timer_);
    if (poet_)
        cancel(poet_->timer);
    if (pbft_)
        cancel(pbft_->timer);
    if (raft_)
    {
        cancel(raft_->election_timer);
        cancel(raft_->heartbeat_timer);
    }
    poet_.reset();
    pbft_.reset();
}

// ----------------------------------------------------------------- peering

void Validator::peering_tick()
{
    peering_timer_ = 0;
    if (!running_ || !table_.under_connected())
        return;
    if (const auto target = network::next_candidate(table_, config_.directory))
    {
        table_.attempted.insert(*target);
        send(*target, make(network::msg::kConnect));
    }
    else
    {
        peering_timer_ = after(config_.peering_retry_ms, [this] {
            table_.attempted.clear();
            peering_tick();
        });
        return;
    }
    peering_timer_ = after(config_.peering_interval_ms, [this] { peering_tick(); });
}

void Validator::on_peering(const std::string& from, const Message& m)
{
    const auto endpoint_of = [&](const std::string& node) {
        for (const auto& e : config_.directory)
        {
            if (e.node_id == node)
                return e.endpoint;
        }
        return std::string{};
    };
    if (m.type == network::msg::kConnect)
    {
        const bool ok = table_.accept(from, endpoint_of(from));
        send(from, make(network::msg::kConnectReply, {{"accepted", ok ? 1 : 0}}));
    }
    else if (m.type == network::msg::kConnectReply)
    {
        if (codec::get_uint(m.fields, "accepted") == 1 && table_.accept(from, endpoint_of(from)))
            send(from, make(network::msg::kGetPeers));
    }
    else if (m.type == network::msg::kGetPeers)
    {
        auto ids = codec::Record::array();
        for (const auto& [peer, _] : table_.peers)
            ids.push_back(peer);
        send(from, make(network::msg::kPeers, {{"peers", std::move(ids)}}));
    }
    else if (m.type == network::msg::kPeers)
    {
        for (const auto& peer : codec::get_string_list(m.fields, "peers"))
        {
            if (peer != id())
                table_.learned.insert(peer);
        }
        if (!peering_timer_)
            peering_tick();
    }
}

// ------------------------------------------------------------------ inputs

void Validator::receive(const std::string& from, const network::MessagePtr& message)
{
    if (!running_)
        return;
    const auto& m = *message;
    try
    {
        if (m.type == network::msg::kBatch)
        {
            for (const auto& b : m.batches)
                on_batch(from, b);
        }
        else if (m.type == network::msg::kBlock)
        {
            for (const auto& b : m.blocks)
                on_block(from, b);
        }
        else if (m.type == network::msg::kPbft || m.type == network::msg::kRaft)
        {
            const auto algorithm = m.type == network::msg::kPbft ? Algorithm::pbft : Algorithm::raft;
            if (active_ && active_->algorithm == algorithm)
            {
                if (algorithm == Algorithm::pbft && pbft_)
                    pbft_message(from, message);
                else if (algorithm == Algorithm::raft && raft_)
                    raft_message(from, message);
            }
            else
            {
                auto& q = inactive_[algorithm];
                if (q.size() >= kInactiveCapacity)
                    q.erase(q.begin());
                q.emplace_back(from, message);
            }
        }
        else
            on_peering(from, m);
    }
    catch (const CodecError&)
    {
        // Malformed input from a peer is dropped.
    }
}

journal::SubmitResult Validator::submit(const ledger::Batch& batch)
{
    auto r = journal_.submit_batch(batch, env_.clock_s());
    if (r.status == journal::SubmitStatus::routed)
    {
        first_seen(batch.id());
        Message m = make(network::msg::kBatch);
        m.batches.push_back(batch);
        gossip(std::move(m), {});
        on_work();
    }
    return r;
}

void Validator::on_batch(const std::string& from, const ledger::Batch& batch)
{
    if (!first_seen(batch.id()))
        return;
    const auto r = journal_.submit_batch(batch, env_.clock_s());
    if (r.status != journal::SubmitStatus::routed)
        return;
    Message m = make(network::msg::kBatch);
    m.batches.push_back(batch);
    gossip(std::move(m), from);
    on_work();
}

void Validator::on_block(const std::string& from, const ledger::Block& block)
{
    if (journal_.store().contains(block.block_id))
        return;
    if (!journal_.find_block(block.header.previous_block_id))
    {
        if (active_ && active_->algorithm == Algorithm::pbft)
            pbft_vouch(from, block);
        else
            journal_.receive_block(block);
        return;
    }
    const auto settings = journal_.engine_after(block.header.previous_block_id);
    switch (settings.algorithm)
    {
    case Algorithm::pbft:
        pbft_vouch(from, block);
        return;
    case Algorithm::raft:
        return;
    case Algorithm::poet_cft:
        break;
    }

    if (journal_.receive_block(block).status != journal::SubmitStatus::routed)
        return;
    const auto r = journal_.consider(block);
    if (r.status == journal::ConsiderStatus::rejected)
        return;
    if (first_seen(block.block_id))
    {
        Message m = make(network::msg::kBlock);
        m.blocks.push_back(block);
        gossip(std::move(m), from);
    }
    if (r.status == journal::ConsiderStatus::extended)
    {
        if (observer_.on_commit)
            observer_.on_commit(id(), block);
    }
    else if (r.status == journal::ConsiderStatus::fork_switched)
    {
        if (observer_.on_fork_switch)
            observer_.on_fork_switch(id(), r.abandoned);
        if (observer_.on_commit)
        {
            const uint64_t from_num = r.abandoned.empty() ? block.header.block_num
                                                          : r.abandoned.front().header.block_num;
            for (uint64_t n = from_num; n <= journal_.store().height(); ++n)
                observer_.on_commit(id(), *journal_.store().at(n));
        }
    }
    release_parked(block.block_id);
    if (r.status != journal::ConsiderStatus::stored_side_chain)
        on_head_changed();
}

void Validator::release_parked(const std::string& block_id)
{
    for (const auto& child : journal_.release_children(block_id))
        on_block({}, child);
}

void Validator::committed(const ledger::Block& block)
{
    if (observer_.on_commit)
        observer_.on_commit(id(), block);
    if (first_seen(block.block_id))
    {
        Message m = make(network::msg::kBlock);
        m.blocks.push_back(block);
        gossip(std::move(m), {});
    }
}

void Validator::on_work()
{
    if (!active_)
        return;
    switch (active_->algorithm)
    {
    case Algorithm::poet_cft:
        if (poet_ && poet_->expired && !publish_timer_)
        {
            publish_timer_ = after(config_.publish_delay_ms, [this] {
                publish_timer_ = 0;
                poet_try_publish();
            });
        }
        break;
    case Algorithm::pbft:
        pbft_arm_timer();
        pbft_maybe_propose();
        break;
    case Algorithm::raft:
        raft_maybe_publish();
        break;
    }
}

void Validator::on_head_changed()
{
    if (!running_)
        return;
    const auto desired = journal_.engine_after(journal_.head().block_id);
    if (!active_ || *active_ != desired)
    {
        activate(desired);
        return;
    }
    switch (active_->algorithm)
    {
    case Algorithm::poet_cft:
        poet_start_round();
        break;
    case Algorithm::pbft:
        if (pbft_)
        {
            cancel(pbft_->timer);
            pbft_handle(pbft_->replica.advance(journal_.head().header.block_num));
            if (!pbft_)
                return;
            pbft_replay_future();
            if (!pbft_)
                return;
            pbft_arm_timer();
        }
        pbft_try_catch_up();
        break;
    case Algorithm::raft:
        raft_maybe_publish();
        break;
    }
}

void Validator::activate(const journal::EngineSettings& settings)
{
    const bool keep_raft = settings.algorithm == Algorithm::raft && raft_.has_value();
    teardown();
    if (!keep_raft)
        raft_.reset();
    active_ = settings;
    const uint64_t height = journal_.head().header.block_num;
    const bool member = contains(settings.members, id());
    switch (settings.algorithm)
    {
    case Algorithm::poet_cft:
        poet_.emplace();
        poet_start_round();
        break;
    case Algorithm::pbft:
        if (member)
        {
            pbft_.emplace(PbftRun{consensus::PbftReplica{settings.members, id(), height + 1}, 0, height, {}, {}});
            replay_inactive(Algorithm::pbft);
            if (!pbft_ || active_->algorithm != Algorithm::pbft)
                return;
            pbft_arm_timer();
            pbft_maybe_propose();
        }
        pbft_try_catch_up();
        break;
    case Algorithm::raft:
        if (member)
        {
            if (!raft_)
                raft_.emplace(RaftRun{consensus::RaftNode{settings.members, id()}, height, 0, 0, {}});
            raft_arm_election();
            replay_inactive(Algorithm::raft);
        }
        break;
    }
}

void Validator::replay_inactive(Algorithm algorithm)
{
    auto queued = std::move(inactive_[algorithm]);
    inactive_.erase(algorithm);
    for (const auto& [from, message] : queued)
        receive(from, message);
}

// -------------------------------------------------------------------- poet

void Validator::poet_start_round()
{
    if (!poet_)
        return;
    cancel(poet_->timer);
    poet_->round = journal_.head().header.block_num + 1;
    poet_->expired = false;
    poet_->wait_ms = config_.fault == Fault::cheat_wait
                         ? 0
                         : consensus::poet_draw_wait(config_.poet_mean_wait_ms, rng_);
    poet_->timer = after(poet_->wait_ms, [this] { poet_timer(); });
}

void Validator::poet_timer()
{
    if (!poet_)
        return;
    poet_->timer = 0;
    if (poet_->round != journal_.head().header.block_num + 1)
    {
        poet_start_round();
        return;
    }
    poet_->expired = true;
    poet_try_publish();
}

void Validator::poet_try_publish()
{
    if (!poet_ || !poet_->expired || !journal_.has_pending())
        return;
    const auto& head = journal_.head();
    if (poet_->round != head.header.block_num + 1)
        return;
    const auto block = journal_.publish(head.block_id, config_.key,
        consensus::poet_payload(poet_->round, poet_->wait_ms), env_.clock_s(), {},
        config_.max_batches_per_block);
    if (!block)
        return;
    const auto r = journal_.consider(*block);
    if (r.status != journal::ConsiderStatus::extended)
    {
        violation("own poet block not accepted: " +
                  (r.violations.empty() ? std::string{to_string(r.status)} : r.violations.front()));
        return;
    }
    committed(*block);
    on_head_changed();
}

// -------------------------------------------------------------------- pbft

void Validator::pbft_send(const consensus::PbftMessage& pm)
{
    const auto& replica = pbft_->replica;
    const auto attach = [&](Message& m, const std::string& digest) {
        if (const auto it = pbft_->blocks.find(digest); it != pbft_->blocks.end())
            m.blocks.push_back(it->second);
    };
    const bool byzantine = config_.fault == Fault::equivocate &&
                           (pm.kind == consensus::PbftMessage::Kind::prepare ||
                               pm.kind == consensus::PbftMessage::Kind::commit);
    std::vector<std::string> honest;
    for (const auto& member : replica.members())
    {
        if (!config_.adversary->coalition.contains(member))
            honest.push_back(member);
    }
    const auto& shown = config_.adversary->shown[{pm.view, pm.sequence}];
    const bool can_split = static_cast<int64_t>(config_.adversary->coalition.size()) > replica.f();

    for (const auto& member : replica.members())
    {
        if (member == id())
            continue;
        auto out = pm;
        if (byzantine && !config_.adversary->coalition.contains(member))
        {
            if (const auto it = shown.find(member); it != shown.end())
            {
                out.digest = it->second;
                if (!can_split)
                {
                    for (const auto& [_, d] : shown)
                    {
                        if (d != it->second)
                            out.digest = d;
                    }
                }
            }
            else
            {
                const auto pos = std::find(honest.begin(), honest.end(), member) - honest.begin();
                if (static_cast<size_t>(pos) >= (honest.size() + 1) / 2)
                    out.digest = crypto::sha512_hex(std::string_view{"bogus:" + member + std::to_string(pm.view)});
            }
        }
        Message m = make(network::msg::kPbft, consensus::to_record(out));
        if (out.kind == consensus::PbftMessage::Kind::pre_prepare ||
            (out.kind == consensus::PbftMessage::Kind::view_change && !out.digest.empty()))
            attach(m, out.digest);
        send(member, std::move(m));
    }
}

void Validator::pbft_handle(const consensus::PbftOutput& out)
{
    if (!pbft_)
        return;
    for (const auto& m : out.broadcast)
        pbft_send(m);
    if (out.view_changed && observer_.on_view_change)
        observer_.on_view_change(id(), pbft_->replica.view());
    if (out.repropose)
    {
        const auto it = pbft_->blocks.find(*out.repropose);
        if (it != pbft_->blocks.end() && it->second.header.previous_block_id == journal_.head().block_id &&
            journal_.verify(it->second).empty())
            pbft_handle(pbft_->replica.propose(*out.repropose));
        else
            pbft_maybe_propose();
    }
    if (out.propose)
        pbft_maybe_propose();
    if (out.commit && pbft_)
    {
        const auto it = pbft_->blocks.find(*out.commit);
        if (it == pbft_->blocks.end())
        {
            violation("pbft decided an unknown block");
            return;
        }
        const auto block = it->second;
        const auto r = journal_.commit(block);
        if (r.status != journal::ConsiderStatus::extended)
        {
            violation("pbft decided block failed to commit: " +
                      (r.violations.empty() ? std::string{} : r.violations.front()));
            return;
        }
        committed(block);
        on_head_changed();
        return;
    }
    pbft_arm_timer();
}

void Validator::pbft_maybe_propose()
{
    if (!pbft_ || publish_timer_)
        return;
    const auto& replica = pbft_->replica;
    if (!replica.is_primary() || replica.pre_prepared() || !journal_.has_pending())
        return;
    publish_timer_ = after(config_.publish_delay_ms, [this] {
        publish_timer_ = 0;
        pbft_propose_now();
    });
}

void Validator::pbft_propose_now()
{
    if (!pbft_)
        return;
    auto& replica = pbft_->replica;
    if (!replica.is_primary() || replica.pre_prepared())
        return;
    const auto& head = journal_.head();
    if (replica.sequence() != head.header.block_num + 1)
        return;
    const auto payload = consensus::pbft_payload(replica.view(), replica.sequence());
    const auto block = journal_.publish(
        head.block_id, config_.key, payload, env_.clock_s(), {}, config_.max_batches_per_block);
    if (!block)
        return;
    pbft_->blocks[block->block_id] = *block;

    if (config_.fault != Fault::equivocate)
    {
        pbft_handle(replica.propose(block->block_id));
        return;
    }

    // Conflicting proposal: an empty block on the same parent.
    ledger::BlockSpec spec{replica.sequence(), head.block_id, {}, head.header.state_root_hash,
        consensus::encode_payload(payload)};
    const auto alt = ledger::build_block(std::move(spec), config_.key);
    journal_.verify(alt);
    pbft_->blocks[alt.block_id] = alt;
    replica.propose(block->block_id);

    auto& adv = *config_.adversary;
    std::vector<std::string> honest;
    for (const auto& member : replica.members())
    {
        if (!adv.coalition.contains(member))
            honest.push_back(member);
    }
    auto& shown = adv.shown[{replica.view(), replica.sequence()}];
    const bool can_split = static_cast<int64_t>(adv.coalition.size()) > replica.f();
    for (size_t i = 0; i < honest.size(); ++i)
        shown[honest[i]] = i < (honest.size() + 1) / 2 ? block->block_id : alt.block_id;

    for (const auto& member : replica.members())
    {
        if (member == id())
            continue;
        const auto it = shown.find(member);
        const auto& digest = it != shown.end() ? it->second : block->block_id;
        consensus::PbftMessage pre{consensus::PbftMessage::Kind::pre_prepare, replica.view(),
            replica.sequence(), digest, id(), 0};
        Message m = make(network::msg::kPbft, consensus::to_record(pre));
        m.blocks.push_back(pbft_->blocks.at(digest));
        send(member, std::move(m));
        if (it != shown.end())
        {
            // A coalition too small to split the honest replicas votes
            // against what each was shown, stalling the round instead.
            auto commit = pre;
            commit.kind = consensus::PbftMessage::Kind::commit;
            if (!can_split)
                commit.digest = digest == block->block_id ? alt.block_id : block->block_id;
            send(member, make(network::msg::kPbft, consensus::to_record(commit)));
        }
    }
    pbft_arm_timer();
}

void Validator::pbft_arm_timer()
{
    if (!pbft_ || pbft_->timer)
        return;
    const auto& replica = pbft_->replica;
    if (!journal_.has_pending() && !replica.pre_prepared() && !replica.in_view_change())
        return;
    pbft_->armed_at_height = journal_.head().header.block_num;
    pbft_->timer = after(config_.pbft_timeout_ms, [this] { pbft_timeout(); });
}

void Validator::pbft_timeout()
{
    if (!pbft_)
        return;
    pbft_->timer = 0;
    if (journal_.head().header.block_num > pbft_->armed_at_height)
    {
        pbft_arm_timer();
        return;
    }
    pbft_handle(pbft_->replica.on_timeout());
    pbft_arm_timer();
}

void Validator::pbft_message(const std::string& from, const network::MessagePtr& message)
{
    const auto pm = consensus::pbft_message_from_record(message->fields);
    if (pm.sender != from)
        return;
    if (pm.kind == consensus::PbftMessage::Kind::pre_prepare)
    {
        if (message->blocks.size() != 1 || message->blocks.front().block_id != pm.digest)
            return;
        const auto& block = message->blocks.front();
        const auto& head = journal_.head();
        if (pm.sequence > head.header.block_num + 1)
        {
            pbft_->future[pm.sequence].emplace_back(from, message);
            return;
        }
        if (pm.sequence < head.header.block_num + 1 || block.header.block_num != pm.sequence ||
            block.header.previous_block_id != head.block_id)
            return;
        if (!journal_.verify(block).empty())
            return;
        pbft_->blocks[pm.digest] = block;

        if (config_.fault == Fault::equivocate && config_.adversary->coalition.contains(from))
        {
            // Back the coalition primary: each honest replica hears votes for
            // whatever it was shown.
            const auto& shown = config_.adversary->shown[{pm.view, pm.sequence}];
            for (const auto& [member, digest] : shown)
            {
                for (const auto kind : {consensus::PbftMessage::Kind::prepare, consensus::PbftMessage::Kind::commit})
                {
                    consensus::PbftMessage vote{kind, pm.view, pm.sequence, digest, id(), 0};
                    send(member, make(network::msg::kPbft, consensus::to_record(vote)));
                }
            }
        }
    }
    else if (pm.kind == consensus::PbftMessage::Kind::view_change && message->blocks.size() == 1 &&
             message->blocks.front().block_id == pm.digest)
        pbft_->blocks.emplace(pm.digest, message->blocks.front());

    pbft_handle(pbft_->replica.on_message(pm));
}

void Validator::pbft_replay_future()
{
    const uint64_t next = journal_.head().header.block_num + 1;
    auto& future = pbft_->future;
    future.erase(future.begin(), future.lower_bound(next));
    const auto it = future.find(next);
    if (it == future.end())
        return;
    auto queued = std::move(it->second);
    future.erase(it);
    for (const auto& [from, message] : queued)
    {
        if (!pbft_)
            return;
        pbft_message(from, message);
    }
}

void Validator::pbft_vouch(const std::string& from, const ledger::Block& block)
{
    if (from.empty())
        return;
    auto& entry = vouches_[block.block_id];
    entry.first = block;
    entry.second.insert(from);
    pbft_try_catch_up();
}

void Validator::pbft_try_catch_up()
{
    const auto& head = journal_.head();
    std::erase_if(vouches_, [&](const auto& kv) { return kv.second.first.header.block_num <= head.header.block_num; });
    const auto settings = journal_.engine_after(head.block_id);
    if (settings.algorithm != Algorithm::pbft || settings.members.empty())
        return;
    const auto f = consensus::max_faults(static_cast<int64_t>(settings.members.size()));
    for (const auto& [block_id, entry] : vouches_)
    {
        const auto& [block, senders] = entry;
        if (block.header.previous_block_id != head.block_id)
            continue;
        const auto voters = std::count_if(senders.begin(), senders.end(),
            [&](const std::string& s) { return contains(settings.members, s); });
        if (voters < f + 1)
            continue;
        const auto copy = block;
        const auto r = journal_.commit(copy);
        if (r.status != journal::ConsiderStatus::extended)
            continue;
        committed(copy);
        on_head_changed();
        return;
    }
}

// -------------------------------------------------------------------- raft

void Validator::raft_arm_election()
{
    if (!raft_)
        return;
    cancel(raft_->election_timer);
    if (raft_->node.role() == consensus::RaftRole::leader)
        return;
    const auto delay = std::uniform_int_distribution<int64_t>{
        consensus::kRaftElectionMinMs, consensus::kRaftElectionMaxMs}(rng_);
    raft_->election_timer = after(delay, [this] {
        if (!raft_)
            return;
        raft_->election_timer = 0;
        raft_handle(raft_->node.on_election_timeout());
        if (raft_ && raft_->node.role() != consensus::RaftRole::leader && !raft_->election_timer)
            raft_arm_election();
    });
}

void Validator::raft_heartbeat()
{
    if (!raft_)
        return;
    raft_->heartbeat_timer = 0;
    if (raft_->node.role() != consensus::RaftRole::leader)
        return;
    raft_handle(raft_->node.on_heartbeat());
    if (raft_ && raft_->node.role() == consensus::RaftRole::leader)
        raft_->heartbeat_timer = after(consensus::kRaftHeartbeatMs, [this] { raft_heartbeat(); });
}

void Validator::raft_maybe_publish()
{
    if (!raft_ || publish_timer_ || raft_->node.role() != consensus::RaftRole::leader || !journal_.has_pending())
        return;
    publish_timer_ = after(config_.publish_delay_ms, [this] {
        publish_timer_ = 0;
        if (!raft_ || raft_->node.role() != consensus::RaftRole::leader)
            return;
        auto& node = raft_->node;
        if (node.last_index() - std::min(node.commit_index(), node.last_index()) >= config_.raft_max_in_flight)
            return;
        const std::string parent = node.last_index() > 0 ? node.log().back().block_id
                                                         : journal_.store().at(raft_->base)->block_id;
        if (!journal_.find_block(parent))
            return;
        const auto block = journal_.publish(parent, config_.key, consensus::raft_payload(node.term()),
            env_.clock_s(), {}, config_.max_batches_per_block);
        if (!block)
            return;
        raft_->blocks[block->block_id] = *block;
        raft_handle(node.append(block->block_id));
    });
}

void Validator::raft_message(const std::string& from, const network::MessagePtr& message)
{
    auto rm = consensus::raft_message_from_record(message->fields);
    if (rm.sender != from)
        return;
    if (rm.kind == consensus::RaftMessage::Kind::append_entries && !rm.entries.empty())
    {
        std::map<std::string, const ledger::Block*> carried;
        for (const auto& b : message->blocks)
            carried.emplace(b.block_id, &b);
        size_t ok = 0;
        for (; ok < rm.entries.size(); ++ok)
        {
            const auto& block_id = rm.entries[ok].block_id;
            const auto it = carried.find(block_id);
            const ledger::Block* block = it != carried.end() ? it->second : nullptr;
            if (!block)
            {
                const auto known = raft_->blocks.find(block_id);
                if (known == raft_->blocks.end())
                    break;
                block = &known->second;
            }
            if (!journal_.store().contains(block_id) && !journal_.verify(*block).empty())
                break;
            raft_->blocks.insert_or_assign(block_id, *block);
        }
        rm.entries.resize(ok);
    }
    raft_handle(raft_->node.on_message(rm));
}

void Validator::raft_handle(const consensus::RaftOutput& out)
{
    if (!raft_)
        return;
    for (const auto& [to, rm] : out.send)
    {
        Message m = make(network::msg::kRaft, consensus::to_record(rm));
        for (const auto& e : rm.entries)
        {
            if (const auto it = raft_->blocks.find(e.block_id); it != raft_->blocks.end())
                m.blocks.push_back(it->second);
        }
        send(to, std::move(m));
    }
    if (out.became_leader)
    {
        if (observer_.on_leader)
            observer_.on_leader(id(), raft_->node.term());
        cancel(raft_->election_timer);
        cancel(raft_->heartbeat_timer);
        raft_->heartbeat_timer = after(consensus::kRaftHeartbeatMs, [this] { raft_heartbeat(); });
    }
    if (out.stepped_down)
    {
        cancel(raft_->heartbeat_timer);
        raft_arm_election();
    }
    else if (out.reset_election_timer && raft_->node.role() != consensus::RaftRole::leader)
        raft_arm_election();

    bool advanced = false;
    for (const auto& [index, entry] : out.committed)
    {
        if (journal_.store().contains(entry.block_id))
            continue;
        const auto it = raft_->blocks.find(entry.block_id);
        if (it == raft_->blocks.end())
        {
            violation("raft committed an unknown block at index " + std::to_string(index));
            continue;
        }
        const auto block = it->second;
        const auto r = journal_.commit(block);
        if (r.status != journal::ConsiderStatus::extended)
        {
            violation("raft committed block failed to apply: " +
                      (r.violations.empty() ? std::string{} : r.violations.front()));
            continue;
        }
        committed(block);
        advanced = true;
    }
    if (advanced)
        on_head_changed();
    else
        raft_maybe_publish();
}

// ------------------------------------------------------------------ status

consensus::PoetState Validator::poet_stats() const
{
    consensus::PoetState s;
    s.mean_wait_ms = config_.poet_mean_wait_ms;
    const auto& store = journal_.store();
    for (uint64_t n = 1; n <= store.height(); ++n)
    {
        const auto* b = store.at(n);
        try
        {
            if (consensus::decode_payload(b->header.consensus_payload).engine ==
                to_string(Algorithm::poet_cft))
                s.record(b->header.signer_public_key);
        }
        catch (const CodecError&)
        {
        }
    }
    return s;
}

ValidatorStatus Validator::status() const
{
    ValidatorStatus s;
    const auto& head = journal_.head();
    const auto settings = journal_.engine_after(head.block_id);
    s.algorithm = settings.algorithm;
    s.members = settings.members;
    s.head_id = head.block_id;
    s.head_num = head.header.block_num;
    s.peers = table_.peers.size();
    s.pending = journal_.pending().size();
    if (pbft_)
    {
        s.pbft_view = pbft_->replica.view();
        s.view_changes = pbft_->replica.view_changes();
    }
    if (raft_)
    {
        s.raft_term = raft_->node.term();
        s.raft_role = std::string{to_string(raft_->node.role())};
        s.raft_leader = raft_->node.leader().value_or("");
    }
    const auto stats = poet_stats();
    s.poet_rounds = stats.rounds_observed;
    s.poet_wins = stats.wins;
    const auto n = static_cast<int64_t>(std::max<size_t>(config_.directory.size(), settings.members.size()));
    s.ztests = stats.ztests(n);
    return s;
}
}  // namespace airchain::node
