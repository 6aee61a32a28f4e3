// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "consensus/analysis.hpp"
#include "consensus/pbft.hpp"
#include "consensus/raft.hpp"
#include "journal/journal.hpp"
#include "network/message.hpp"
#include "network/peering.hpp"

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace airchain::node
{
/// Scripted misbehaviour for simulations.
enum class Fault
{
    none,
    equivocate,  ///< pbft: conflicting proposals and split votes
    cheat_wait,  ///< poet: always claims a zero wait
};

std::string_view to_string(Fault f) noexcept;
std::optional<Fault> parse_fault(std::string_view s) noexcept;

/// Knowledge shared by colluding equivocators: which block each honest
/// replica was shown at a (view, sequence).
struct Adversary
{
    std::set<std::string> coalition;
    std::map<std::pair<uint64_t, uint64_t>, std::map<std::string, std::string>> shown;
};

/// Clock, timers, and transport supplied by the simulator or the runtime.
class Environment
{
public:
    virtual ~Environment() = default;
    virtual int64_t now_ms() const = 0;
    /// Unix seconds for admission checks.
    virtual int64_t clock_s() const = 0;
    virtual void send(const std::string& to, network::MessagePtr message) = 0;
    virtual uint64_t schedule(int64_t delay_ms, std::function<void()> fn) = 0;
    virtual void cancel(uint64_t timer) = 0;
};

/// Hooks for harnesses. All optional.
struct Observer
{
    std::function<void(const std::string& node, const ledger::Block& block)> on_commit;
    std::function<void(const std::string& node, const std::vector<ledger::Block>& abandoned)> on_fork_switch;
    std::function<void(const std::string& node, uint64_t term)> on_leader;
    std::function<void(const std::string& node, uint64_t view)> on_view_change;
    std::function<void(const std::string& node, const std::string& what)> on_violation;
};

struct ValidatorConfig
{
    crypto::KeyPair key;
    ledger::Block genesis;
    journal::JournalConfig journal;
    std::shared_ptr<state::NodeStore> nodes;
    network::Directory directory;
    size_t min_connectivity = network::kDefaultMinConnectivity;
    size_t max_connectivity = network::kDefaultMaxConnectivity;
    int64_t peering_interval_ms = 50;
    /// Pause before retrying candidates that did not answer.
    int64_t peering_retry_ms = 1000;
    int64_t poet_mean_wait_ms = 1000;
    int64_t pbft_timeout_ms = 1500;
    int64_t publish_delay_ms = 10;
    size_t max_batches_per_block = 100;
    size_t raft_max_in_flight = 4;
    uint64_t seed = 1;
    Fault fault = Fault::none;
    std::shared_ptr<Adversary> adversary;
};

struct ValidatorStatus
{
    consensus::Algorithm algorithm = consensus::Algorithm::poet_cft;
    std::vector<std::string> members;
    std::string head_id;
    uint64_t head_num = 0;
    size_t peers = 0;
    size_t pending = 0;
    uint64_t pbft_view = 0;
    uint64_t view_changes = 0;
    uint64_t raft_term = 0;
    std::string raft_role;
    std::string raft_leader;
    int64_t poet_rounds = 0;
    std::map<std::string, int64_t> poet_wins;
    std::map<std::string, consensus::ZTest> ztests;
};

/// One validator: peering, gossip, journal, and the consensus engine the
/// chain selects at its head. Single-threaded; the environment delivers
/// every message and timer on one thread.
class Validator
{
public:
    Validator(ValidatorConfig config, Environment& env, Observer observer = {});

    const std::string& id() const noexcept { return config_.key.public_key; }
    bool running() const noexcept { return running_; }

    void start();
    /// Halts: timers cancelled, pending batches and engine volatile state
    /// dropped. The chain and the Raft log survive.
    void crash();
    void restart();
    /// Pushes buffered store writes to disk.
    void flush() { journal_.flush(); }

    /// Client submission from the API. Accepted batches are gossiped.
    journal::SubmitResult submit(const ledger::Batch& batch);
    void receive(const std::string& from, const network::MessagePtr& message);

    const journal::Journal& journal() const noexcept { return journal_; }
    const network::PeerTable& peers() const noexcept { return table_; }
    ValidatorStatus status() const;
    /// Lottery wins over the committed chain.
    consensus::PoetState poet_stats() const;
    uint64_t messages_sent() const noexcept { return sent_; }

private:
    struct PoetRun
    {
        uint64_t round = 0;
        int64_t wait_ms = 0;
        uint64_t timer = 0;
        bool expired = false;
    };
    struct PbftRun
    {
        consensus::PbftReplica replica;
        uint64_t timer = 0;
        uint64_t armed_at_height = 0;
        std::map<std::string, ledger::Block> blocks;
        std::map<uint64_t, std::vector<std::pair<std::string, network::MessagePtr>>> future;
    };
    struct RaftRun
    {
        consensus::RaftNode node;
        uint64_t base = 0;
        uint64_t election_timer = 0;
        uint64_t heartbeat_timer = 0;
        std::map<std::string, ledger::Block> blocks;
    };

    // plumbing
    void send(const std::string& to, network::Message m);
    void gossip(network::Message m, const std::string& except);
    uint64_t after(int64_t delay_ms, std::function<void()> fn);
    void cancel(uint64_t& timer);
    bool first_seen(const std::string& id);
    void violation(const std::string& what);

    // peering
    void peering_tick();
    void on_peering(const std::string& from, const network::Message& m);

    // chain
    void on_batch(const std::string& from, const ledger::Batch& batch);
    void on_block(const std::string& from, const ledger::Block& block);
    void on_head_changed();
    void on_work();
    void committed(const ledger::Block& block);
    void release_parked(const std::string& block_id);

    // engine lifecycle
    void activate(const journal::EngineSettings& settings);
    void teardown();
    void replay_inactive(consensus::Algorithm algorithm);

    // poet
    void poet_start_round();
    void poet_timer();
    void poet_try_publish();

    // pbft
    void pbft_message(const std::string& from, const network::MessagePtr& message);
    void pbft_handle(const consensus::PbftOutput& out);
    void pbft_send(const consensus::PbftMessage& m);
    void pbft_maybe_propose();
    void pbft_propose_now();
    void pbft_arm_timer();
    void pbft_timeout();
    void pbft_vouch(const std::string& from, const ledger::Block& block);
    void pbft_try_catch_up();
    void pbft_replay_future();

    // raft
    void raft_message(const std::string& from, const network::MessagePtr& message);
    void raft_handle(const consensus::RaftOutput& out);
    void raft_arm_election();
    void raft_heartbeat();
    void raft_maybe_publish();

    ValidatorConfig config_;
    Environment& env_;
    Observer observer_;
    journal::Journal journal_;
    network::PeerTable table_;
    std::mt19937_64 rng_;
    bool running_ = false;
    uint64_t sent_ = 0;

    std::unordered_set<std::string> seen_;
    std::deque<std::string> seen_order_;

    uint64_t peering_timer_ = 0;
    uint64_t publish_timer_ = 0;

    std::optional<journal::EngineSettings> active_;
    std::optional<PoetRun> poet_;
    std::optional<PbftRun> pbft_;
    std::optional<RaftRun> raft_;
    std::map<consensus::Algorithm, std::vector<std::pair<std::string, network::MessagePtr>>> inactive_;
    std::map<std::string, std::pair<ledger::Block, std::set<std::string>>> vouches_;
};
}  // namespace airchain::node
