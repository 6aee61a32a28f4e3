// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "network/message.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace airchain::network
{
/// Discrete-event clock. Events at equal times run in scheduling order.
class Scheduler
{
public:
    using Task = std::function<void()>;

    int64_t now_ms() const noexcept { return now_; }
    uint64_t schedule(int64_t delay_ms, Task task);
    void cancel(uint64_t id);
    /// Runs the next event. Returns false when none is left.
    bool step();
    /// Runs every event due at or before `t`, then sets the clock to `t`.
    void run_until(int64_t t);
    size_t queued() const noexcept { return queue_.size(); }

private:
    struct Event
    {
        int64_t at;
        uint64_t id;
        bool operator>(const Event& o) const noexcept
        {
            return at != o.at ? at > o.at : id > o.id;
        }
    };

    int64_t now_ = 0;
    uint64_t next_id_ = 1;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::map<uint64_t, Task> tasks_;
};

struct SimTransportConfig
{
    int64_t latency_min_ms = 5;
    int64_t latency_max_ms = 20;
    double drop_rate = 0;
    std::vector<std::set<std::string>> partitions;
    uint64_t seed = 1;
};

/// Validates drop_rate and partition disjointness. Throws ConfigError.
void check(const SimTransportConfig& config);

/// In-process transport over a Scheduler: random latency, drops,
/// partitions, and crashed nodes. Every delivery is traced.
class SimNetwork
{
public:
    /// Receives the direct sender and the message.
    using Handler = std::function<void(const std::string& from, const MessagePtr&)>;

    SimNetwork(Scheduler& scheduler, SimTransportConfig config);

    void attach(const std::string& id, Handler handler);
    void set_down(const std::string& id, bool down);
    bool is_down(const std::string& id) const { return down_.contains(id); }
    void set_partitions(std::vector<std::set<std::string>> partitions);
    bool linked(const std::string& a, const std::string& b) const;

    void send(const std::string& from, const std::string& to, MessagePtr message);

    const std::vector<std::string>& trace() const noexcept { return trace_; }
    const std::map<std::string, uint64_t>& delivered_by_type() const noexcept { return delivered_; }
    uint64_t dropped() const noexcept { return dropped_; }
    Scheduler& scheduler() noexcept { return scheduler_; }

private:
    Scheduler& scheduler_;
    SimTransportConfig config_;
    std::mt19937_64 rng_;
    std::map<std::string, Handler> handlers_;
    std::unordered_set<std::string> down_;
    std::map<std::string, size_t> partition_of_;
    std::vector<std::string> trace_;
    std::map<std::string, uint64_t> delivered_;
    uint64_t dropped_ = 0;
};

/// Delivery report of one flood.
struct GossipReport
{
    std::set<std::string> reached;
    std::map<std::string, size_t> forwards;  ///< per node
};

/// Floods one message from `origin` over `adjacency`: each node forwards
/// to its neighbours the first time it sees the message. Replaces the
/// network's handlers and runs the scheduler dry.
GossipReport gossip_broadcast(SimNetwork& net, const std::map<std::string, std::set<std::string>>& adjacency,
    const std::string& origin, const std::string& content_id);
}  // namespace airchain::network
