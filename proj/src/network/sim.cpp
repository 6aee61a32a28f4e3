// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "network/sim.hpp"
#include "common/error.hpp"

namespace airchain::network
{
uint64_t Scheduler::schedule(int64_t delay_ms, Task task)
{
    const uint64_t id = next_id_++;
    queue_.push({now_ + std::max<int64_t>(0, delay_ms), id});
    tasks_.emplace(id, std::move(task));
    return id;
}

void Scheduler::cancel(uint64_t id)
{
    tasks_.erase(id);
}

bool Scheduler::step()
{
    while (!queue_.empty())
    {
        const auto ev = queue_.top();
        queue_.pop();
        const auto it = tasks_.find(ev.id);
        if (it == tasks_.end())
            continue;
        auto task = std::move(it->second);
        tasks_.erase(it);
        now_ = ev.at;
        task();
        return true;
    }
    return false;
}

void Scheduler::run_until(int64_t t)
{
    while (!queue_.empty() && queue_.top().at <= t)
        step();
    now_ = std::max(now_, t);
}

void check(const SimTransportConfig& config)
{
    if (!(config.drop_rate >= 0 && config.drop_rate <= 1))
        throw ConfigError{"drop_rate must lie in [0, 1]"};
    if (config.latency_min_ms < 0 || config.latency_max_ms < config.latency_min_ms)
        throw ConfigError{"latency bounds must satisfy 0 <= min <= max"};
    std::set<std::string> seen;
    for (const auto& p : config.partitions)
    {
        for (const auto& id : p)
        {
            if (!seen.insert(id).second)
                throw ConfigError{"partitions must be disjoint; " + id.substr(0, 16) + " repeats"};
        }
    }
}

SimNetwork::SimNetwork(Scheduler& scheduler, SimTransportConfig config)
  : scheduler_{scheduler}, config_{std::move(config)}, rng_{config_.seed}
{
    check(config_);
    set_partitions(config_.partitions);
}

void SimNetwork::attach(const std::string& id, Handler handler)
{
    handlers_.insert_or_assign(id, std::move(handler));
}

void SimNetwork::set_down(const std::string& id, bool down)
{
    if (down)
        down_.insert(id);
    else
        down_.erase(id);
}

void SimNetwork::set_partitions(std::vector<std::set<std::string>> partitions)
{
    config_.partitions = std::move(partitions);
    check(config_);
    partition_of_.clear();
    for (size_t i = 0; i < config_.partitions.size(); ++i)
    {
        for (const auto& id : config_.partitions[i])
            partition_of_[id] = i + 1;
    }
}

bool SimNetwork::linked(const std::string& a, const std::string& b) const
{
    const auto pa = partition_of_.find(a);
    const auto pb = partition_of_.find(b);
    return (pa == partition_of_.end() ? 0 : pa->second) == (pb == partition_of_.end() ? 0 : pb->second);
}

void SimNetwork::send(const std::string& from, const std::string& to, MessagePtr message)
{
    if (down_.contains(from) || !linked(from, to))
    {
        ++dropped_;
        return;
    }
    if (config_.drop_rate > 0 && std::uniform_real_distribution<double>{0, 1}(rng_) < config_.drop_rate)
    {
        ++dropped_;
        return;
    }
    const int64_t latency =
        std::uniform_int_distribution<int64_t>{config_.latency_min_ms, config_.latency_max_ms}(rng_);
    scheduler_.schedule(latency, [this, from, to, message = std::move(message)] {
        if (down_.contains(to))
        {
            ++dropped_;
            return;
        }
        const auto it = handlers_.find(to);
        if (it == handlers_.end())
        {
            ++dropped_;
            return;
        }
        trace_.push_back(std::to_string(scheduler_.now_ms()) + " " + from.substr(0, 8) + ">" +
                         to.substr(0, 8) + " " + message->type + " " + message->tag());
        ++delivered_[message->type];
        it->second(from, message);
    });
}

GossipReport gossip_broadcast(SimNetwork& net, const std::map<std::string, std::set<std::string>>& adjacency,
    const std::string& origin, const std::string& content_id)
{
    GossipReport report;
    auto message = std::make_shared<Message>();
    message->type = std::string{msg::kBatch};
    message->fields = {{"kind", content_id}};
    MessagePtr shared = message;

    const auto forward = [&](const std::string& node, const std::string& except) {
        const auto it = adjacency.find(node);
        if (it == adjacency.end())
            return;
        for (const auto& peer : it->second)
        {
            if (peer == except)
                continue;
            ++report.forwards[node];
            net.send(node, peer, shared);
        }
    };
    for (const auto& [node, _] : adjacency)
    {
        net.attach(node, [&, node](const std::string& from, const MessagePtr&) {
            if (!report.reached.insert(node).second)
                return;
            forward(node, from);
        });
    }
    report.reached.insert(origin);
    forward(origin, {});
    while (net.scheduler().step())
    {
    }
    return report;
}
}  // namespace airchain::network
