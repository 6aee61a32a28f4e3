// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "network/peering.hpp"

#include <algorithm>

namespace airchain::network
{
bool PeerTable::accept(const std::string& id, const std::string& endpoint)
{
    if (id == self_id)
        return false;
    if (peers.contains(id))
        return true;
    if (full())
        return false;
    peers.emplace(id, endpoint);
    return true;
}

std::optional<std::string> next_candidate(const PeerTable& table, const Directory& directory)
{
    const auto usable = [&](const std::string& id) {
        return id != table.self_id && !table.peers.contains(id) && !table.attempted.contains(id);
    };
    for (const auto& id : table.learned)
    {
        if (usable(id))
            return id;
    }
    std::vector<std::string> ids;
    for (const auto& e : directory)
        ids.push_back(e.node_id);
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids)
    {
        if (usable(id))
            return id;
    }
    return std::nullopt;
}

std::optional<std::string> peer_connect_round(PeerTable& table, const Directory& directory,
    const Connector& connect)
{
    if (!table.under_connected())
        return std::nullopt;
    auto target = next_candidate(table, directory);
    if (!target)
        return std::nullopt;
    table.attempted.insert(*target);
    const auto response = connect(*target);
    if (response.reply == ConnectReply::accepted)
    {
        std::string endpoint;
        for (const auto& e : directory)
        {
            if (e.node_id == *target)
                endpoint = e.endpoint;
        }
        table.accept(*target, endpoint);
        for (const auto& id : response.peers)
        {
            if (id != table.self_id)
                table.learned.insert(id);
        }
    }
    return target;
}

bool is_fully_peered(const std::vector<const PeerTable*>& tables, const Directory& directory)
{
    return std::all_of(tables.begin(), tables.end(), [&](const PeerTable* t) {
        return !t->under_connected() || !next_candidate(*t, directory);
    });
}

PeeringSimulation::PeeringSimulation(Directory directory, std::set<std::string> reachable,
    size_t min_connectivity, size_t max_connectivity)
  : directory_{std::move(directory)}, reachable_{std::move(reachable)}
{
    for (const auto& e : directory_)
    {
        if (!reachable_.contains(e.node_id))
            continue;
        PeerTable t;
        t.self_id = e.node_id;
        t.min_connectivity = min_connectivity;
        t.max_connectivity = max_connectivity;
        tables_.emplace(e.node_id, std::move(t));
    }
}

size_t PeeringSimulation::round()
{
    size_t attempts = 0;
    for (auto& [id, table] : tables_)
    {
        const auto& self = id;
        const auto connect = [&](const std::string& target) -> ConnectResponse {
            const auto it = tables_.find(target);
            if (it == tables_.end())
                return {ConnectReply::unreachable, {}};
            std::string endpoint;
            for (const auto& e : directory_)
            {
                if (e.node_id == self)
                    endpoint = e.endpoint;
            }
            if (!it->second.accept(self, endpoint))
                return {ConnectReply::refused, {}};
            ConnectResponse r{ConnectReply::accepted, {}};
            for (const auto& [peer, _] : it->second.peers)
                r.peers.push_back(peer);
            return r;
        };
        if (peer_connect_round(table, directory_, connect))
            ++attempts;
    }
    return attempts;
}

bool PeeringSimulation::peered() const
{
    std::vector<const PeerTable*> ptrs;
    for (const auto& [_, t] : tables_)
        ptrs.push_back(&t);
    return is_fully_peered(ptrs, directory_);
}

std::optional<size_t> PeeringSimulation::run(size_t limit)
{
    for (size_t r = 0; r <= limit; ++r)
    {
        if (peered())
            return r;
        if (r < limit)
            round();
    }
    return std::nullopt;
}
}  // namespace airchain::network
