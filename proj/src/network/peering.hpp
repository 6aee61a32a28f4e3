// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace airchain::network
{
inline constexpr size_t kDefaultMinConnectivity = 3;
inline constexpr size_t kDefaultMaxConnectivity = 8;

struct PeerTable
{
    std::string self_id;
    std::map<std::string, std::string> peers;  ///< node id -> endpoint
    size_t min_connectivity = kDefaultMinConnectivity;
    size_t max_connectivity = kDefaultMaxConnectivity;
    std::set<std::string> attempted;
    /// Ids learned from GET_PEERS replies, tried before the directory.
    std::set<std::string> learned;

    bool under_connected() const noexcept { return peers.size() < min_connectivity; }
    bool full() const noexcept { return peers.size() >= max_connectivity; }
    /// Adds `id` unless full or self. Returns whether it is now a peer.
    bool accept(const std::string& id, const std::string& endpoint);
};

struct DirectoryEntry
{
    std::string node_id;
    std::string endpoint;
};
using Directory = std::vector<DirectoryEntry>;

enum class ConnectReply
{
    accepted,
    refused,
    unreachable,
};

struct ConnectResponse
{
    ConnectReply reply = ConnectReply::unreachable;
    /// The target's peer list (its GET_PEERS answer) when accepted.
    std::vector<std::string> peers;
};

/// Sends CONNECT to `target` on behalf of `table.self_id`.
using Connector = std::function<ConnectResponse(const std::string& target)>;

/// Next CONNECT target: learned ids first, then the directory, both in
/// lexicographic order, skipping self, peers, and attempted ids.
std::optional<std::string> next_candidate(const PeerTable& table, const Directory& directory);

/// One CONNECT/GET_PEERS exchange for an under-connected node. Returns the
/// attempted id, or nothing when the node is satisfied or has exhausted
/// every candidate.
std::optional<std::string> peer_connect_round(PeerTable& table, const Directory& directory,
    const Connector& connect);

/// Every node has min_connectivity peers, or has no candidate left.
bool is_fully_peered(const std::vector<const PeerTable*>& tables, const Directory& directory);

/// Peering among in-process tables. Nodes absent from `reachable` never
/// answer.
class PeeringSimulation
{
public:
    PeeringSimulation(Directory directory, std::set<std::string> reachable, size_t min_connectivity,
        size_t max_connectivity);

    /// Every reachable under-connected node makes one attempt, in id order.
    /// Returns the number of attempts.
    size_t round();
    bool peered() const;
    /// Rounds until peered, at most `limit`; nothing if the limit is hit.
    std::optional<size_t> run(size_t limit);

    const std::map<std::string, PeerTable>& tables() const noexcept { return tables_; }

private:
    Directory directory_;
    std::set<std::string> reachable_;
    std::map<std::string, PeerTable> tables_;
};
}  // namespace airchain::network
