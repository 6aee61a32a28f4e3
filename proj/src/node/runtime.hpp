// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "journal/genesis.hpp"
#include "network/peering.hpp"
#include "node/validator.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace airchain::node
{
/// Everything `run-node` needs. Endpoints are "host:port".
struct NodeConfig
{
    std::filesystem::path key_file;
    std::string api_endpoint = "127.0.0.1:8008";
    std::string internal_endpoint = "127.0.0.1:4004";
    std::string consensus_endpoint = "127.0.0.1:5050";
    /// Seed list; each entry names a validator and where its consensus
    /// endpoint listens.
    network::Directory peers;
    size_t min_connectivity = network::kDefaultMinConnectivity;
    size_t max_connectivity = network::kDefaultMaxConnectivity;
    int64_t poet_mean_wait_ms = 1000;
    int64_t pbft_timeout_ms = 3000;
    int64_t publish_delay_ms = 50;
    size_t max_batches_per_block = 100;
    std::filesystem::path genesis_file;
    /// Used to write `genesis_file` when it does not exist yet.
    std::optional<journal::GenesisSpec> genesis;
    std::filesystem::path data_dir;
    std::optional<std::string> admin_token;
};

/// Parses the JSON config form. Relative paths resolve against `base_dir`.
/// Throws ConfigError.
NodeConfig parse_node_config(const std::string& text, const std::filesystem::path& base_dir = {});
NodeConfig load_node_config(const std::filesystem::path& path);

/// Distinct ports, usable endpoints, a writable data directory, and a
/// genesis source. Creates the data directory. Throws ConfigError.
void check(const NodeConfig& config);

/// Splits "host:port". Throws ConfigError.
std::pair<std::string, uint16_t> split_endpoint(const std::string& endpoint);

/// A validator on real sockets: TCP transport on the internal and consensus
/// endpoints, HTTP API, and one event-loop thread that owns the Validator.
class NodeRuntime
{
public:
    /// Loads the key, the genesis block, and the store. Throws ConfigError,
    /// CryptoError or IoError; a store that does not replay is refused.
    explicit NodeRuntime(NodeConfig config);
    ~NodeRuntime();
    NodeRuntime(const NodeRuntime&) = delete;
    NodeRuntime& operator=(const NodeRuntime&) = delete;

    /// Binds every endpoint and starts the loop. Throws TransportError when
    /// a port is taken.
    void start();
    /// Stops serving and flushes the store. Idempotent.
    void stop();
    bool running() const noexcept;

    const std::string& node_id() const noexcept;
    const ledger::Block& genesis() const noexcept;
    uint16_t api_port() const noexcept;
    uint16_t consensus_port() const noexcept;
    uint16_t internal_port() const noexcept;

    /// Runs `fn` on the loop thread and waits for it.
    void read(const std::function<void(const Validator&)>& fn) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};
}  // namespace airchain::node
