// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "node/runtime.hpp"
#include "api/api.hpp"
#include "api/http.hpp"
#include "common/error.hpp"
#include "network/tcp.hpp"
#include "registry/registry.hpp"

#include <boost/asio/executor_work_guard.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/steady_timer.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace airchain::node
{
namespace asio = boost::asio;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace
{
void only_keys(const Json& j, std::initializer_list<std::string_view> keys, std::string_view where)
{
    if (!j.is_object())
        throw ConfigError{"config: " + std::string{where} + " must be an object"};
    for (const auto& [k, _] : j.items())
    {
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ConfigError{"config: unknown key " + std::string{where} + "." + k};
    }
}

template <typename T>
void read(const Json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try
    {
        out = j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception&)
    {
        throw ConfigError{std::string{"config: bad value for "} + key};
    }
}

void read_path(const Json& j, const char* key, const fs::path& base, fs::path& out)
{
    std::string s;
    read(j, key, s);
    if (s.empty())
        return;
    out = fs::path{s};
    if (out.is_relative() && !base.empty())
        out = base / out;
}
}  // namespace

std::pair<std::string, uint16_t> split_endpoint(const std::string& endpoint)
{
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0)
        throw ConfigError{"config: endpoint must be host:port, got '" + endpoint + "'"};
    const auto port_text = endpoint.substr(colon + 1);
    if (port_text.empty() || port_text.size() > 5 ||
        !std::all_of(port_text.begin(), port_text.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ConfigError{"config: bad port in '" + endpoint + "'"};
    const auto port = std::stoul(port_text);
    if (port > 65535)
        throw ConfigError{"config: bad port in '" + endpoint + "'"};
    return {endpoint.substr(0, colon), static_cast<uint16_t>(port)};
}

NodeConfig parse_node_config(const std::string& text, const fs::path& base_dir)
{
    Json j;
    try
    {
        j = Json::parse(text, nullptr, true, true);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ConfigError{std::string{"config: "} + e.what()};
    }
    only_keys(j,
        {"key_file", "api", "internal", "consensus", "peers", "min_connectivity", "max_connectivity",
            "consensus_params", "genesis_file", "genesis", "data_dir", "admin_token"},
        "node");
    NodeConfig c;
    read_path(j, "key_file", base_dir, c.key_file);
    read(j, "api", c.api_endpoint);
    read(j, "internal", c.internal_endpoint);
    read(j, "consensus", c.consensus_endpoint);
    if (j.contains("peers"))
    {
        if (!j["peers"].is_array())
            throw ConfigError{"config: peers must be an array"};
        for (const auto& p : j["peers"])
        {
            only_keys(p, {"id", "endpoint"}, "peers[]");
            network::DirectoryEntry e;
            read(p, "id", e.node_id);
            read(p, "endpoint", e.endpoint);
            if (e.node_id.empty() || e.endpoint.empty())
                throw ConfigError{"config: each peer needs id and endpoint"};
            c.peers.push_back(std::move(e));
        }
    }
    read(j, "min_connectivity", c.min_connectivity);
    read(j, "max_connectivity", c.max_connectivity);
    if (j.contains("consensus_params"))
    {
        const auto& p = j["consensus_params"];
        only_keys(p, {"poet_mean_wait_ms", "pbft_timeout_ms", "publish_delay_ms", "max_batches_per_block"},
            "consensus_params");
        read(p, "poet_mean_wait_ms", c.poet_mean_wait_ms);
        read(p, "pbft_timeout_ms", c.pbft_timeout_ms);
        read(p, "publish_delay_ms", c.publish_delay_ms);
        read(p, "max_batches_per_block", c.max_batches_per_block);
    }
    read_path(j, "genesis_file", base_dir, c.genesis_file);
    if (j.contains("genesis"))
    {
        const auto& g = j["genesis"];
        only_keys(g, {"algorithm", "members"}, "genesis");
        journal::GenesisSpec spec;
        std::string name = std::string{consensus::to_string(spec.algorithm)};
        read(g, "algorithm", name);
        const auto a = consensus::parse_algorithm(name);
        if (!a)
            throw ConfigError{"config: unknown algorithm " + name};
        spec.algorithm = *a;
        read(g, "members", spec.members);
        c.genesis = std::move(spec);
    }
    read_path(j, "data_dir", base_dir, c.data_dir);
    std::string token;
    read(j, "admin_token", token);
    if (!token.empty())
        c.admin_token = token;
    return c;
}

NodeConfig load_node_config(const fs::path& path)
{
    std::ifstream in{path};
    if (!in)
        throw ConfigError{"config: cannot read " + path.string()};
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_node_config(ss.str(), path.parent_path());
}

void check(const NodeConfig& c)
{
    if (c.key_file.empty())
        throw ConfigError{"config: key_file is required"};
    if (c.data_dir.empty())
        throw ConfigError{"config: data_dir is required"};
    if (c.genesis_file.empty() && !c.genesis)
        throw ConfigError{"config: genesis_file or genesis is required"};
    if (c.min_connectivity == 0 || c.min_connectivity > c.max_connectivity)
        throw ConfigError{"config: need 0 < min_connectivity <= max_connectivity"};
    if (c.poet_mean_wait_ms <= 0 || c.pbft_timeout_ms <= 0 || c.publish_delay_ms < 0 ||
        c.max_batches_per_block == 0)
        throw ConfigError{"config: consensus_params must be positive"};
    std::set<uint16_t> ports;
    for (const auto* e : {&c.api_endpoint, &c.internal_endpoint, &c.consensus_endpoint})
    {
        const auto port = split_endpoint(*e).second;
        if (port != 0 && !ports.insert(port).second)
            throw ConfigError{"config: api, internal and consensus ports must differ"};
    }
    for (const auto& p : c.peers)
        split_endpoint(p.endpoint);
    std::error_code ec;
    fs::create_directories(c.data_dir, ec);
    const auto probe = c.data_dir / ".probe";
    {
        std::ofstream out{probe};
        out << "ok";
        if (!out)
            throw ConfigError{"config: data_dir " + c.data_dir.string() + " is not writable"};
    }
    fs::remove(probe, ec);
}

// ------------------------------------------------------------------ runtime

struct NodeRuntime::Impl final : Environment, api::NodeAccess
{
    NodeConfig config;
    crypto::KeyPair key;
    ledger::Block genesis_block;
    asio::io_context io;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
    std::thread loop;
    std::thread::id loop_id;
    std::chrono::steady_clock::time_point epoch = std::chrono::steady_clock::now();
    std::unordered_map<uint64_t, std::unique_ptr<asio::steady_timer>> timers;
    uint64_t next_timer = 1;
    std::unique_ptr<network::TcpTransport> transport;
    std::unique_ptr<Validator> validator;
    std::unique_ptr<registry::Registry> keys;
    std::unique_ptr<api::Api> api;
    std::unique_ptr<api::HttpServer> http;
    uint16_t internal_port = 0;
    uint16_t consensus_port = 0;
    bool running = false;

    // Environment
    int64_t now_ms() const override
    {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - epoch)
            .count();
    }
    int64_t clock_s() const override
    {
        return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
    void send(const std::string& to, network::MessagePtr message) override { transport->send(to, message); }
    uint64_t schedule(int64_t delay_ms, std::function<void()> fn) override
    {
        const auto id = next_timer++;
        auto timer = std::make_unique<asio::steady_timer>(io, std::chrono::milliseconds{std::max<int64_t>(delay_ms, 0)});
        timer->async_wait([this, id, fn = std::move(fn)](const boost::system::error_code& ec) {
            if (ec)
                return;
            timers.erase(id);
            fn();
        });
        timers.emplace(id, std::move(timer));
        return id;
    }
    void cancel(uint64_t timer) override { timers.erase(timer); }

    // NodeAccess
    template <typename F>
    auto on_loop(F&& fn) const -> decltype(fn())
    {
        if (std::this_thread::get_id() == loop_id)
            return fn();
        if (!running)
            throw TransportError{"node: not running"};
        std::packaged_task<decltype(fn())()> task{std::forward<F>(fn)};
        auto result = task.get_future();
        asio::post(const_cast<asio::io_context&>(io), [&task] { task(); });
        return result.get();
    }
    void read(const std::function<void(const Validator&)>& fn) const override
    {
        on_loop([&] { fn(*validator); });
    }
    journal::SubmitResult submit(const ledger::Batch& batch) override
    {
        return on_loop([&] { return validator->submit(batch); });
    }
};

namespace
{
ledger::Block obtain_genesis(const NodeConfig& c, const crypto::KeyPair& key)
{
    if (!c.genesis_file.empty() && fs::exists(c.genesis_file))
        return journal::load_genesis(c.genesis_file);
    if (!c.genesis)
        throw ConfigError{"config: genesis file " + c.genesis_file.string() + " does not exist"};
    auto block = journal::make_genesis(*c.genesis, key);
    journal::save_genesis(c.genesis_file.empty() ? c.data_dir / "genesis.block" : c.genesis_file, block);
    return block;
}
}  // namespace

NodeRuntime::NodeRuntime(NodeConfig config) : impl_{std::make_unique<Impl>()}
{
    check(config);
    auto& m = *impl_;
    m.config = std::move(config);
    m.key = crypto::load_key_file(m.config.key_file);
    m.genesis_block = obtain_genesis(m.config, m.key);

    ValidatorConfig vc;
    vc.key = m.key;
    vc.genesis = m.genesis_block;
    vc.journal.data_dir = m.config.data_dir / "chain";
    vc.directory = m.config.peers;
    vc.min_connectivity = m.config.min_connectivity;
    vc.max_connectivity = m.config.max_connectivity;
    vc.poet_mean_wait_ms = m.config.poet_mean_wait_ms;
    vc.pbft_timeout_ms = m.config.pbft_timeout_ms;
    vc.publish_delay_ms = m.config.publish_delay_ms;
    vc.max_batches_per_block = m.config.max_batches_per_block;
    vc.seed = std::random_device{}();

    m.transport = std::make_unique<network::TcpTransport>(m.io, m.key,
        [&m](const std::string& from, const network::MessagePtr& message) { m.validator->receive(from, message); });
    m.transport->set_directory(m.config.peers);
    m.validator = std::make_unique<Validator>(std::move(vc), m);
    m.keys = std::make_unique<registry::Registry>(m.config.data_dir / "registry.log");
    api::ApiConfig ac;
    ac.admin_token = m.config.admin_token;
    m.api = std::make_unique<api::Api>(m, *m.keys, ac, [&m] { return m.clock_s(); });
}

NodeRuntime::~NodeRuntime()
{
    stop();
}

void NodeRuntime::start()
{
    auto& m = *impl_;
    if (m.running)
        return;
    const auto [ihost, iport] = split_endpoint(m.config.internal_endpoint);
    const auto [chost, cport] = split_endpoint(m.config.consensus_endpoint);
    const auto [ahost, aport] = split_endpoint(m.config.api_endpoint);
    m.internal_port = m.transport->listen(ihost, iport);
    m.consensus_port = m.transport->listen(chost, cport);
    m.http = std::make_unique<api::HttpServer>(*m.api, ahost, aport);
    m.http->start();

    m.work.emplace(m.io.get_executor());
    m.running = true;
    std::promise<void> ready;
    m.loop = std::thread{[&m, &ready] {
        m.loop_id = std::this_thread::get_id();
        ready.set_value();
        m.io.run();
    }};
    ready.get_future().wait();
    asio::post(m.io, [&m] { m.validator->start(); });
}

void NodeRuntime::stop()
{
    auto& m = *impl_;
    if (!m.running)
        return;
    if (m.http)
        m.http->stop();
    asio::post(m.io, [&m] {
        m.validator->crash();
        m.validator->flush();
        m.transport->close();
        m.timers.clear();
        m.work.reset();
    });
    m.loop.join();
    m.running = false;
}

bool NodeRuntime::running() const noexcept
{
    return impl_->running;
}

const std::string& NodeRuntime::node_id() const noexcept
{
    return impl_->key.public_key;
}

const ledger::Block& NodeRuntime::genesis() const noexcept
{
    return impl_->genesis_block;
}

uint16_t NodeRuntime::api_port() const noexcept
{
    return impl_->http ? impl_->http->port() : 0;
}

uint16_t NodeRuntime::consensus_port() const noexcept
{
    return impl_->consensus_port;
}

uint16_t NodeRuntime::internal_port() const noexcept
{
    return impl_->internal_port;
}

void NodeRuntime::read(const std::function<void(const Validator&)>& fn) const
{
    impl_->read(fn);
}
}  // namespace airchain::node
