// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "api/http.hpp"
#include "common/error.hpp"
#include "ingest/trigger.hpp"
#include "node/runtime.hpp"
#include "node/simulation.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <thread>
#include <unistd.h>

namespace airchain::node
{
namespace
{
namespace fs = std::filesystem;

// -------------------------------------------------------------- simulation

TEST(simulation, same_seed_gives_byte_identical_report)
{
    const auto text = R"({"name":"det","seed":11,"nodes":4,"algorithm":"poet_cft","duration_ms":20000,
        "drop_rate":0.05,"workload":{"batch_interval_ms":500}})";
    const auto a = encode_report(Simulation{parse_scenario(text)}.run());
    const auto b = encode_report(Simulation{parse_scenario(text)}.run());
    EXPECT_EQ(a, b);
    auto other = parse_scenario(text);
    other.seed = 12;
    EXPECT_NE(encode_report(Simulation{other}.run()), a);
}

TEST(simulation, honest_pbft_agrees)
{
    auto s = parse_scenario(R"({"seed":3,"nodes":4,"algorithm":"pbft","duration_ms":60000,"target_height":10,
        "workload":{"batch_interval_ms":300}})");
    const auto r = Simulation{s}.run();
    EXPECT_TRUE(r.ok()) << format_report(r);
    EXPECT_GE(r.min_honest_height, 10u);
    EXPECT_EQ(r.batches_accepted, r.batches_committed);
}

TEST(simulation, report_names_each_node)
{
    const auto r = Simulation{parse_scenario(R"({"seed":1,"nodes":3,"duration_ms":5000})")}.run();
    ASSERT_EQ(r.nodes.size(), 3u);
    const auto text = format_report(r);
    for (const auto& n : r.nodes)
        EXPECT_NE(text.find(n.id.substr(0, 10)), std::string::npos);
}

TEST(scenario, parse_errors)
{
    EXPECT_THROW(parse_scenario("{"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"nodez":4})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"nodes":"four"})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"algorithm":"paxos"})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"faults":[{"node":0,"fault":"gremlin"}]})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"nodes":4,"faults":[{"node":9,"fault":"equivocate"}]})"), ConfigError);
    EXPECT_THROW(parse_scenario(R"({"nodes":0})"), ConfigError);
    EXPECT_NO_THROW(parse_scenario("{}"));
}

// ----------------------------------------------------------------- runtime

struct TempDir
{
    fs::path path = fs::temp_directory_path() /
                    ("airchain-node-" + std::to_string(::getpid()) + "-" +
                        std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

TEST(node_config, parses_and_resolves_relative_paths)
{
    const auto c = parse_node_config(R"({"key_file":"k.key","api":"127.0.0.1:9008","internal":"127.0.0.1:9004",
        "consensus":"127.0.0.1:9050","peers":[{"id":"ab","endpoint":"10.0.0.2:5050"}],"min_connectivity":1,
        "consensus_params":{"poet_mean_wait_ms":500},"genesis":{"algorithm":"pbft","members":["ab"]},
        "data_dir":"data","admin_token":"t"})",
        "/etc/airchain");
    EXPECT_EQ(c.key_file, fs::path{"/etc/airchain/k.key"});
    EXPECT_EQ(c.data_dir, fs::path{"/etc/airchain/data"});
    EXPECT_EQ(c.api_endpoint, "127.0.0.1:9008");
    ASSERT_EQ(c.peers.size(), 1u);
    EXPECT_EQ(c.peers[0].node_id, "ab");
    EXPECT_EQ(c.poet_mean_wait_ms, 500);
    EXPECT_EQ(c.pbft_timeout_ms, 3000);
    ASSERT_TRUE(c.genesis);
    EXPECT_EQ(c.genesis->algorithm, consensus::Algorithm::pbft);
    EXPECT_EQ(c.admin_token, std::optional<std::string>{"t"});
}

TEST(node_config, rejects_bad_input)
{
    EXPECT_THROW(parse_node_config("[]"), ConfigError);
    EXPECT_THROW(parse_node_config(R"({"key_file":"k","colour":"red"})"), ConfigError);
    EXPECT_THROW(parse_node_config(R"({"key_file":"k","consensus_params":{"speed":1}})"), ConfigError);
    EXPECT_THROW(split_endpoint("localhost"), ConfigError);
    EXPECT_THROW(split_endpoint("h:99999"), ConfigError);
    EXPECT_EQ(split_endpoint("h:80"), (std::pair<std::string, uint16_t>{"h", 80}));
}

TEST(node_config, check_requires_distinct_ports_and_writable_dir)
{
    TempDir dir;
    NodeConfig c;
    c.key_file = dir.path / "k";
    c.data_dir = dir.path;
    c.genesis = journal::GenesisSpec{};
    EXPECT_NO_THROW(check(c));
    auto same = c;
    same.internal_endpoint = same.api_endpoint;
    EXPECT_THROW(check(same), ConfigError);
    auto nowhere = c;
    nowhere.data_dir = "/proc/airchain-cannot-write";
    EXPECT_THROW(check(nowhere), ConfigError);
    auto no_genesis = c;
    no_genesis.genesis.reset();
    EXPECT_THROW(check(no_genesis), ConfigError);
}

NodeConfig local_config(const fs::path& dir)
{
    NodeConfig c;
    c.key_file = dir / "node.key";
    if (!fs::exists(c.key_file))
        crypto::save_key_file(c.key_file, fixture::test_key(7));
    c.api_endpoint = "127.0.0.1:0";
    c.internal_endpoint = "127.0.0.1:0";
    c.consensus_endpoint = "127.0.0.1:0";
    c.min_connectivity = 1;
    c.poet_mean_wait_ms = 100;
    c.genesis = journal::GenesisSpec{};
    c.data_dir = dir;
    return c;
}

TEST(node_runtime, serves_genesis_and_keeps_head_across_restart)
{
    TempDir dir;
    std::string genesis_id, head;
    {
        NodeRuntime node{local_config(dir.path)};
        node.start();
        genesis_id = node.genesis().block_id;
        const api::HttpClient client{"127.0.0.1:" + std::to_string(node.api_port())};
        const auto r = client.get("/blocks");
        ASSERT_EQ(r.status, 200);
        EXPECT_NE(r.body.find(genesis_id), std::string::npos);

        const auto key = codec::get_string(codec::decode(client.post("/accounts/0a/keys", "").body), "key");
        const auto sensor = fixture::test_key(8);
        family::AirReading reading;
        reading.timestamp_s = std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch()).count() - 10;
        reading.reporter_public_key = sensor.public_key;
        const auto batch = ingest::make_reading_batch({reading}, sensor);
        ASSERT_EQ(client.post("/batches", api::encode_batch_list({batch}), {{"x-api-key", key}}).status, 202);
        uint64_t height = 0;
        for (int i = 0; i < 100 && height == 0; ++i)
        {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            node.read([&](const Validator& v) {
                height = v.journal().head().header.block_num;
                head = v.journal().head().block_id;
            });
        }
        ASSERT_GE(height, 1u);
        node.stop();
        EXPECT_FALSE(node.running());
    }
    EXPECT_TRUE(fs::exists(dir.path / "genesis.block"));
    NodeRuntime again{local_config(dir.path)};
    EXPECT_EQ(again.genesis().block_id, genesis_id);
    again.start();
    std::string reopened;
    again.read([&](const Validator& v) { reopened = v.journal().head().block_id; });
    again.stop();
    EXPECT_EQ(reopened, head);
    EXPECT_NE(reopened, genesis_id);
}

TEST(node_runtime, second_node_on_same_port_fails_to_start)
{
    TempDir a, b;
    NodeRuntime first{local_config(a.path)};
    first.start();
    auto c = local_config(b.path);
    c.api_endpoint = "127.0.0.1:" + std::to_string(first.api_port());
    NodeRuntime second{c};
    EXPECT_THROW(second.start(), TransportError);
    first.stop();
}

TEST(node_runtime, missing_key_file_is_refused)
{
    TempDir dir;
    auto c = local_config(dir.path);
    c.key_file = dir.path / "absent.key";
    EXPECT_ANY_THROW(NodeRuntime{c});
}
}  // namespace
}  // namespace airchain::node
