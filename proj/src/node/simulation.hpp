// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "api/api.hpp"
#include "ingest/emulator.hpp"
#include "ingest/trigger.hpp"
#include "network/sim.hpp"
#include "node/validator.hpp"
#include "registry/registry.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace airchain::node
{
struct FaultSpec
{
    size_t node = 0;
    Fault fault = Fault::none;
};

struct CrashSpec
{
    size_t node = 0;
    int64_t at_ms = 0;
    std::optional<int64_t> restart_at_ms;
};

/// Submits a consensus.algorithm change once every honest node has reached
/// `at_height`.
struct SwitchSpec
{
    uint64_t at_height = 0;
    consensus::Algorithm algorithm = consensus::Algorithm::pbft;
};

struct WorkloadSpec
{
    /// Emulated sensors, each posting through the API of node (i mod n).
    size_t sensors = 0;
    int64_t sample_interval_ms = 30'000;
    ingest::BatchTriggerConfig trigger;
    /// Synthetic single-reading batches, one per interval, when > 0.
    int64_t batch_interval_ms = 0;
    /// Workload stops this long before the end of the run.
    int64_t stop_before_end_ms = 0;
};

struct Scenario
{
    std::string name = "scenario";
    uint64_t seed = 1;
    size_t nodes = 4;
    consensus::Algorithm algorithm = consensus::Algorithm::poet_cft;
    int64_t duration_ms = 60'000;
    /// Ends the run early once every honest running node reaches it.
    std::optional<uint64_t> target_height;

    int64_t latency_min_ms = 5;
    int64_t latency_max_ms = 20;
    double drop_rate = 0;
    size_t min_connectivity = network::kDefaultMinConnectivity;
    size_t max_connectivity = network::kDefaultMaxConnectivity;

    int64_t poet_mean_wait_ms = 1000;
    int64_t pbft_timeout_ms = 1500;

    std::vector<FaultSpec> faults;
    std::vector<CrashSpec> crashes;
    /// Crashes the current raft leader at every multiple of this period.
    int64_t crash_leader_every_ms = 0;
    int64_t crash_downtime_ms = 5000;

    std::vector<SwitchSpec> switches;
    WorkloadSpec workload;

    /// Honest running nodes must end on one head and commit every accepted
    /// batch.
    bool expect_agreement = true;
    int64_t genesis_time_s = 1'790'000'000;
};

/// Parses a scenario file (JSON object; unknown keys rejected). Throws
/// ConfigError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct NodeReport
{
    size_t index = 0;
    std::string id;
    Fault fault = Fault::none;
    bool running = true;
    std::string head_id;
    uint64_t height = 0;
    uint64_t messages_sent = 0;
    uint64_t view_changes = 0;
    uint64_t raft_term = 0;
};

struct Report
{
    std::string name;
    uint64_t seed = 0;
    int64_t elapsed_ms = 0;
    std::vector<NodeReport> nodes;
    uint64_t min_honest_height = 0;
    uint64_t max_honest_height = 0;
    std::map<std::string, uint64_t> delivered_by_type;
    uint64_t dropped = 0;
    uint64_t view_changes = 0;
    std::map<uint64_t, std::set<std::string>> leaders_by_term;
    uint64_t fork_switches = 0;
    uint64_t batches_accepted = 0;
    uint64_t batches_committed = 0;
    uint64_t readings_submitted = 0;
    int64_t poet_rounds = 0;
    std::map<std::string, consensus::ZTest> ztests;
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Machine-readable form (canonical record text).
std::string encode_report(const Report& r);
/// Human-readable summary.
std::string format_report(const Report& r);

/// Deterministic in-process network of validators on simulated time.
class Simulation
{
public:
    explicit Simulation(Scenario scenario);
    ~Simulation();

    /// Runs to the end of the scenario and checks the invariants.
    Report run();

    /// Schedules faults and workload and starts every validator. `run` calls
    /// this; callers stepping with `run_until` call it once first.
    void begin();
    /// Advances simulated time.
    void run_until(int64_t t_ms);
    Report report();

    const Scenario& scenario() const noexcept { return scenario_; }
    size_t size() const noexcept { return nodes_.size(); }
    Validator& validator(size_t i);
    const api::Api& api(size_t i) const;
    bool honest(size_t i) const;
    network::SimNetwork& network() noexcept { return net_; }
    const ledger::Block& genesis() const noexcept { return genesis_; }
    const std::set<std::string>& accepted_batches() const noexcept { return accepted_; }
    const registry::Registry& registry() const noexcept { return registry_; }

private:
    struct NodeEnv;
    struct Access;
    struct Sensor;
    struct Slot;

    void schedule_faults();
    void schedule_workload();
    void sensor_tick(size_t s);
    void synthetic_tick();
    void post(size_t node, const ledger::Batch& batch, const std::string& api_key);
    void check_switches();
    void crash_leader();
    bool target_reached() const;
    void check_invariants(Report& r);

    Scenario scenario_;
    network::Scheduler scheduler_;
    network::SimNetwork net_;
    std::mt19937_64 rng_;
    registry::Registry registry_;
    ledger::Block genesis_;
    std::shared_ptr<Adversary> adversary_;
    std::vector<std::unique_ptr<Slot>> nodes_;
    std::vector<std::unique_ptr<Sensor>> sensors_;
    size_t next_switch_ = 0;
    std::set<std::string> accepted_;
    uint64_t readings_submitted_ = 0;
    uint64_t fork_switches_ = 0;
    uint64_t workload_seq_ = 0;
    bool stopped_early_ = false;

    // height -> block id -> committing honest nodes, for final engines
    std::map<uint64_t, std::map<std::string, std::set<std::string>>> final_commits_;
    std::map<std::string, std::vector<std::pair<uint64_t, std::string>>> committed_by_node_;
    std::map<uint64_t, std::set<std::string>> leaders_;
    uint64_t view_changes_ = 0;
    std::vector<std::string> violations_;
};
}  // namespace airchain::node
