// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "node/simulation.hpp"
#include "common/error.hpp"
#include "consensus/payload.hpp"
#include "family/settings.hpp"
#include "journal/genesis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace airchain::node
{
namespace
{
constexpr int64_t kTickMs = 100;

crypto::KeyPair derived_key(uint64_t seed, std::string_view role, size_t index)
{
    const auto material = crypto::sha256(
        as_bytes("airchain-sim/" + std::to_string(seed) + "/" + std::string{role} + "/" + std::to_string(index)));
    return crypto::keypair_generate(ByteView{material});
}

std::string short_id(const std::string& id)
{
    return id.substr(0, 10);
}

std::string engine_of(const ledger::Block& b)
{
    try
    {
        return consensus::decode_payload(b.header.consensus_payload).engine;
    }
    catch (const CodecError&)
    {
        return {};
    }
}

bool is_final_engine(const std::string& engine)
{
    return engine == consensus::to_string(consensus::Algorithm::pbft) ||
           engine == consensus::to_string(consensus::Algorithm::raft);
}

std::string format_z(double z)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", z);
    return buf;
}

// ------------------------------------------------------------ scenario file

using Json = nlohmann::json;

void only_keys(const Json& j, std::initializer_list<std::string_view> keys, std::string_view where)
{
    if (!j.is_object())
        throw ConfigError{"scenario: " + std::string{where} + " must be an object"};
    for (const auto& [k, _] : j.items())
    {
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ConfigError{"scenario: unknown key " + std::string{where} + "." + k};
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
        throw ConfigError{std::string{"scenario: bad value for "} + key};
    }
}

consensus::Algorithm read_algorithm(const Json& j, const char* key)
{
    std::string name;
    read(j, key, name);
    const auto a = consensus::parse_algorithm(name);
    if (!a)
        throw ConfigError{"scenario: unknown algorithm " + name};
    return *a;
}
}  // namespace

Scenario parse_scenario(const std::string& text)
{
    Json j;
    try
    {
        j = Json::parse(text, nullptr, true, true);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ConfigError{std::string{"scenario: "} + e.what()};
    }
    only_keys(j,
        {"name", "seed", "nodes", "algorithm", "duration_ms", "target_height", "latency_min_ms", "latency_max_ms",
            "drop_rate", "min_connectivity", "max_connectivity", "poet_mean_wait_ms", "pbft_timeout_ms", "faults",
            "crashes", "crash_leader_every_ms", "crash_downtime_ms", "switches", "workload", "expect_agreement",
            "genesis_time_s"},
        "scenario");
    Scenario s;
    read(j, "name", s.name);
    read(j, "seed", s.seed);
    read(j, "nodes", s.nodes);
    if (j.contains("algorithm"))
        s.algorithm = read_algorithm(j, "algorithm");
    read(j, "duration_ms", s.duration_ms);
    if (j.contains("target_height"))
    {
        uint64_t t = 0;
        read(j, "target_height", t);
        s.target_height = t;
    }
    read(j, "latency_min_ms", s.latency_min_ms);
    read(j, "latency_max_ms", s.latency_max_ms);
    read(j, "drop_rate", s.drop_rate);
    read(j, "min_connectivity", s.min_connectivity);
    read(j, "max_connectivity", s.max_connectivity);
    read(j, "poet_mean_wait_ms", s.poet_mean_wait_ms);
    read(j, "pbft_timeout_ms", s.pbft_timeout_ms);
    read(j, "crash_leader_every_ms", s.crash_leader_every_ms);
    read(j, "crash_downtime_ms", s.crash_downtime_ms);
    read(j, "expect_agreement", s.expect_agreement);
    read(j, "genesis_time_s", s.genesis_time_s);

    for (const auto& f : j.value("faults", Json::array()))
    {
        only_keys(f, {"node", "fault"}, "faults[]");
        FaultSpec spec;
        read(f, "node", spec.node);
        std::string name;
        read(f, "fault", name);
        const auto fault = parse_fault(name);
        if (!fault)
            throw ConfigError{"scenario: unknown fault " + name};
        spec.fault = *fault;
        s.faults.push_back(spec);
    }
    for (const auto& c : j.value("crashes", Json::array()))
    {
        only_keys(c, {"node", "at_ms", "restart_at_ms"}, "crashes[]");
        CrashSpec spec;
        read(c, "node", spec.node);
        read(c, "at_ms", spec.at_ms);
        if (c.contains("restart_at_ms"))
        {
            int64_t t = 0;
            read(c, "restart_at_ms", t);
            spec.restart_at_ms = t;
        }
        s.crashes.push_back(spec);
    }
    for (const auto& w : j.value("switches", Json::array()))
    {
        only_keys(w, {"at_height", "algorithm"}, "switches[]");
        SwitchSpec spec;
        read(w, "at_height", spec.at_height);
        spec.algorithm = read_algorithm(w, "algorithm");
        s.switches.push_back(spec);
    }
    if (j.contains("workload"))
    {
        const auto& w = j["workload"];
        only_keys(w,
            {"sensors", "sample_interval_ms", "count_threshold", "age_threshold_s", "batch_interval_ms",
                "stop_before_end_ms"},
            "workload");
        read(w, "sensors", s.workload.sensors);
        read(w, "sample_interval_ms", s.workload.sample_interval_ms);
        read(w, "count_threshold", s.workload.trigger.count_threshold);
        read(w, "age_threshold_s", s.workload.trigger.age_threshold_s);
        read(w, "batch_interval_ms", s.workload.batch_interval_ms);
        read(w, "stop_before_end_ms", s.workload.stop_before_end_ms);
    }

    if (s.nodes < 1)
        throw ConfigError{"scenario: nodes must be at least 1"};
    if (s.duration_ms <= 0)
        throw ConfigError{"scenario: duration_ms must be positive"};
    if (s.latency_min_ms < 0 || s.latency_max_ms < s.latency_min_ms)
        throw ConfigError{"scenario: latency range is empty"};
    if (s.poet_mean_wait_ms <= 0 || s.pbft_timeout_ms <= 0)
        throw ConfigError{"scenario: engine timings must be positive"};
    if (s.workload.sensors > 0 && s.workload.sample_interval_ms <= 0)
        throw ConfigError{"scenario: sample_interval_ms must be positive"};
    ingest::check(s.workload.trigger);
    for (const auto& f : s.faults)
    {
        if (f.node >= s.nodes)
            throw ConfigError{"scenario: fault names node " + std::to_string(f.node)};
    }
    for (const auto& c : s.crashes)
    {
        if (c.node >= s.nodes)
            throw ConfigError{"scenario: crash names node " + std::to_string(c.node)};
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in{path};
    if (!in)
        throw ConfigError{"scenario: cannot read " + path.string()};
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

// ------------------------------------------------------------------ report

std::string encode_report(const Report& r)
{
    auto nodes = codec::Record::array();
    for (const auto& n : r.nodes)
    {
        nodes.push_back({{"index", n.index}, {"id", n.id}, {"fault", std::string{to_string(n.fault)}},
            {"running", n.running ? 1 : 0}, {"head_id", n.head_id}, {"height", n.height},
            {"messages_sent", n.messages_sent}, {"view_changes", n.view_changes}, {"raft_term", n.raft_term}});
    }
    auto leaders = codec::Record::object();
    for (const auto& [term, ids] : r.leaders_by_term)
        leaders[std::to_string(term)] = std::vector<std::string>(ids.begin(), ids.end());
    auto ztests = codec::Record::object();
    for (const auto& [id, z] : r.ztests)
        ztests[id] = {{"z_score", format_z(z.z)}, {"flagged", z.flagged ? 1 : 0}};
    auto delivered = codec::Record::object();
    for (const auto& [type, count] : r.delivered_by_type)
        delivered[type] = count;
    return codec::encode({
        {"name", r.name},
        {"seed", r.seed},
        {"elapsed_ms", r.elapsed_ms},
        {"nodes", std::move(nodes)},
        {"min_honest_height", r.min_honest_height},
        {"max_honest_height", r.max_honest_height},
        {"delivered_by_type", std::move(delivered)},
        {"dropped", r.dropped},
        {"view_changes", r.view_changes},
        {"leaders_by_term", std::move(leaders)},
        {"fork_switches", r.fork_switches},
        {"batches_accepted", r.batches_accepted},
        {"batches_committed", r.batches_committed},
        {"readings_submitted", r.readings_submitted},
        {"poet_rounds", r.poet_rounds},
        {"ztests", std::move(ztests)},
        {"violations", r.violations},
        {"ok", r.ok() ? 1 : 0},
    });
}

std::string format_report(const Report& r)
{
    std::ostringstream out;
    out << "scenario " << r.name << " seed " << r.seed << ": " << (r.ok() ? "ok" : "VIOLATIONS") << "\n";
    out << "  simulated time " << r.elapsed_ms << " ms, honest heights " << r.min_honest_height << ".."
        << r.max_honest_height << ", fork switches " << r.fork_switches << ", view changes " << r.view_changes
        << "\n";
    out << "  batches accepted " << r.batches_accepted << ", committed " << r.batches_committed << ", readings "
        << r.readings_submitted << "\n";
    uint64_t delivered = 0;
    for (const auto& [_, c] : r.delivered_by_type)
        delivered += c;
    out << "  messages delivered " << delivered << ", dropped " << r.dropped << "\n";
    for (const auto& n : r.nodes)
    {
        out << "  node " << n.index << " " << short_id(n.id) << (n.fault != Fault::none ? " [" : "")
            << (n.fault != Fault::none ? std::string{to_string(n.fault)} + "]" : "") << (n.running ? "" : " (down)")
            << " height " << n.height << " head " << short_id(n.head_id) << " sent " << n.messages_sent << "\n";
    }
    if (!r.leaders_by_term.empty())
        out << "  raft terms with a leader: " << r.leaders_by_term.size() << "\n";
    for (const auto& [id, z] : r.ztests)
    {
        if (z.flagged)
            out << "  z-test flags " << short_id(id) << " z=" << format_z(z.z) << "\n";
    }
    for (const auto& v : r.violations)
        out << "  violation: " << v << "\n";
    return out.str();
}

// -------------------------------------------------------------- simulation

struct Simulation::NodeEnv final : Environment
{
    Simulation& sim;
    std::string id;

    NodeEnv(Simulation& s, std::string node_id) : sim{s}, id{std::move(node_id)} {}
    int64_t now_ms() const override { return sim.scheduler_.now_ms(); }
    int64_t clock_s() const override { return sim.scenario_.genesis_time_s + sim.scheduler_.now_ms() / 1000; }
    void send(const std::string& to, network::MessagePtr message) override { sim.net_.send(id, to, std::move(message)); }
    uint64_t schedule(int64_t delay_ms, std::function<void()> fn) override
    {
        return sim.scheduler_.schedule(delay_ms, std::move(fn));
    }
    void cancel(uint64_t timer) override { sim.scheduler_.cancel(timer); }
};

struct Simulation::Access final : api::NodeAccess
{
    Validator* validator = nullptr;
    void read(const std::function<void(const Validator&)>& fn) const override { fn(*validator); }
    journal::SubmitResult submit(const ledger::Batch& batch) override { return validator->submit(batch); }
};

struct Simulation::Sensor
{
    ingest::EmulatedDevice device;
    ingest::ReadingBuffer buffer;
    std::string api_key;
    size_t home = 0;
    int64_t base_pm25 = 0;
    uint64_t ticks = 0;
};

struct Simulation::Slot
{
    crypto::KeyPair key;
    Fault fault = Fault::none;
    std::unique_ptr<NodeEnv> env;
    std::unique_ptr<Validator> validator;
    Access access;
    std::unique_ptr<api::Api> api;
};

Simulation::Simulation(Scenario scenario)
  : scenario_{std::move(scenario)},
    net_{scheduler_, network::SimTransportConfig{scenario_.latency_min_ms, scenario_.latency_max_ms,
                         scenario_.drop_rate, {}, scenario_.seed}},
    rng_{scenario_.seed ^ 0x5eed5eed5eedULL},
    adversary_{std::make_shared<Adversary>()}
{
    std::vector<crypto::KeyPair> keys;
    network::Directory directory;
    for (size_t i = 0; i < scenario_.nodes; ++i)
    {
        keys.push_back(derived_key(scenario_.seed, "node", i));
        directory.push_back({keys.back().public_key, "sim:" + std::to_string(i)});
    }
    std::vector<std::string> members;
    for (const auto& k : keys)
        members.push_back(k.public_key);
    genesis_ = journal::make_genesis({scenario_.algorithm, members}, keys.front());

    std::map<size_t, Fault> faults;
    for (const auto& f : scenario_.faults)
    {
        faults[f.node] = f.fault;
        if (f.fault == Fault::equivocate)
            adversary_->coalition.insert(keys[f.node].public_key);
    }

    Observer observer;
    observer.on_commit = [this](const std::string& node, const ledger::Block& block) {
        const auto i = std::find_if(nodes_.begin(), nodes_.end(), [&](const auto& s) { return s->key.public_key == node; }) -
                       nodes_.begin();
        if (!honest(static_cast<size_t>(i)) || !is_final_engine(engine_of(block)))
            return;
        final_commits_[block.header.block_num][block.block_id].insert(node);
        committed_by_node_[node].emplace_back(block.header.block_num, block.block_id);
    };
    observer.on_fork_switch = [this](const std::string& node, const std::vector<ledger::Block>& abandoned) {
        ++fork_switches_;
        for (const auto& b : abandoned)
        {
            if (is_final_engine(engine_of(b)))
            {
                violations_.push_back("node " + short_id(node) + " abandoned final block " +
                                      std::to_string(b.header.block_num) + " " + short_id(b.block_id));
            }
        }
    };
    observer.on_leader = [this](const std::string& node, uint64_t term) { leaders_[term].insert(node); };
    observer.on_view_change = [this](const std::string&, uint64_t) { ++view_changes_; };
    observer.on_violation = [this](const std::string& node, const std::string& what) {
        const auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const auto& s) { return s->key.public_key == node; });
        if (it != nodes_.end() && honest(static_cast<size_t>(it - nodes_.begin())))
            violations_.push_back("node " + short_id(node) + ": " + what);
    };

    for (size_t i = 0; i < scenario_.nodes; ++i)
    {
        auto slot = std::make_unique<Slot>();
        slot->key = keys[i];
        slot->fault = faults.contains(i) ? faults[i] : Fault::none;
        slot->env = std::make_unique<NodeEnv>(*this, keys[i].public_key);

        ValidatorConfig config;
        config.key = keys[i];
        config.genesis = genesis_;
        config.directory = directory;
        config.min_connectivity = std::min(scenario_.min_connectivity, scenario_.nodes - 1);
        config.max_connectivity = scenario_.max_connectivity;
        config.poet_mean_wait_ms = scenario_.poet_mean_wait_ms;
        config.pbft_timeout_ms = scenario_.pbft_timeout_ms;
        config.seed = scenario_.seed * 1'000'003 + i;
        config.fault = slot->fault;
        if (slot->fault == Fault::equivocate)
            config.adversary = adversary_;
        slot->validator = std::make_unique<Validator>(std::move(config), *slot->env, observer);
        slot->access.validator = slot->validator.get();
        slot->api = std::make_unique<api::Api>(slot->access, registry_, api::ApiConfig{},
            [this] { return scenario_.genesis_time_s + scheduler_.now_ms() / 1000; });

        Validator* v = slot->validator.get();
        net_.attach(keys[i].public_key, [v](const std::string& from, const network::MessagePtr& m) { v->receive(from, m); });
        nodes_.push_back(std::move(slot));
    }

    for (size_t s = 0; s < scenario_.workload.sensors; ++s)
    {
        ingest::DeviceConfig dc;
        dc.key = derived_key(scenario_.seed, "sensor", s);
        dc.lat_udeg = 37'000'000 + static_cast<int64_t>(s) * 61'000;
        dc.lon_udeg = -122'000'000 + static_cast<int64_t>(s % 5) * 73'000;
        dc.source_flag = static_cast<family::SourceFlag>(s % 4);
        dc.seed = scenario_.seed * 7919 + s;
        auto sensor = std::make_unique<Sensor>(Sensor{ingest::EmulatedDevice{dc},
            ingest::ReadingBuffer{scenario_.workload.trigger}, {}, s % scenario_.nodes,
            static_cast<int64_t>(5 + (rng_() % 80)), 0});
        sensor->api_key = registry_.issue_key(dc.key.public_key.substr(2, 40), scenario_.genesis_time_s);
        sensors_.push_back(std::move(sensor));
    }
}

Simulation::~Simulation() = default;

Validator& Simulation::validator(size_t i)
{
    return *nodes_.at(i)->validator;
}

const api::Api& Simulation::api(size_t i) const
{
    return *nodes_.at(i)->api;
}

bool Simulation::honest(size_t i) const
{
    return i < nodes_.size() && nodes_[i]->fault == Fault::none;
}

void Simulation::schedule_faults()
{
    for (const auto& c : scenario_.crashes)
    {
        scheduler_.schedule(c.at_ms, [this, i = c.node] {
            nodes_[i]->validator->crash();
            net_.set_down(nodes_[i]->key.public_key, true);
        });
        if (c.restart_at_ms)
        {
            scheduler_.schedule(*c.restart_at_ms, [this, i = c.node] {
                net_.set_down(nodes_[i]->key.public_key, false);
                nodes_[i]->validator->restart();
            });
        }
    }
    if (scenario_.crash_leader_every_ms > 0)
    {
        for (int64_t t = scenario_.crash_leader_every_ms; t < scenario_.duration_ms; t += scenario_.crash_leader_every_ms)
            scheduler_.schedule(t, [this] { crash_leader(); });
    }
}

void Simulation::crash_leader()
{
    std::optional<size_t> leader;
    uint64_t best = 0;
    for (size_t i = 0; i < nodes_.size(); ++i)
    {
        const auto& v = *nodes_[i]->validator;
        if (!v.running())
            continue;
        const auto s = v.status();
        if (s.raft_role == "leader" && s.raft_term >= best)
        {
            best = s.raft_term;
            leader = i;
        }
    }
    if (!leader)
        return;
    const size_t i = *leader;
    nodes_[i]->validator->crash();
    net_.set_down(nodes_[i]->key.public_key, true);
    scheduler_.schedule(scenario_.crash_downtime_ms, [this, i] {
        net_.set_down(nodes_[i]->key.public_key, false);
        nodes_[i]->validator->restart();
    });
}

void Simulation::schedule_workload()
{
    const int64_t stop_at = scenario_.duration_ms - scenario_.workload.stop_before_end_ms;
    for (size_t s = 0; s < sensors_.size(); ++s)
    {
        // First sample at a random offset within the interval.
        const int64_t offset = static_cast<int64_t>(rng_() % static_cast<uint64_t>(scenario_.workload.sample_interval_ms));
        for (int64_t t = offset; t < stop_at; t += scenario_.workload.sample_interval_ms)
            scheduler_.schedule(t, [this, s] { sensor_tick(s); });
    }
    if (scenario_.workload.batch_interval_ms > 0)
    {
        for (int64_t t = scenario_.workload.batch_interval_ms; t < stop_at; t += scenario_.workload.batch_interval_ms)
            scheduler_.schedule(t, [this] { synthetic_tick(); });
    }
    if (!scenario_.switches.empty())
    {
        for (int64_t t = kTickMs; t < scenario_.duration_ms; t += kTickMs)
            scheduler_.schedule(t, [this] { check_switches(); });
    }
}

void Simulation::sensor_tick(size_t s)
{
    auto& sensor = *sensors_[s];
    const int64_t now_s = scenario_.genesis_time_s + scheduler_.now_ms() / 1000;
    const int64_t pm25 = sensor.base_pm25 + static_cast<int64_t>(sensor.ticks % 7);
    ++sensor.ticks;
    const ingest::Ambient ambient{pm25 * 7 / 10, pm25, pm25 * 13 / 10, 20, 50};
    if (auto r = sensor.device.read(ambient, now_s))
    {
        sensor.buffer.add(std::move(*r), now_s);
        ++readings_submitted_;
    }
    if (sensor.buffer.decide(now_s) != ingest::TriggerDecision::flush)
        return;
    const auto batch = ingest::make_reading_batch(sensor.buffer.take(), sensor.device.config().key, &rng_);
    post(sensor.home, batch, sensor.api_key);
}

void Simulation::synthetic_tick()
{
    static const std::string kAccount = "10ad";
    if (!registry_.account(kAccount))
        registry_.issue_key(kAccount, scenario_.genesis_time_s);
    const auto api_key = registry_.account(kAccount)->api_keys.front().key;
    const auto reporter = derived_key(scenario_.seed, "load", workload_seq_ % 8);
    family::AirReading r;
    r.pm1_0 = static_cast<int64_t>(rng_() % 200);
    r.pm2_5 = static_cast<int64_t>(rng_() % 300);
    r.pm10_0 = static_cast<int64_t>(rng_() % 400);
    r.lat_udeg = static_cast<int64_t>(rng_() % 180'000'001) - 90'000'000;
    r.lon_udeg = static_cast<int64_t>(rng_() % 360'000'001) - 180'000'000;
    r.timestamp_s = scenario_.genesis_time_s + scheduler_.now_ms() / 1000;
    r.source_flag = static_cast<family::SourceFlag>(workload_seq_ % 4);
    r.reporter_public_key = reporter.public_key;
    ++readings_submitted_;
    const auto batch = ingest::make_reading_batch({r}, reporter, &rng_);
    post(workload_seq_++ % nodes_.size(), batch, api_key);
}

void Simulation::post(size_t node, const ledger::Batch& batch, const std::string& api_key)
{
    // The client fails over to the next reachable honest node.
    for (size_t k = 0; k < nodes_.size(); ++k)
    {
        const size_t i = (node + k) % nodes_.size();
        if (!nodes_[i]->validator->running() || !honest(i))
            continue;
        api::Request req{"POST", "/batches", {}, {{std::string{api::kApiKeyHeader}, api_key}},
            api::encode_batch_list({batch})};
        const auto res = nodes_[i]->api->handle(req);
        if (res.status == 202)
            accepted_.insert(batch.id());
        return;
    }
}

void Simulation::check_switches()
{
    if (next_switch_ >= scenario_.switches.size())
        return;
    const auto& sw = scenario_.switches[next_switch_];
    std::optional<size_t> target;
    for (size_t i = 0; i < nodes_.size(); ++i)
    {
        const auto& v = *nodes_[i]->validator;
        if (!honest(i) || !v.running())
            continue;
        if (v.journal().head().header.block_num < sw.at_height)
            return;
        if (!target)
            target = i;
    }
    if (!target)
        return;
    const auto& key = nodes_[*target]->key;
    Bytes nonce(16);
    for (auto& b : nonce)
        b = static_cast<uint8_t>(rng_());
    auto txn = family::make_setting_transaction(
        family::kConsensusAlgorithmKey, consensus::to_string(sw.algorithm), key, to_hex(nonce));
    const auto batch = ledger::build_batch({std::move(txn)}, key);
    if (nodes_[*target]->validator->submit(batch).status == journal::SubmitStatus::routed)
    {
        accepted_.insert(batch.id());
        ++next_switch_;
    }
}

bool Simulation::target_reached() const
{
    if (!scenario_.target_height)
        return false;
    for (size_t i = 0; i < nodes_.size(); ++i)
    {
        const auto& v = *nodes_[i]->validator;
        if (honest(i) && v.running() && v.journal().head().header.block_num < *scenario_.target_height)
            return false;
    }
    return true;
}

void Simulation::run_until(int64_t t_ms)
{
    scheduler_.run_until(t_ms);
}

void Simulation::begin()
{
    schedule_faults();
    schedule_workload();
    for (auto& slot : nodes_)
        slot->validator->start();
}

Report Simulation::run()
{
    begin();
    for (int64_t t = kTickMs; t <= scenario_.duration_ms; t += kTickMs)
    {
        scheduler_.run_until(t);
        if (target_reached())
        {
            stopped_early_ = t < scenario_.duration_ms;
            break;
        }
    }
    return report();
}

Report Simulation::report()
{
    Report r;
    r.name = scenario_.name;
    r.seed = scenario_.seed;
    r.elapsed_ms = scheduler_.now_ms();
    bool first = true;
    for (size_t i = 0; i < nodes_.size(); ++i)
    {
        const auto& slot = *nodes_[i];
        const auto& v = *slot.validator;
        const auto s = v.status();
        r.nodes.push_back({i, slot.key.public_key, slot.fault, v.running(), s.head_id, s.head_num, v.messages_sent(),
            s.view_changes, s.raft_term});
        if (!honest(i))
            continue;
        r.min_honest_height = first ? s.head_num : std::min(r.min_honest_height, s.head_num);
        r.max_honest_height = std::max(r.max_honest_height, s.head_num);
        if (first)
        {
            r.poet_rounds = s.poet_rounds;
            r.ztests = s.ztests;
        }
        first = false;
    }
    r.delivered_by_type = net_.delivered_by_type();
    r.dropped = net_.dropped();
    r.view_changes = view_changes_;
    r.leaders_by_term = leaders_;
    r.fork_switches = fork_switches_;
    r.batches_accepted = accepted_.size();
    r.readings_submitted = readings_submitted_;
    check_invariants(r);
    return r;
}

void Simulation::check_invariants(Report& r)
{
    r.violations = violations_;
    for (const auto& [height, ids] : final_commits_)
    {
        if (ids.size() > 1)
        {
            r.violations.push_back("safety: honest nodes committed " + std::to_string(ids.size()) +
                                   " different blocks at height " + std::to_string(height));
        }
    }
    for (const auto& [term, ids] : leaders_)
    {
        if (ids.size() > 1)
            r.violations.push_back("election safety: " + std::to_string(ids.size()) + " leaders in term " + std::to_string(term));
    }

    std::map<std::string, size_t> distinct_chains;
    for (size_t i = 0; i < nodes_.size(); ++i)
    {
        if (!honest(i))
            continue;
        const auto& v = *nodes_[i]->validator;
        const auto& store = v.journal().store();
        const auto it = committed_by_node_.find(v.id());
        if (it != committed_by_node_.end())
        {
            for (const auto& [height, id] : it->second)
            {
                if (height > store.height() || store.at(height)->block_id != id)
                {
                    r.violations.push_back("node " + short_id(v.id()) + " lost committed block at height " +
                                           std::to_string(height));
                    break;
                }
            }
        }
        distinct_chains.emplace(store.head().block_id, i);
    }

    // Every distinct honest chain must replay from genesis and commit each
    // batch at most once.
    for (const auto& [head, i] : distinct_chains)
    {
        const auto& store = nodes_[i]->validator->journal().store();
        journal::Journal replay;
        replay.initialize(genesis_);
        std::set<std::string> batches;
        for (uint64_t h = 1; h <= store.height(); ++h)
        {
            const auto& block = *store.at(h);
            for (const auto& id : block.header.batch_ids)
            {
                if (!batches.insert(id).second)
                    r.violations.push_back("batch " + short_id(id) + " committed twice on chain " + short_id(head));
            }
            const auto res = replay.commit(block);
            if (res.status != journal::ConsiderStatus::extended)
            {
                r.violations.push_back("chain " + short_id(head) + " fails replay at height " + std::to_string(h) +
                                       ": " + (res.violations.empty() ? "" : res.violations.front()));
                break;
            }
        }
    }

    std::optional<size_t> reference;
    std::set<std::string> heads;
    for (size_t i = 0; i < nodes_.size(); ++i)
    {
        const auto& v = *nodes_[i]->validator;
        if (!honest(i) || !v.running())
            continue;
        heads.insert(v.journal().head().block_id);
        if (!reference)
            reference = i;
    }
    if (reference)
    {
        const auto& store = nodes_[*reference]->validator->journal().store();
        uint64_t committed = 0;
        for (const auto& id : accepted_)
            committed += store.batch_height(id).has_value() ? 1 : 0;
        r.batches_committed = committed;
        if (scenario_.expect_agreement)
        {
            if (heads.size() > 1)
                r.violations.push_back("honest nodes hold " + std::to_string(heads.size()) + " different heads");
            if (committed < accepted_.size() && !stopped_early_)
            {
                r.violations.push_back(std::to_string(accepted_.size() - committed) + " of " +
                                       std::to_string(accepted_.size()) + " accepted batches never committed");
            }
        }
    }
    if (scenario_.target_height && r.min_honest_height < *scenario_.target_height)
    {
        r.violations.push_back("no progress: lowest honest height " + std::to_string(r.min_honest_height) +
                               " below target " + std::to_string(*scenario_.target_height));
    }
}
}  // namespace airchain::node
