// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

// One line per acceptance criterion; the exit status is the number of
// failing criteria. With arguments, only the named criteria run.

#include "common/error.hpp"
#include "consensus/analysis.hpp"
#include "consensus/payload.hpp"
#include "family/executor.hpp"
#include "ingest/emulator.hpp"
#include "ingest/trigger.hpp"
#include "journal/journal.hpp"
#include "network/peering.hpp"
#include "node/simulation.hpp"
#include "support/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ac = airchain;
using ac::node::Simulation;

namespace
{
struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    std::string name;
    double budget_s;  ///< 0 for none
    std::function<Outcome()> run;
};

template <typename... Args>
std::string fmt(const char* f, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<std::string> chain_ids(const ac::node::Validator& v)
{
    const auto& store = v.journal().store();
    std::vector<std::string> ids;
    for (uint64_t h = 0; h <= store.height(); ++h)
        ids.push_back(store.at(h)->block_id);
    return ids;
}

/// Heights where two honest chains hold different blocks.
size_t honest_conflicts(Simulation& sim)
{
    std::map<uint64_t, std::set<std::string>> at;
    for (size_t i = 0; i < sim.size(); ++i)
    {
        if (!sim.honest(i))
            continue;
        const auto ids = chain_ids(sim.validator(i));
        for (size_t h = 0; h < ids.size(); ++h)
            at[h].insert(ids[h]);
    }
    return static_cast<size_t>(std::count_if(at.begin(), at.end(), [](const auto& e) { return e.second.size() > 1; }));
}

// ---------------------------------------------------------------------- pbft

Outcome pbft()
{
    Simulation one{ac::node::parse_scenario(R"({"name":"pbft-one","seed":1,"nodes":4,"algorithm":"pbft",
        "duration_ms":120000,"target_height":50,"faults":[{"node":0,"fault":"equivocate"}],
        "workload":{"batch_interval_ms":200}})")};
    const auto r1 = one.run();
    std::set<std::string> heads;
    uint64_t min_height = UINT64_MAX;
    for (size_t i = 0; i < one.size(); ++i)
    {
        if (!one.honest(i))
            continue;
        heads.insert(one.validator(i).journal().head().block_id);
        min_height = std::min(min_height, one.validator(i).journal().head().header.block_num);
    }
    const bool one_ok = heads.size() == 1 && min_height >= 50 && honest_conflicts(one) == 0 && r1.ok();

    Simulation two{ac::node::parse_scenario(R"({"name":"pbft-two","seed":1,"nodes":4,"algorithm":"pbft",
        "duration_ms":60000,"target_height":50,"faults":[{"node":0,"fault":"equivocate"},{"node":1,"fault":"equivocate"}],
        "workload":{"batch_interval_ms":200}})")};
    const auto r2 = two.run();
    const size_t conflicts = honest_conflicts(two);
    const bool detected = !r2.ok() || conflicts > 0;
    const bool stalled = r2.min_honest_height < 50;

    return {one_ok && (detected || stalled),
        fmt("f=1: honest heads %zu, height %llu, view changes %llu; f=2: %zu harness violations, %zu conflicting "
            "heights, min height %llu",
            heads.size(), static_cast<unsigned long long>(min_height), static_cast<unsigned long long>(r1.view_changes),
            r2.violations.size(), conflicts, static_cast<unsigned long long>(r2.min_honest_height))};
}

// ---------------------------------------------------------------------- raft

Outcome raft()
{
    Simulation sim{ac::node::parse_scenario(R"({"name":"raft","seed":1,"nodes":5,"algorithm":"raft",
        "duration_ms":200000,"crash_leader_every_ms":20000,"crash_downtime_ms":5000,
        "workload":{"batch_interval_ms":250,"stop_before_end_ms":10000}})")};
    sim.begin();
    // Every committed block id ever observed, by height.
    std::map<uint64_t, std::string> committed;
    std::vector<uint64_t> seen_height(sim.size(), 0);
    size_t lost = 0, conflicting = 0;
    for (int64_t t = 500; t <= 200'000; t += 500)
    {
        sim.run_until(t);
        for (size_t i = 0; i < sim.size(); ++i)
        {
            const auto& store = sim.validator(i).journal().store();
            if (store.height() < seen_height[i])
                ++lost;
            seen_height[i] = std::max(seen_height[i], store.height());
            for (uint64_t h = 0; h <= store.height(); ++h)
            {
                const auto [it, fresh] = committed.emplace(h, store.at(h)->block_id);
                if (!fresh && it->second != store.at(h)->block_id)
                    ++conflicting;
            }
        }
    }
    const auto report = sim.report();
    size_t worst_term = 0;
    for (const auto& [term, leaders] : report.leaders_by_term)
        worst_term = std::max(worst_term, leaders.size());

    // Every accepted batch must be on the final chain of every node.
    size_t missing = 0;
    for (size_t i = 0; i < sim.size(); ++i)
    {
        std::set<std::string> on_chain;
        const auto& store = sim.validator(i).journal().store();
        for (uint64_t h = 1; h <= store.height(); ++h)
            for (const auto& b : store.at(h)->batches)
                on_chain.insert(b.id());
        for (const auto& id : sim.accepted_batches())
            missing += !on_chain.contains(id);
    }
    return {worst_term <= 1 && lost == 0 && conflicting == 0 && missing == 0 && report.ok(),
        fmt("%zu terms, max leaders per term %zu, height %llu, lost %zu, conflicting %zu, accepted-but-missing %zu",
            report.leaders_by_term.size(), worst_term, static_cast<unsigned long long>(report.min_honest_height),
            lost, conflicting, missing)};
}

// ---------------------------------------------------------------------- poet

Outcome poet()
{
    constexpr int kRounds = 10'000, kNodes = 10;
    std::mt19937_64 rng{42};
    std::map<std::string, int64_t> wins;
    for (int round = 0; round < kRounds; ++round)
    {
        std::map<std::string, int64_t> waits;
        for (int n = 0; n < kNodes; ++n)
            waits["node" + std::to_string(n)] = ac::consensus::poet_draw_wait(1000, rng);
        ++wins[ac::consensus::poet_elect(waits)];
    }
    const double mean = kRounds / double{kNodes};
    const double sigma = std::sqrt(kRounds * 0.1 * 0.9);
    double worst = 0;
    for (int n = 0; n < kNodes; ++n)
        worst = std::max(worst, std::abs(static_cast<double>(wins["node" + std::to_string(n)]) - mean) / sigma);
    const bool fair = wins.size() == kNodes && worst <= 4;

    Simulation sim{ac::node::parse_scenario(R"({"name":"poet-cheater","seed":5,"nodes":10,"algorithm":"poet_cft",
        "duration_ms":400000,"target_height":200,"faults":[{"node":4,"fault":"cheat_wait"}],
        "workload":{"batch_interval_ms":1000}})")};
    const auto report = sim.run();
    const auto cheater = report.nodes[4].id;
    // Independent count of lottery wins on the first 200 blocks of an
    // honest chain.
    const auto& store = sim.validator(0).journal().store();
    const uint64_t rounds = std::min<uint64_t>(200, store.height());
    int64_t cheater_wins = 0;
    for (uint64_t h = 1; h <= rounds; ++h)
        cheater_wins += store.at(h)->header.signer_public_key == cheater;
    const double p = 1.0 / 10;
    const double z = (cheater_wins - rounds * p) / std::sqrt(rounds * p * (1 - p));
    const auto reported = report.ztests.find(cheater);
    const bool flagged = reported != report.ztests.end() && reported->second.flagged;
    const bool detected = rounds == 200 && z > 2.575 && flagged;

    return {fair && detected,
        fmt("honest: max |wins-1000| = %.2f sigma; cheater: %lld of %llu wins, z = %.3f, flagged by node %s",
            worst, static_cast<long long>(cheater_wins), static_cast<unsigned long long>(rounds), z,
            flagged ? "yes" : "no")};
}

// -------------------------------------------------------------------- state

Outcome state_determinism()
{
    ac::fixture::Rng rng{2026};
    constexpr int64_t kClock = 1'790'000'000;
    std::vector<ac::crypto::KeyPair> keys;
    for (int k = 0; k < 8; ++k)
        keys.push_back(ac::fixture::test_key(100 + static_cast<uint64_t>(k)));

    // Readings draw from a small pool of reporters and places and
    // often share an address.
    std::vector<ac::ledger::Batch> batches;
    std::vector<ac::family::AirReading> readings;
    for (int i = 0; i < 1000; ++i)
    {
        const auto& key = keys[static_cast<size_t>(ac::fixture::uniform(rng, 0, 7))];
        ac::family::AirReading r;
        r.pm1_0 = ac::fixture::uniform(rng, 0, 1000);
        r.pm2_5 = ac::fixture::uniform(rng, 0, 1000);
        r.pm10_0 = ac::fixture::uniform(rng, 0, 1000);
        r.lat_udeg = ac::fixture::uniform(rng, 0, 3) * 10'000'000;
        r.lon_udeg = ac::fixture::uniform(rng, 0, 3) * 10'000'000;
        r.timestamp_s = kClock - 3600 * ac::fixture::uniform(rng, 1, 3) - ac::fixture::uniform(rng, 0, 5);
        r.source_flag = static_cast<ac::family::SourceFlag>(ac::fixture::uniform(rng, 0, 3));
        r.reporter_public_key = key.public_key;
        readings.push_back(r);
        std::mt19937_64 nonce{static_cast<uint64_t>(i) + 1};
        batches.push_back(ac::ingest::make_reading_batch({r}, key, &nonce));
    }

    // Oracle: newest timestamp wins, ties broken by the larger encoding.
    std::map<std::string, ac::Bytes> expected;
    for (const auto& r : readings)
    {
        auto enc = ac::family::encode_reading(r);
        const auto addr = ac::family::reading_address(r);
        const auto it = expected.find(addr);
        if (it == expected.end())
        {
            expected.emplace(addr, std::move(enc));
            continue;
        }
        const auto old = ac::family::decode_reading(it->second);
        if (r.timestamp_s > old.timestamp_s || (r.timestamp_s == old.timestamp_s && enc > it->second))
            it->second = std::move(enc);
    }
    ac::state::MerkleTrie oracle;
    std::string oracle_root = ac::state::empty_root();
    for (const auto& [addr, value] : expected)
        oracle_root = oracle.set(oracle_root, addr, value);

    const ac::family::Executor exec;
    std::set<std::string> roots;
    size_t failures = 0;
    for (int order = 0; order < 20; ++order)
    {
        std::shuffle(batches.begin(), batches.end(), rng);
        ac::state::MerkleTrie trie;
        const auto result = exec.execute_block(trie, ac::state::empty_root(), batches, {kClock});
        failures += !result.ok();
        roots.insert(result.state_root);
    }
    return {failures == 0 && roots.size() == 1 && *roots.begin() == oracle_root,
        fmt("%zu distinct roots over 20 orders, %zu addresses, matches independent fold: %s", roots.size(),
            expected.size(), !roots.empty() && *roots.begin() == oracle_root ? "yes" : "no")};
}

// ------------------------------------------------------------------- crypto

/// True when the mutated bytes cannot stand in for the original header.
template <typename Header, typename Parse, typename Install>
bool mutation_rejected(const Header& original, ac::Bytes bytes, size_t at, uint8_t mask, const ac::ledger::Batch& batch,
    Parse parse, Install install)
{
    bytes[at] ^= mask;
    Header mutated;
    try
    {
        mutated = parse(ac::codec::decode(std::string{bytes.begin(), bytes.end()}));
    }
    catch (const ac::Error&)
    {
        return true;
    }
    catch (const std::exception&)
    {
        return true;
    }
    if (ac::ledger::header_bytes(mutated) != bytes)
        return true;  // not the canonical form, so it is a different message
    (void)original;
    auto copy = batch;
    install(copy, mutated);
    return !ac::ledger::validate_batch(copy).empty();
}

Outcome crypto_round_trips()
{
    const std::string empty_sha512 =
        "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce"
        "47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e";
    const bool digest_ok = ac::crypto::sha512_hex(ac::Bytes{}) == empty_sha512;

    ac::fixture::Rng rng{7};
    std::vector<ac::crypto::KeyPair> keys;
    for (int k = 0; k < 10; ++k)
        keys.push_back(ac::fixture::test_key(200 + static_cast<uint64_t>(k)));

    size_t valid = 0, mutations = 0, accepted_mutations = 0;
    for (int i = 0; i < 1000; ++i)
    {
        const auto& key = keys[static_cast<size_t>(ac::fixture::uniform(rng, 0, 9))];
        std::vector<ac::family::AirReading> rs;
        for (int n = 0, count = static_cast<int>(ac::fixture::uniform(rng, 1, 3)); n < count; ++n)
            rs.push_back(ac::fixture::random_reading(rng, key.public_key));
        std::mt19937_64 nonce{rng()};
        const auto batch = ac::ingest::make_reading_batch(rs, key, &nonce);
        valid += ac::ledger::validate_batch(batch).empty();

        const auto mask = [&] { return static_cast<uint8_t>(ac::fixture::uniform(rng, 1, 255)); };
        // Batch header.
        const auto bh = ac::ledger::header_bytes(batch.header);
        for (size_t at = 0; at < bh.size(); ++at, ++mutations)
        {
            accepted_mutations += !mutation_rejected(batch.header, bh, at, mask(), batch,
                ac::ledger::batch_header_from_record,
                [](ac::ledger::Batch& b, const ac::ledger::BatchHeader& h) { b.header = h; });
        }
        // First transaction header and payload.
        const auto& txn = batch.transactions.front();
        const auto th = ac::ledger::header_bytes(txn.header);
        for (size_t at = 0; at < th.size(); ++at, ++mutations)
        {
            accepted_mutations += !mutation_rejected(txn.header, th, at, mask(), batch,
                ac::ledger::transaction_header_from_record,
                [](ac::ledger::Batch& b, const ac::ledger::TransactionHeader& h) { b.transactions.front().header = h; });
        }
        for (size_t at = 0; at < txn.payload.size(); ++at, ++mutations)
        {
            auto copy = batch;
            copy.transactions.front().payload[at] ^= mask();
            accepted_mutations += ac::ledger::validate_batch(copy).empty();
        }
    }
    return {digest_ok && valid == 1000 && accepted_mutations == 0,
        fmt("%zu/1000 batches valid; %zu single-byte mutations, %zu accepted; SHA-512(\"\") %s", valid, mutations,
            accepted_mutations, digest_ok ? "matches" : "differs")};
}

// ------------------------------------------------------------------ peering

Outcome peering()
{
    size_t converged = 0, worst_rounds = 0, bad_tables = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed)
    {
        ac::fixture::Rng rng{seed};
        const auto n = static_cast<size_t>(ac::fixture::uniform(rng, 3, 20));
        ac::network::Directory d;
        std::set<std::string> reachable;
        for (size_t i = 0; i < n; ++i)
        {
            d.push_back({ac::fixture::random_hex(rng, 66), "10.1.0." + std::to_string(i) + ":5050"});
            reachable.insert(d.back().node_id);
        }
        ac::network::PeeringSimulation sim{d, reachable, 3, 8};
        const auto rounds = sim.run(100);
        if (!rounds)
            continue;
        worst_rounds = std::max(worst_rounds, *rounds);
        // Independent check: each node has at least min peers or has tried
        // every other node; links are symmetric and within max.
        bool ok = true;
        for (const auto& [id, t] : sim.tables())
        {
            bool exhausted = true;
            for (const auto& e : d)
                exhausted &= e.node_id == id || t.peers.contains(e.node_id) || t.attempted.contains(e.node_id);
            ok &= (t.peers.size() >= 3 || exhausted) && t.peers.size() <= 8;
            for (const auto& [peer, _] : t.peers)
                ok &= sim.tables().at(peer).peers.contains(id);
        }
        bad_tables += !ok;
        converged += ok;
    }
    return {converged == 100,
        fmt("%zu/100 seeds peered or exhausted, slowest %zu rounds, %zu inconsistent tables", converged, worst_rounds,
            bad_tables)};
}

// ---------------------------------------------------------------------- e2e

Outcome end_to_end()
{
    Simulation sim{ac::node::parse_scenario(R"({"name":"e2e","seed":3,"nodes":5,"algorithm":"poet_cft",
        "duration_ms":660000,"workload":{"sensors":20,"sample_interval_ms":30000,"stop_before_end_ms":60000}})")};
    const auto report = sim.run();

    std::set<std::string> heads;
    size_t missing = 0;
    for (size_t i = 0; i < sim.size(); ++i)
    {
        heads.insert(sim.validator(i).journal().head().block_id);
        std::set<std::string> on_chain;
        const auto& store = sim.validator(i).journal().store();
        for (uint64_t h = 1; h <= store.height(); ++h)
            for (const auto& b : store.at(h)->batches)
                on_chain.insert(b.id());
        for (const auto& id : sim.accepted_batches())
            missing += !on_chain.contains(id);
    }

    // Last-writer-wins fold over the committed chain of node 0.
    std::map<std::string, ac::family::AirReading> fold;
    size_t committed_readings = 0;
    const auto& store = sim.validator(0).journal().store();
    for (uint64_t h = 1; h <= store.height(); ++h)
    {
        for (const auto& b : store.at(h)->batches)
        {
            for (const auto& t : b.transactions)
            {
                if (t.header.family_name != ac::family::kAirQualityFamily)
                    continue;
                ++committed_readings;
                const auto r = ac::family::decode_reading(t.payload);
                const auto addr = ac::family::reading_address(r);
                const auto it = fold.find(addr);
                if (it == fold.end() || r.timestamp_s > it->second.timestamp_s ||
                    (r.timestamp_s == it->second.timestamp_s &&
                        ac::family::encode_reading(r) > ac::family::encode_reading(it->second)))
                    fold[addr] = r;
            }
        }
    }

    size_t api_mismatch = 0;
    size_t flags_checked = 0;
    for (size_t i = 0; i < sim.size(); ++i)
    {
        const auto res = sim.api(i).handle({"GET", "/readings", {}, {}, {}});
        const auto body = ac::codec::decode(res.body);
        std::map<std::string, ac::family::AirReading> served;
        for (auto rec : body["readings"])
        {
            const auto addr = rec["address"].get<std::string>();
            const auto flag = rec["source_flag"].get<std::string>();
            rec.erase("address");
            const auto r = ac::family::reading_from_record(rec);
            flags_checked += flag == ac::family::to_string(r.source_flag);
            served.emplace(addr, r);
        }
        api_mismatch += res.status != 200 || served != fold;
    }
    const bool ok = heads.size() == 1 && missing == 0 && api_mismatch == 0 && !fold.empty() &&
                    !sim.accepted_batches().empty() && report.ok();
    return {ok, fmt("%zu accepted batches, %zu committed readings, %zu addresses, %zu distinct heads, "
                    "%zu missing, %zu nodes disagreeing with the fold, %zu flags checked",
                    sim.accepted_batches().size(), committed_readings, fold.size(), heads.size(), missing,
                    api_mismatch, flags_checked)};
}

// ---------------------------------------------------------------- constants

Outcome constants()
{
    std::mt19937_64 rng{2022};
    const ac::ingest::SensorNoiseModel model;
    double sum_sq = 0;
    constexpr int kDraws = 100'000;
    for (int i = 0; i < kDraws; ++i)
    {
        const double e = static_cast<double>(ac::ingest::emulate_sensor(100, model, rng) - 100);
        sum_sq += e * e;
    }
    const double rmse = std::sqrt(sum_sq / kDraws);
    const double sybil = ac::consensus::sybil_threshold(100);
    const auto faults = ac::consensus::max_faults(4);
    return {rmse >= 2.0 && rmse <= 2.45 && std::abs(sybil - 0.3316) <= 0.0001 && faults == 1,
        fmt("emulator RMSE %.4f, sybil_threshold(100) %.5f, max_faults(4) %lld", rmse, sybil,
            static_cast<long long>(faults))};
}

// ------------------------------------------------------------------ dynamic

Outcome dynamic_consensus()
{
    Simulation sim{ac::node::parse_scenario(R"({"name":"dynamic","seed":2,"nodes":4,"algorithm":"poet_cft",
        "duration_ms":120000,"switches":[{"at_height":10,"algorithm":"pbft"},{"at_height":30,"algorithm":"raft"}],
        "workload":{"batch_interval_ms":500,"stop_before_end_ms":20000}})")};
    const auto report = sim.run();

    const auto& store = sim.validator(0).journal().store();
    ac::journal::Journal replay;
    replay.initialize(sim.genesis());
    std::vector<std::string> engines;
    std::vector<uint64_t> switch_heights;
    size_t failures = 0;
    for (uint64_t h = 1; h <= store.height(); ++h)
    {
        const auto& block = *store.at(h);
        const auto engine = std::string{
            ac::consensus::to_string(replay.engine_after(block.header.previous_block_id).algorithm)};
        if (ac::consensus::decode_payload(block.header.consensus_payload).engine != engine)
            ++failures;
        if (engines.empty() || engines.back() != engine)
        {
            engines.push_back(engine);
            switch_heights.push_back(h);
        }
        const auto result = replay.commit(block);
        failures += !result.violations.empty() || replay.head().block_id != block.block_id;
    }
    std::string sequence;
    for (size_t i = 0; i < engines.size(); ++i)
        sequence += (i ? " -> " : "") + engines[i] + "@" + std::to_string(switch_heights[i]);
    const bool ok = failures == 0 && engines == std::vector<std::string>{"poet_cft", "pbft", "raft"} &&
                    replay.head().header.state_root_hash == store.head().header.state_root_hash && report.ok();
    return {ok, fmt("replayed %llu blocks, %zu failures, engines %s", static_cast<unsigned long long>(store.height()),
                    failures, sequence.c_str())};
}
}  // namespace

int main(int argc, char** argv)
{
    const std::set<std::string> only(argv + 1, argv + argc);
    const std::vector<Criterion> criteria = {
        {"pbft_safety_liveness", 60, pbft},
        {"raft_leader_crashes", 30, raft},
        {"poet_fairness_detection", 30, poet},
        {"state_determinism", 0, state_determinism},
        {"crypto_round_trips", 0, crypto_round_trips},
        {"peering", 0, peering},
        {"end_to_end", 120, end_to_end},
        {"constants", 0, constants},
        {"dynamic_consensus", 0, dynamic_consensus},
    };
    int failed = 0;
    for (const auto& c : criteria)
    {
        if (!only.empty() && !only.contains(c.name))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string{"exception: "} + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s == 0 || s < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s  %-28s %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), s,
            c.budget_s > 0 ? fmt(", budget %.0f s", c.budget_s).c_str() : "");
        std::fflush(stdout);
    }
    if (!only.empty() && only.size() != static_cast<size_t>(std::count_if(criteria.begin(), criteria.end(),
                                              [&](const Criterion& c) { return only.contains(c.name); })))
    {
        std::fprintf(stderr, "unknown criterion name\n");
        return 2;
    }
    return failed;
}
