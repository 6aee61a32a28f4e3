// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "journal/journal.hpp"
#include "common/error.hpp"
#include "family/settings.hpp"

#include <algorithm>

namespace airchain::journal
{
namespace
{
std::string short_id(const std::string& id)
{
    return id.substr(0, 16);
}

std::shared_ptr<state::NodeStore> open_nodes(
    const JournalConfig& config, std::shared_ptr<state::NodeStore> nodes)
{
    if (nodes)
        return nodes;
    if (config.data_dir)
    {
        std::filesystem::create_directories(*config.data_dir);
        return std::make_shared<state::NodeStore>(*config.data_dir / "state.nodes");
    }
    return std::make_shared<state::NodeStore>();
}

BlockStore open_store(const JournalConfig& config)
{
    if (config.data_dir)
        return BlockStore{*config.data_dir / "chain"};
    return BlockStore{};
}
}  // namespace

EngineSettings read_engine_settings(const state::MerkleTrie& trie, const std::string& state_root)
{
    EngineSettings s;
    if (const auto algo = family::read_setting(trie, state_root, family::kConsensusAlgorithmKey))
    {
        if (const auto parsed = consensus::parse_algorithm(*algo))
            s.algorithm = *parsed;
    }
    if (const auto members = family::read_setting(trie, state_root, family::kConsensusMembersKey))
        s.members = family::split_members(*members);
    return s;
}

const ledger::BlockHeader& resolve_fork(const ledger::BlockHeader& a, const ledger::BlockHeader& b)
{
    if (a.block_num != b.block_num)
        return a.block_num > b.block_num ? a : b;
    if (const int pref = consensus::compare_preference(a, b); pref != 0)
        return pref < 0 ? a : b;
    return ledger::block_id(a) <= ledger::block_id(b) ? a : b;
}

const ledger::Block& resolve_fork(const ledger::Block& a, const ledger::Block& b)
{
    if (a.header.block_num != b.header.block_num)
        return a.header.block_num > b.header.block_num ? a : b;
    if (const int pref = consensus::compare_preference(a.header, b.header); pref != 0)
        return pref < 0 ? a : b;
    return a.block_id <= b.block_id ? a : b;
}

std::string_view to_string(SubmitStatus s) noexcept
{
    switch (s)
    {
    case SubmitStatus::routed:
        return "routed";
    case SubmitStatus::pending:
        return "pending";
    case SubmitStatus::duplicate:
        return "duplicate";
    case SubmitStatus::rejected:
        return "rejected";
    }
    return "rejected";
}

std::string_view to_string(ConsiderStatus s) noexcept
{
    switch (s)
    {
    case ConsiderStatus::extended:
        return "extended";
    case ConsiderStatus::fork_switched:
        return "fork-switched";
    case ConsiderStatus::stored_side_chain:
        return "stored-side-chain";
    case ConsiderStatus::rejected:
        return "rejected";
    }
    return "rejected";
}

Journal::Journal(JournalConfig config, std::shared_ptr<state::NodeStore> nodes)
  : config_{std::move(config)}, store_{open_store(config_)}, trie_{open_nodes(config_, std::move(nodes))}
{
    if (!store_.empty() && !trie_.has_root(store_.head().header.state_root_hash))
        rebuild_state();
}

void Journal::rebuild_state()
{
    std::string root = state::empty_root();
    for (uint64_t n = 0; n <= store_.height(); ++n)
    {
        const auto* b = store_.at(n);
        const auto r = executor_.execute_block(trie_, root, b->batches, {});
        if (!r.ok() || r.state_root != b->header.state_root_hash)
            throw IoError{"journal: stored block " + std::to_string(n) + " does not replay"};
        root = r.state_root;
    }
}

void Journal::initialize(const ledger::Block& genesis)
{
    if (!store_.empty())
    {
        if (store_.at(0)->block_id != genesis.block_id)
            throw ConfigError{"journal: genesis block does not match the stored chain"};
        return;
    }
    if (genesis.header.block_num != 0 || genesis.header.previous_block_id != ledger::kGenesisPreviousId)
        throw ConfigError{"journal: not a genesis block"};
    if (const auto v = ledger::validate_block(genesis); !v.empty())
        throw ConfigError{"journal: invalid genesis block: " + v.front()};
    const auto r = executor_.execute_block(trie_, state::empty_root(), genesis.batches, {});
    if (!r.ok())
        throw ConfigError{"journal: genesis batches rejected: " + r.violations.front()};
    if (r.state_root != genesis.header.state_root_hash)
        throw ConfigError{"journal: genesis state root mismatch"};
    store_.append(genesis);
}

const ledger::Block* Journal::lookup(const std::string& id) const
{
    if (const auto* b = store_.find(id))
        return b;
    const auto it = cache_.find(id);
    return it == cache_.end() ? nullptr : &it->second.block;
}

const ledger::Block* Journal::find_block(const std::string& block_id) const
{
    return lookup(block_id);
}

std::string Journal::state_root_of(const std::string& id) const
{
    if (const auto it = cache_.find(id); it != cache_.end())
        return it->second.state_root;
    if (const auto* b = store_.find(id))
        return b->header.state_root_hash;
    throw NotFoundError{"journal: unknown block " + short_id(id)};
}

EngineSettings Journal::engine_after(const std::string& parent_id) const
{
    return read_engine_settings(trie_, state_root_of(parent_id));
}

SubmitResult Journal::submit_batch(const ledger::Batch& batch, std::optional<int64_t> clock_s)
{
    if (pending_ids_.contains(batch.id()) || store_.batch_height(batch.id()))
        return {SubmitStatus::duplicate, {}};
    auto v = ledger::validate_batch(batch);
    if (!v.empty())
        return {SubmitStatus::rejected, std::move(v)};
    const auto trial = executor_.execute_batch(
        trie_, store_.head().header.state_root_hash, {}, batch, family::ExecContext{clock_s});
    if (!trial.ok())
        return {SubmitStatus::rejected, trial.violations};
    validated_batches_.insert_or_assign(batch.id(), batch);
    pending_.push_back(batch);
    pending_ids_.insert(batch.id());
    return {SubmitStatus::routed, {}};
}

std::vector<std::string> Journal::check_structure(const ledger::Block& block)
{
    auto v = ledger::validate_block(block, [this](const ledger::Batch& b) {
        const auto it = validated_batches_.find(b.id());
        return it != validated_batches_.end() && it->second == b;
    });
    if (v.empty())
    {
        for (const auto& b : block.batches)
            validated_batches_.insert_or_assign(b.id(), b);
    }
    return v;
}

SubmitResult Journal::receive_block(const ledger::Block& block)
{
    if (store_.contains(block.block_id) || cache_.contains(block.block_id) ||
        parked_ids_.contains(block.block_id))
        return {SubmitStatus::duplicate, {}};
    if (const auto it = rejected_.find(block.block_id); it != rejected_.end())
        return {SubmitStatus::rejected, it->second};
    if (auto v = check_structure(block); !v.empty())
    {
        rejected_.emplace(block.block_id, v);
        return {SubmitStatus::rejected, std::move(v)};
    }
    if (!lookup(block.header.previous_block_id))
    {
        parked_[block.header.previous_block_id].push_back(block);
        parked_ids_.insert(block.block_id);
        return {SubmitStatus::pending, {}};
    }
    return {SubmitStatus::routed, {}};
}

std::vector<ledger::Block> Journal::release_children(const std::string& block_id)
{
    const auto it = parked_.find(block_id);
    if (it == parked_.end())
        return {};
    auto children = std::move(it->second);
    parked_.erase(it);
    for (const auto& c : children)
        parked_ids_.erase(c.block_id);
    return children;
}

size_t Journal::parked_count() const noexcept
{
    return parked_ids_.size();
}

bool Journal::batch_in_ancestry(const std::string& batch_id, const std::string& parent_id) const
{
    std::string cursor = parent_id;
    while (!store_.contains(cursor))
    {
        const auto it = cache_.find(cursor);
        if (it == cache_.end())
            return false;
        const auto& ids = it->second.block.header.batch_ids;
        if (std::find(ids.begin(), ids.end(), batch_id) != ids.end())
            return true;
        cursor = it->second.block.header.previous_block_id;
    }
    const auto committed = store_.batch_height(batch_id);
    return committed && *committed <= store_.find(cursor)->header.block_num;
}

bool Journal::is_verified(const std::string& block_id) const
{
    return store_.contains(block_id) || cache_.contains(block_id);
}

std::vector<std::string> Journal::verify(const ledger::Block& block)
{
    if (is_verified(block.block_id))
        return {};
    if (const auto it = rejected_.find(block.block_id); it != rejected_.end())
        return it->second;

    auto v = check_structure(block);
    const auto tag = "block " + short_id(block.block_id) + ": ";
    const auto* prev = lookup(block.header.previous_block_id);
    if (v.empty() && !prev)
        return {tag + "unknown predecessor"};
    if (v.empty() && block.header.block_num != prev->header.block_num + 1)
        v.push_back(tag + "block number does not follow predecessor");
    if (v.empty())
    {
        const auto engine = engine_after(prev->block_id);
        for (auto& e : consensus::verify_payload(block.header, prev->header, engine.algorithm, engine.members))
            v.push_back(tag + e);
    }
    if (v.empty())
    {
        std::set<std::string> seen;
        for (const auto& id : block.header.batch_ids)
        {
            if (!seen.insert(id).second)
                v.push_back(tag + "batch " + short_id(id) + " listed twice");
            else if (batch_in_ancestry(id, prev->block_id))
                v.push_back(tag + "batch " + short_id(id) + " already committed");
        }
    }
    std::string root;
    if (v.empty())
    {
        auto r = executor_.execute_block(trie_, state_root_of(prev->block_id), block.batches, {});
        for (auto& e : r.violations)
            v.push_back(tag + e);
        if (r.ok() && r.state_root != block.header.state_root_hash)
            v.push_back(tag + "state root mismatch");
        root = std::move(r.state_root);
    }
    if (!v.empty())
    {
        rejected_.emplace(block.block_id, v);
        return v;
    }
    cache_.emplace(block.block_id, CacheEntry{block, std::move(root)});
    return {};
}

ConsiderResult Journal::consider(const ledger::Block& block)
{
    ConsiderResult result;
    if (store_.contains(block.block_id))
    {
        result.status = ConsiderStatus::extended;
        return result;
    }
    result.violations = verify(block);
    if (!result.violations.empty())
        return result;

    const auto& head = store_.head();
    if (block.header.previous_block_id == head.block_id)
    {
        store_.append(block);
        after_commit({block}, {});
        result.status = ConsiderStatus::extended;
        return result;
    }
    if (&resolve_fork(head, block) == &head)
    {
        result.status = ConsiderStatus::stored_side_chain;
        return result;
    }

    std::vector<ledger::Block> branch;
    std::string cursor = block.block_id;
    while (!store_.contains(cursor))
    {
        const auto& entry = cache_.at(cursor);
        branch.push_back(entry.block);
        cursor = entry.block.header.previous_block_id;
    }
    std::reverse(branch.begin(), branch.end());
    const uint64_t fork_num = store_.find(cursor)->header.block_num;
    result.abandoned = store_.replace_tail(fork_num, branch);
    after_commit(branch, result.abandoned);
    result.status = ConsiderStatus::fork_switched;
    return result;
}

ConsiderResult Journal::commit(const ledger::Block& block)
{
    ConsiderResult result;
    if (store_.contains(block.block_id))
    {
        result.status = ConsiderStatus::extended;
        return result;
    }
    result.violations = verify(block);
    if (!result.violations.empty())
        return result;
    if (block.header.previous_block_id != store_.head().block_id)
    {
        result.violations.push_back("block " + short_id(block.block_id) + ": does not extend the head");
        return result;
    }
    store_.append(block);
    after_commit({block}, {});
    result.status = ConsiderStatus::extended;
    return result;
}

void Journal::after_commit(const std::vector<ledger::Block>& added, const std::vector<ledger::Block>& removed)
{
    std::set<std::string> done;
    for (const auto& b : added)
    {
        cache_.erase(b.block_id);
        for (const auto& id : b.header.batch_ids)
        {
            done.insert(id);
            validated_batches_.erase(id);
        }
    }
    if (!done.empty())
    {
        std::erase_if(pending_, [&](const ledger::Batch& b) { return done.contains(b.id()); });
        for (const auto& id : done)
            pending_ids_.erase(id);
    }
    for (const auto& b : removed)
    {
        cache_.insert_or_assign(b.block_id, CacheEntry{b, b.header.state_root_hash});
        requeue(b.batches);
    }
    evict();
}

void Journal::evict()
{
    const uint64_t h = store_.height();
    if (h <= config_.cache_depth)
        return;
    const uint64_t floor = h - config_.cache_depth;
    std::erase_if(cache_, [&](const auto& kv) { return kv.second.block.header.block_num < floor; });
}

std::set<std::string> Journal::uncommitted_batches(const std::string& tip_id) const
{
    std::set<std::string> out;
    std::string cursor = tip_id;
    while (!store_.contains(cursor))
    {
        const auto it = cache_.find(cursor);
        if (it == cache_.end())
            break;
        out.insert(it->second.block.header.batch_ids.begin(), it->second.block.header.batch_ids.end());
        cursor = it->second.block.header.previous_block_id;
    }
    return out;
}

void Journal::requeue(const std::vector<ledger::Batch>& batches)
{
    for (const auto& b : batches)
    {
        if (store_.batch_height(b.id()) || pending_ids_.contains(b.id()))
            continue;
        validated_batches_.insert_or_assign(b.id(), b);
        pending_.push_back(b);
        pending_ids_.insert(b.id());
    }
}

void Journal::clear_pending()
{
    pending_.clear();
    pending_ids_.clear();
}

std::optional<ledger::Block> Journal::publish(const std::string& parent_id,
    const crypto::KeyPair& signer, const consensus::ConsensusPayload& payload,
    std::optional<int64_t> clock_s, const std::set<std::string>& exclude, size_t max_batches)
{
    const auto* parent = lookup(parent_id);
    if (!parent || pending_.empty())
        return std::nullopt;
    const auto in_flight = uncommitted_batches(parent_id);

    std::vector<ledger::Batch> candidates;
    for (const auto& b : pending_)
    {
        if (candidates.size() >= max_batches)
            break;
        if (exclude.contains(b.id()) || in_flight.contains(b.id()) || batch_in_ancestry(b.id(), parent_id))
            continue;
        candidates.push_back(b);
    }
    if (candidates.empty())
        return std::nullopt;

    const auto sel = executor_.select(trie_, state_root_of(parent_id), candidates, family::ExecContext{clock_s});
    for (const auto& [index, _] : sel.rejected)
    {
        const auto& id = candidates[index].id();
        pending_ids_.erase(id);
        std::erase_if(pending_, [&](const ledger::Batch& b) { return b.id() == id; });
    }
    if (sel.included.empty())
        return std::nullopt;

    ledger::BlockSpec spec;
    spec.block_num = parent->header.block_num + 1;
    spec.previous_block_id = parent_id;
    for (const size_t i : sel.included)
        spec.batches.push_back(candidates[i]);
    spec.state_root_hash = sel.state_root;
    spec.consensus_payload = consensus::encode_payload(payload);
    auto block = ledger::build_block(std::move(spec), signer);
    cache_.insert_or_assign(block.block_id, CacheEntry{block, sel.state_root});
    return block;
}
}  // namespace airchain::journal
