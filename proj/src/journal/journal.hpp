// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "consensus/algorithm.hpp"
#include "consensus/payload.hpp"
#include "family/executor.hpp"
#include "journal/block_store.hpp"
#include "state/trie.hpp"

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace airchain::journal
{
inline constexpr uint64_t kDefaultCacheDepth = 100;

/// Engine configuration read from the settings namespace.
struct EngineSettings
{
    consensus::Algorithm algorithm = consensus::Algorithm::poet_cft;
    std::vector<std::string> members;

    friend bool operator==(const EngineSettings&, const EngineSettings&) = default;
};

EngineSettings read_engine_settings(const state::MerkleTrie& trie, const std::string& state_root);

/// Total order on competing heads: higher block_num, then the engine's
/// preference, then the lexicographically smaller block id.
const ledger::BlockHeader& resolve_fork(const ledger::BlockHeader& a, const ledger::BlockHeader& b);
/// resolve_fork on full blocks, comparing ids rather than recomputing them.
const ledger::Block& resolve_fork(const ledger::Block& a, const ledger::Block& b);

enum class SubmitStatus
{
    routed,
    pending,
    duplicate,
    rejected,
};

std::string_view to_string(SubmitStatus s) noexcept;

struct SubmitResult
{
    SubmitStatus status = SubmitStatus::rejected;
    std::vector<std::string> violations;
};

enum class ConsiderStatus
{
    extended,
    fork_switched,
    stored_side_chain,
    rejected,
};

std::string_view to_string(ConsiderStatus s) noexcept;

struct ConsiderResult
{
    ConsiderStatus status = ConsiderStatus::rejected;
    std::vector<std::string> violations;
    /// Blocks that left the main chain on a fork switch.
    std::vector<ledger::Block> abandoned;
};

struct JournalConfig
{
    uint64_t cache_depth = kDefaultCacheDepth;
    /// Durable block store and trie directory; empty for memory only.
    std::optional<std::filesystem::path> data_dir;
};

/// Completer, chain controller, block publisher, cache, and store for one
/// validator. Not thread-safe; the owner serialises calls.
class Journal
{
public:
    explicit Journal(JournalConfig config = {}, std::shared_ptr<state::NodeStore> nodes = {});

    /// Installs `genesis` into an empty store, or checks it matches block 0.
    void initialize(const ledger::Block& genesis);

    const BlockStore& store() const noexcept { return store_; }
    const state::MerkleTrie& trie() const noexcept { return trie_; }
    state::MerkleTrie& trie() noexcept { return trie_; }
    const ledger::Block& head() const { return store_.head(); }

    /// Engine governing the block after `parent_id` (cached or committed).
    EngineSettings engine_after(const std::string& parent_id) const;

    // --- completer -------------------------------------------------------

    /// Admits a batch into the pending queue. Structural checks plus a
    /// trial execution against head state with `clock_s`.
    SubmitResult submit_batch(const ledger::Batch& batch, std::optional<int64_t> clock_s);

    /// Structural checks, de-duplication, and parking of blocks whose
    /// predecessor is unknown. `routed` means the predecessor is known.
    SubmitResult receive_block(const ledger::Block& block);

    /// Parked blocks waiting on `block_id`, removed from the parking lot.
    std::vector<ledger::Block> release_children(const std::string& block_id);
    size_t parked_count() const noexcept;

    // --- chain controller ------------------------------------------------

    /// Re-executes `block` on its predecessor and checks the consensus
    /// payload. On success the block joins the cache. Idempotent.
    std::vector<std::string> verify(const ledger::Block& block);
    bool is_verified(const std::string& block_id) const;
    const ledger::Block* find_block(const std::string& block_id) const;

    /// Fork-choice path: verify, then extend, switch, or keep as side chain.
    ConsiderResult consider(const ledger::Block& block);

    /// Finality path: verify and append; the block must extend the head.
    ConsiderResult commit(const ledger::Block& block);

    // --- block publisher -------------------------------------------------

    const std::deque<ledger::Batch>& pending() const noexcept { return pending_; }
    bool has_pending() const noexcept { return !pending_.empty(); }
    bool is_pending(const std::string& batch_id) const { return pending_ids_.contains(batch_id); }

    /// Builds a signed candidate on `parent_id` from pending batches in
    /// arrival order, skipping `exclude` and dropping batches that fail.
    /// Returns nothing when no batch survives. The candidate is cached, not
    /// committed.
    std::optional<ledger::Block> publish(const std::string& parent_id, const crypto::KeyPair& signer,
        const consensus::ConsensusPayload& payload, std::optional<int64_t> clock_s,
        const std::set<std::string>& exclude = {}, size_t max_batches = 100);

    /// Batch ids in the cached blocks from `tip_id` back to the main chain.
    std::set<std::string> uncommitted_batches(const std::string& tip_id) const;

    /// Returns batches to the pending queue unless committed or present.
    void requeue(const std::vector<ledger::Batch>& batches);
    void clear_pending();

    void flush() { store_.flush(); }

private:
    struct CacheEntry
    {
        ledger::Block block;
        std::string state_root;
    };

    const ledger::Block* lookup(const std::string& id) const;
    std::string state_root_of(const std::string& id) const;
    bool batch_in_ancestry(const std::string& batch_id, const std::string& parent_id) const;
    void after_commit(const std::vector<ledger::Block>& added, const std::vector<ledger::Block>& removed);
    void evict();
    void rebuild_state();
    std::vector<std::string> check_structure(const ledger::Block& block);

    JournalConfig config_;
    BlockStore store_;
    state::MerkleTrie trie_;
    family::Executor executor_;
    std::unordered_map<std::string, CacheEntry> cache_;
    std::unordered_map<std::string, std::vector<std::string>> rejected_;
    std::unordered_map<std::string, ledger::Batch> validated_batches_;
    std::map<std::string, std::vector<ledger::Block>> parked_;
    std::set<std::string> parked_ids_;
    std::deque<ledger::Batch> pending_;
    std::set<std::string> pending_ids_;
};
}  // namespace airchain::journal
