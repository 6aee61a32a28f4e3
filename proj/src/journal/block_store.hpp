// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ledger/types.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace airchain::journal
{
/// The committed chain: a single path from genesis to head, indexed by id
/// and by block number. With a directory, blocks are appended to
/// `blocks.log` and the head id is kept in `head`, replaced atomically.
class BlockStore
{
public:
    BlockStore() = default;
    /// Opens or creates a durable store. Throws IoError when the files are
    /// unreadable or do not form a chain.
    explicit BlockStore(const std::filesystem::path& dir);

    bool empty() const noexcept { return chain_.empty(); }
    /// Throws Error when empty.
    const ledger::Block& head() const;
    uint64_t height() const;
    bool contains(const std::string& block_id) const;
    const ledger::Block* find(const std::string& block_id) const;
    const ledger::Block* at(uint64_t block_num) const;
    /// Block number holding `batch_id`, if committed.
    std::optional<uint64_t> batch_height(const std::string& batch_id) const;

    /// Appends a block that extends the head (or a genesis block with
    /// number 0 when empty). Throws Error otherwise.
    void append(const ledger::Block& block);
    /// Replaces everything above `fork_num` with `branch`, which must link
    /// onto the block at `fork_num`. Returns the removed blocks.
    std::vector<ledger::Block> replace_tail(uint64_t fork_num, const std::vector<ledger::Block>& branch);

    void flush();

private:
    void persist(const ledger::Block& block);
    void write_head();
    void index(const ledger::Block& block);
    void unindex(const ledger::Block& block);

    std::vector<ledger::Block> chain_;
    std::unordered_map<std::string, uint64_t> by_id_;
    std::unordered_map<std::string, uint64_t> batches_;
    std::optional<std::filesystem::path> dir_;
    std::ofstream log_;
    std::unordered_map<std::string, bool> on_disk_;
};
}  // namespace airchain::journal
