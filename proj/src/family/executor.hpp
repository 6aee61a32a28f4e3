// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "family/handler.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace airchain::family
{
/// Runs batches serially against state. A batch is all-or-nothing: one
/// rejected transaction discards the whole batch's writes.
class Executor
{
public:
    /// Registers the airquality and settings handlers.
    Executor();

    void register_handler(std::shared_ptr<const TransactionHandler> handler);

    struct BatchResult
    {
        std::vector<std::string> violations;
        state::ChangeSet delta;

        bool ok() const noexcept { return violations.empty(); }
    };

    /// Executes one batch on top of `root` plus the uncommitted `overlay`.
    BatchResult execute_batch(const state::MerkleTrie& trie, const std::string& root,
        const state::ChangeSet& overlay, const ledger::Batch& batch, const ExecContext& ctx) const;

    struct Selection
    {
        std::string state_root;
        std::vector<size_t> included;
        std::vector<std::pair<size_t, std::vector<std::string>>> rejected;
    };

    /// Executes batches in order, skipping those that fail, and commits the
    /// surviving writes into a new root.
    Selection select(state::MerkleTrie& trie, const std::string& root,
        const std::vector<ledger::Batch>& batches, const ExecContext& ctx) const;

    struct BlockResult
    {
        std::string state_root;
        std::vector<std::string> violations;

        bool ok() const noexcept { return violations.empty(); }
    };

    /// Executes every batch; any failure invalidates the whole block.
    BlockResult execute_block(state::MerkleTrie& trie, const std::string& root,
        const std::vector<ledger::Batch>& batches, const ExecContext& ctx) const;

private:
    std::map<std::string, std::shared_ptr<const TransactionHandler>, std::less<>> handlers_;
};
}  // namespace airchain::family
