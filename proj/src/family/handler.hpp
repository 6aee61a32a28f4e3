// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common/bytes.hpp"
#include "ledger/types.hpp"
#include "state/trie.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace airchain::family
{
/// Read access to state for transaction handlers.
class StateReader
{
public:
    virtual ~StateReader() = default;
    virtual std::optional<Bytes> get(const std::string& address) const = 0;
};

struct ExecContext
{
    /// Local clock used for admission-time checks. Unset during chain
    /// re-execution.
    std::optional<int64_t> clock_s;
};

struct ApplyResult
{
    std::vector<std::string> violations;  ///< empty means accepted
    state::ChangeSet delta;

    bool ok() const noexcept { return violations.empty(); }
};

/// A transaction processor for one family. Implementations are pure.
class TransactionHandler
{
public:
    virtual ~TransactionHandler() = default;
    virtual std::string_view family_name() const noexcept = 0;
    virtual std::string_view family_version() const noexcept = 0;
    virtual ApplyResult apply(const ledger::Transaction& txn, const StateReader& state,
        const ExecContext& ctx) const = 0;
};
}  // namespace airchain::family
