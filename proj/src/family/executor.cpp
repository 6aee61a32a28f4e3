// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "family/executor.hpp"
#include "family/airquality.hpp"
#include "family/settings.hpp"

namespace airchain::family
{
namespace
{
class OverlayReader final : public StateReader
{
public:
    OverlayReader(const state::MerkleTrie& trie, const std::string& root,
        const state::ChangeSet& lower, const state::ChangeSet& upper)
      : trie_{trie}, root_{root}, lower_{lower}, upper_{upper}
    {}

    std::optional<Bytes> get(const std::string& address) const override
    {
        for (const auto* layer : {&upper_, &lower_})
        {
            if (const auto it = layer->find(address); it != layer->end())
                return it->second;
        }
        if (!state::is_valid_address(address))
            return std::nullopt;
        return trie_.get(root_, address);
    }

private:
    const state::MerkleTrie& trie_;
    const std::string& root_;
    const state::ChangeSet& lower_;
    const state::ChangeSet& upper_;
};

void merge(state::ChangeSet& into, const state::ChangeSet& from)
{
    for (const auto& [k, v] : from)
        into.insert_or_assign(k, v);
}
}  // namespace

Executor::Executor()
{
    register_handler(std::make_shared<AirQualityHandler>());
    register_handler(std::make_shared<SettingsHandler>());
}

void Executor::register_handler(std::shared_ptr<const TransactionHandler> handler)
{
    handlers_.insert_or_assign(std::string{handler->family_name()}, std::move(handler));
}

Executor::BatchResult Executor::execute_batch(const state::MerkleTrie& trie,
    const std::string& root, const state::ChangeSet& overlay, const ledger::Batch& batch,
    const ExecContext& ctx) const
{
    BatchResult result;
    for (const auto& txn : batch.transactions)
    {
        const auto tag = "transaction " + txn.id().substr(0, 16) + ": ";
        const auto it = handlers_.find(txn.header.family_name);
        if (it == handlers_.end())
        {
            result.violations.push_back(tag + "unauthorized family '" + txn.header.family_name + "'");
            continue;
        }
        if (it->second->family_version() != txn.header.family_version)
        {
            result.violations.push_back(
                tag + "unsupported family version '" + txn.header.family_version + "'");
            continue;
        }
        OverlayReader reader{trie, root, overlay, result.delta};
        auto applied = it->second->apply(txn, reader, ctx);
        if (!applied.ok())
        {
            for (auto& v : applied.violations)
                result.violations.push_back(tag + v);
            continue;
        }
        merge(result.delta, applied.delta);
    }
    if (!result.ok())
        result.delta.clear();
    return result;
}

Executor::Selection Executor::select(state::MerkleTrie& trie, const std::string& root,
    const std::vector<ledger::Batch>& batches, const ExecContext& ctx) const
{
    Selection sel;
    state::ChangeSet overlay;
    for (size_t i = 0; i < batches.size(); ++i)
    {
        auto r = execute_batch(trie, root, overlay, batches[i], ctx);
        if (r.ok())
        {
            merge(overlay, r.delta);
            sel.included.push_back(i);
        }
        else
            sel.rejected.emplace_back(i, std::move(r.violations));
    }
    sel.state_root = trie.apply(root, overlay);
    return sel;
}

Executor::BlockResult Executor::execute_block(state::MerkleTrie& trie, const std::string& root,
    const std::vector<ledger::Batch>& batches, const ExecContext& ctx) const
{
    BlockResult result;
    state::ChangeSet overlay;
    for (const auto& batch : batches)
    {
        auto r = execute_batch(trie, root, overlay, batch, ctx);
        if (!r.ok())
        {
            result.violations.push_back("batch " + batch.id().substr(0, 16) + " invalid");
            for (auto& v : r.violations)
                result.violations.push_back(std::move(v));
            continue;
        }
        merge(overlay, r.delta);
    }
    if (result.ok())
        result.state_root = trie.apply(root, overlay);
    return result;
}
}  // namespace airchain::family
