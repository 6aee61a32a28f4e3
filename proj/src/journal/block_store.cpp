// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "journal/block_store.hpp"
#include "common/error.hpp"

#include <fstream>
#include <iterator>

namespace airchain::journal
{
namespace fs = std::filesystem;

BlockStore::BlockStore(const fs::path& dir) : dir_{dir}
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError{"block store: cannot create " + dir.string() + ": " + ec.message()};

    std::unordered_map<std::string, ledger::Block> all;
    std::string last_id;
    const auto log_path = dir / "blocks.log";
    if (std::ifstream in{log_path, std::ios::binary}; in)
    {
        const std::string text{std::istreambuf_iterator<char>{in}, {}};
        size_t pos = 0;
        size_t lineno = 0;
        while (pos < text.size())
        {
            ++lineno;
            const auto nl = text.find('\n', pos);
            if (nl == std::string::npos)
            {
                // A write cut short by a crash: drop the partial record.
                in.close();
                fs::resize_file(log_path, pos, ec);
                if (ec)
                    throw IoError{"block store: cannot trim " + log_path.string() + ": " + ec.message()};
                break;
            }
            const std::string_view line{text.data() + pos, nl - pos};
            pos = nl + 1;
            if (line.empty())
                continue;
            try
            {
                auto b = ledger::decode_block(line);
                last_id = b.block_id;
                on_disk_[b.block_id] = true;
                all.emplace(b.block_id, std::move(b));
            }
            catch (const Error& e)
            {
                throw IoError{"block store: corrupt record at line " + std::to_string(lineno) +
                              ": " + e.what()};
            }
        }
    }

    std::string head_id;
    if (std::ifstream head{dir / "head"}; head)
        std::getline(head, head_id);
    if (head_id.empty())
        head_id = last_id;

    if (!head_id.empty())
    {
        std::vector<ledger::Block> reversed;
        std::string cursor = head_id;
        while (true)
        {
            const auto it = all.find(cursor);
            if (it == all.end())
                throw IoError{"block store: missing ancestor " + cursor.substr(0, 16)};
            reversed.push_back(it->second);
            if (it->second.header.block_num == 0)
                break;
            if (reversed.size() > all.size())
                throw IoError{"block store: cycle in chain"};
            cursor = it->second.header.previous_block_id;
        }
        for (auto it = reversed.rbegin(); it != reversed.rend(); ++it)
        {
            if (it->header.block_num != chain_.size())
                throw IoError{"block store: block numbers do not increase by one"};
            chain_.push_back(*it);
            index(chain_.back());
        }
    }

    log_.open(log_path, std::ios::app);
    if (!log_)
        throw IoError{"block store: cannot open " + log_path.string()};
}

const ledger::Block& BlockStore::head() const
{
    if (chain_.empty())
        throw Error{"block store is empty"};
    return chain_.back();
}

uint64_t BlockStore::height() const
{
    return head().header.block_num;
}

bool BlockStore::contains(const std::string& block_id) const
{
    return by_id_.contains(block_id);
}

const ledger::Block* BlockStore::find(const std::string& block_id) const
{
    const auto it = by_id_.find(block_id);
    return it == by_id_.end() ? nullptr : &chain_[it->second];
}

const ledger::Block* BlockStore::at(uint64_t block_num) const
{
    return block_num < chain_.size() ? &chain_[block_num] : nullptr;
}

std::optional<uint64_t> BlockStore::batch_height(const std::string& batch_id) const
{
    const auto it = batches_.find(batch_id);
    return it == batches_.end() ? std::nullopt : std::optional{it->second};
}

void BlockStore::index(const ledger::Block& block)
{
    by_id_[block.block_id] = block.header.block_num;
    for (const auto& id : block.header.batch_ids)
        batches_[id] = block.header.block_num;
}

void BlockStore::unindex(const ledger::Block& block)
{
    by_id_.erase(block.block_id);
    for (const auto& id : block.header.batch_ids)
        batches_.erase(id);
}

void BlockStore::append(const ledger::Block& block)
{
    if (chain_.empty())
    {
        if (block.header.block_num != 0 || block.header.previous_block_id != ledger::kGenesisPreviousId)
            throw Error{"block store: first block must be a genesis block"};
    }
    else if (block.header.block_num != height() + 1 ||
             block.header.previous_block_id != head().block_id)
        throw Error{"block store: block " + block.block_id.substr(0, 16) + " does not extend the head"};
    chain_.push_back(block);
    index(chain_.back());
    persist(block);
    write_head();
}

std::vector<ledger::Block> BlockStore::replace_tail(
    uint64_t fork_num, const std::vector<ledger::Block>& branch)
{
    if (fork_num >= chain_.size())
        throw Error{"block store: fork point above head"};
    std::string prev = chain_[fork_num].block_id;
    for (size_t i = 0; i < branch.size(); ++i)
    {
        if (branch[i].header.block_num != fork_num + 1 + i || branch[i].header.previous_block_id != prev)
            throw Error{"block store: branch does not link onto the fork point"};
        prev = branch[i].block_id;
    }
    std::vector<ledger::Block> removed(chain_.begin() + static_cast<long>(fork_num) + 1, chain_.end());
    for (const auto& b : removed)
        unindex(b);
    chain_.resize(fork_num + 1);
    for (const auto& b : branch)
    {
        chain_.push_back(b);
        index(chain_.back());
        persist(b);
    }
    write_head();
    return removed;
}

void BlockStore::persist(const ledger::Block& block)
{
    if (!dir_ || on_disk_.contains(block.block_id))
        return;
    log_ << ledger::encode_block(block) << '\n';
    log_.flush();
    if (!log_)
        throw IoError{"block store: write failed"};
    on_disk_[block.block_id] = true;
}

void BlockStore::write_head()
{
    if (!dir_)
        return;
    const auto tmp = *dir_ / "head.tmp";
    {
        std::ofstream out{tmp, std::ios::trunc};
        out << head().block_id << '\n';
        out.flush();
        if (!out)
            throw IoError{"block store: cannot write head pointer"};
    }
    std::error_code ec;
    fs::rename(tmp, *dir_ / "head", ec);
    if (ec)
        throw IoError{"block store: cannot replace head pointer: " + ec.message()};
}

void BlockStore::flush()
{
    if (log_.is_open())
        log_.flush();
}
}  // namespace airchain::journal
