// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common/bytes.hpp"
#include "ledger/crypto.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace airchain::state
{
/// 6-hex namespace prefix followed by 64 hex characters.
inline constexpr size_t kAddressLen = 70;
inline constexpr size_t kNamespaceLen = 6;

bool is_valid_address(std::string_view address) noexcept;

/// Throws TrieError for anything but 70 lowercase hex characters.
void check_address(std::string_view address);

/// Root digest of the empty trie, SHA-512 of the empty string.
const std::string& empty_root();

/// One radix-16 node. Values live only at depth kAddressLen.
struct TrieNode
{
    std::array<std::optional<crypto::Digest512>, 16> children;
    std::optional<Bytes> value;

    bool empty() const noexcept;

    /// Canonical record text: {"children":{"<nibble>":"<digest>",...},"value":"<hex>"}
    /// with "value" omitted on interior nodes.
    std::string encode() const;

    /// Strict inverse of encode(); throws TrieError on non-canonical input.
    static TrieNode decode(std::string_view text);
};

/// Content-addressed, append-only node storage shared by any number of
/// tries. Thread-safe. With a backing path every new node is appended to the
/// file as "<digest> <encoding>" and the file is replayed on construction.
class NodeStore
{
public:
    NodeStore() = default;
    explicit NodeStore(const std::filesystem::path& path);

    std::shared_ptr<const TrieNode> find(const crypto::Digest512& digest) const;
    crypto::Digest512 put(TrieNode node);
    bool contains(const crypto::Digest512& digest) const;
    size_t size() const;

private:
    struct DigestHash
    {
        size_t operator()(const crypto::Digest512& d) const noexcept;
    };

    mutable std::shared_mutex mutex_;
    std::unordered_map<crypto::Digest512, std::shared_ptr<const TrieNode>, DigestHash> nodes_;
    std::ofstream file_;
};

/// A state change: a value to write, or nullopt to delete.
using ChangeSet = std::map<std::string, std::optional<Bytes>>;

/// Persistent Merkle-radix tree keyed by 70-hex addresses. Every update
/// returns a new root; nodes reachable from older roots are never modified.
/// Roots are 128-hex SHA-512 digests.
class MerkleTrie
{
public:
    explicit MerkleTrie(std::shared_ptr<NodeStore> store = std::make_shared<NodeStore>());

    std::string set(const std::string& root, std::string_view address, Bytes value);
    std::optional<Bytes> get(const std::string& root, std::string_view address) const;
    std::string remove(const std::string& root, std::string_view address);

    /// Applies all changes in one pass, hashing each touched node once.
    std::string apply(const std::string& root, const ChangeSet& changes);

    /// Node encodings on the path from the root towards `address`, stopping
    /// at the leaf or at the first missing child.
    std::vector<std::string> prove(const std::string& root, std::string_view address) const;

    /// Throws TrieError when a proof element is not a canonical node encoding.
    static bool verify_proof(const std::string& root, std::string_view address,
        const std::optional<Bytes>& value, const std::vector<std::string>& proof);

    /// Visits every entry whose address starts with `prefix`, in address order.
    void for_each(const std::string& root, std::string_view prefix,
        const std::function<void(const std::string& address, const Bytes& value)>& visit) const;

    bool has_root(const std::string& root) const;

    const std::shared_ptr<NodeStore>& store() const noexcept { return store_; }

private:
    using Digest = crypto::Digest512;
    using ChangeIt = ChangeSet::const_iterator;

    std::optional<Digest> load_root(const std::string& root) const;
    std::shared_ptr<const TrieNode> node(const Digest& d) const;
    std::optional<Digest> update(const std::optional<Digest>& at, ChangeIt first, ChangeIt last,
        size_t depth);

    std::shared_ptr<NodeStore> store_;
};
}  // namespace airchain::state
