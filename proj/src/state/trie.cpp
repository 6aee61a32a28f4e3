// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "state/trie.hpp"
#include "common/error.hpp"
#include "ledger/codec.hpp"

#include <cstring>
#include <mutex>

namespace airchain::state
{
namespace
{
constexpr char kNibbles[] = "0123456789abcdef";

int nibble_at(std::string_view address, size_t depth)
{
    const char c = address[depth];
    return c <= '9' ? c - '0' : c - 'a' + 10;
}

crypto::Digest512 digest_from_hex(std::string_view hex)
{
    if (!is_lower_hex(hex, crypto::kDigestHexLen))
        throw TrieError("malformed digest");
    crypto::Digest512 d{};
    const auto bytes = from_hex(hex);
    std::memcpy(d.data(), bytes.data(), d.size());
    return d;
}
}  // namespace

bool is_valid_address(std::string_view address) noexcept
{
    return is_lower_hex(address, kAddressLen);
}

void check_address(std::string_view address)
{
    if (!is_valid_address(address))
        throw TrieError("malformed address: expected 70 lowercase hex characters, got '" +
                        std::string{address.substr(0, 80)} + "'");
}

const std::string& empty_root()
{
    static const std::string root = crypto::sha512_hex(ByteView{});
    return root;
}

bool TrieNode::empty() const noexcept
{
    if (value)
        return false;
    for (const auto& c : children)
    {
        if (c)
            return false;
    }
    return true;
}

std::string TrieNode::encode() const
{
    // Hand-rolled canonical form: keys "children" < "value", nibble keys in
    // ASCII order. Identical to codec::encode of the same record.
    std::string out = "{\"children\":{";
    bool first = true;
    for (size_t i = 0; i < children.size(); ++i)
    {
        if (!children[i])
            continue;
        if (!first)
            out += ',';
        first = false;
        out += '"';
        out += kNibbles[i];
        out += "\":\"";
        out += to_hex(*children[i]);
        out += '"';
    }
    out += '}';
    if (value)
    {
        out += ",\"value\":\"";
        out += to_hex(*value);
        out += '"';
    }
    out += '}';
    return out;
}

TrieNode TrieNode::decode(std::string_view text)
{
    TrieNode node;
    try
    {
        const auto r = codec::decode(text);
        if (!r.is_object() || !r.contains("children") || r.size() > 2 ||
            (r.size() == 2 && !r.contains("value")))
            throw TrieError("node has unexpected fields");
        const auto& children = r.at("children");
        if (!children.is_object())
            throw TrieError("node children is not a map");
        for (const auto& [key, digest] : children.items())
        {
            if (key.size() != 1 || !is_lower_hex(key) || !digest.is_string())
                throw TrieError("malformed child entry");
            node.children[static_cast<size_t>(nibble_at(key, 0))] =
                digest_from_hex(digest.get<std::string>());
        }
        if (r.contains("value"))
            node.value = from_hex(codec::get_string(r, "value"));
    }
    catch (const CodecError& e)
    {
        throw TrieError(std::string{"malformed node: "} + e.what());
    }
    if (node.encode() != text)
        throw TrieError("node encoding is not canonical");
    return node;
}

size_t NodeStore::DigestHash::operator()(const crypto::Digest512& d) const noexcept
{
    size_t h = 0;
    std::memcpy(&h, d.data(), sizeof(h));
    return h;
}

NodeStore::NodeStore(const std::filesystem::path& path)
{
    if (std::filesystem::exists(path))
    {
        std::ifstream in{path};
        if (!in)
            throw IoError("cannot open node store " + path.string());
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            const auto space = line.find(' ');
            if (space != crypto::kDigestHexLen)
                throw TrieError("corrupt node store at line " + std::to_string(line_no));
            const auto encoding = std::string_view{line}.substr(space + 1);
            const auto digest = digest_from_hex(std::string_view{line}.substr(0, space));
            if (crypto::sha512(as_bytes(encoding)) != digest)
                throw TrieError("node store digest mismatch at line " + std::to_string(line_no));
            nodes_.emplace(digest, std::make_shared<const TrieNode>(TrieNode::decode(encoding)));
        }
    }
    file_.open(path, std::ios::app);
    if (!file_)
        throw IoError("cannot open node store " + path.string() + " for append");
}

std::shared_ptr<const TrieNode> NodeStore::find(const crypto::Digest512& digest) const
{
    std::shared_lock lock{mutex_};
    const auto it = nodes_.find(digest);
    return it == nodes_.end() ? nullptr : it->second;
}

bool NodeStore::contains(const crypto::Digest512& digest) const
{
    std::shared_lock lock{mutex_};
    return nodes_.contains(digest);
}

crypto::Digest512 NodeStore::put(TrieNode node)
{
    const auto encoding = node.encode();
    const auto digest = crypto::sha512(as_bytes(encoding));
    std::unique_lock lock{mutex_};
    const auto [it, inserted] = nodes_.try_emplace(digest, nullptr);
    if (inserted)
    {
        it->second = std::make_shared<const TrieNode>(std::move(node));
        if (file_.is_open())
        {
            file_ << to_hex(digest) << ' ' << encoding << '\n';
            file_.flush();
            if (!file_)
                throw IoError("node store append failed");
        }
    }
    return digest;
}

size_t NodeStore::size() const
{
    std::shared_lock lock{mutex_};
    return nodes_.size();
}

MerkleTrie::MerkleTrie(std::shared_ptr<NodeStore> store) : store_{std::move(store)} {}

std::optional<MerkleTrie::Digest> MerkleTrie::load_root(const std::string& root) const
{
    if (root == empty_root())
        return std::nullopt;
    const auto d = digest_from_hex(root);
    if (!store_->contains(d))
        throw TrieError("unknown state root " + root.substr(0, 16));
    return d;
}

bool MerkleTrie::has_root(const std::string& root) const
{
    if (root == empty_root())
        return true;
    if (!is_lower_hex(root, crypto::kDigestHexLen))
        return false;
    return store_->contains(digest_from_hex(root));
}

std::shared_ptr<const TrieNode> MerkleTrie::node(const Digest& d) const
{
    auto n = store_->find(d);
    if (!n)
        throw TrieError("missing trie node " + to_hex(d).substr(0, 16));
    return n;
}

std::optional<MerkleTrie::Digest> MerkleTrie::update(
    const std::optional<Digest>& at, ChangeIt first, ChangeIt last, size_t depth)
{
    if (depth == kAddressLen)
    {
        // Addresses are unique in a ChangeSet, so exactly one change reaches a leaf.
        const auto& value = first->second;
        if (!value)
            return std::nullopt;
        TrieNode leaf;
        leaf.value = *value;
        return store_->put(std::move(leaf));
    }

    TrieNode current = at ? *node(*at) : TrieNode{};
    auto it = first;
    while (it != last)
    {
        const int nib = nibble_at(it->first, depth);
        auto group_end = it;
        while (group_end != last && nibble_at(group_end->first, depth) == nib)
            ++group_end;
        auto& child = current.children[static_cast<size_t>(nib)];
        child = update(child, it, group_end, depth + 1);
        it = group_end;
    }
    if (current.empty())
        return std::nullopt;
    return store_->put(std::move(current));
}

std::string MerkleTrie::apply(const std::string& root, const ChangeSet& changes)
{
    for (const auto& [address, _] : changes)
        check_address(address);
    const auto start = load_root(root);
    if (changes.empty())
        return root;
    const auto result = update(start, changes.begin(), changes.end(), 0);
    return result ? to_hex(*result) : empty_root();
}

std::string MerkleTrie::set(const std::string& root, std::string_view address, Bytes value)
{
    ChangeSet changes;
    changes.emplace(std::string{address}, std::move(value));
    return apply(root, changes);
}

std::string MerkleTrie::remove(const std::string& root, std::string_view address)
{
    ChangeSet changes;
    changes.emplace(std::string{address}, std::nullopt);
    return apply(root, changes);
}

std::optional<Bytes> MerkleTrie::get(const std::string& root, std::string_view address) const
{
    check_address(address);
    auto at = load_root(root);
    for (size_t depth = 0; at; ++depth)
    {
        const auto n = node(*at);
        if (depth == kAddressLen)
            return n->value;
        at = n->children[static_cast<size_t>(nibble_at(address, depth))];
    }
    return std::nullopt;
}

std::vector<std::string> MerkleTrie::prove(const std::string& root, std::string_view address) const
{
    check_address(address);
    std::vector<std::string> proof;
    auto at = load_root(root);
    for (size_t depth = 0; at; ++depth)
    {
        const auto n = node(*at);
        proof.push_back(n->encode());
        if (depth == kAddressLen)
            break;
        at = n->children[static_cast<size_t>(nibble_at(address, depth))];
    }
    return proof;
}

bool MerkleTrie::verify_proof(const std::string& root, std::string_view address,
    const std::optional<Bytes>& value, const std::vector<std::string>& proof)
{
    check_address(address);
    if (proof.empty())
        return root == empty_root() && !value;
    if (proof.size() > kAddressLen + 1)
        return false;

    auto expected = root;
    for (size_t depth = 0; depth < proof.size(); ++depth)
    {
        const auto& encoding = proof[depth];
        if (crypto::sha512_hex(as_bytes(encoding)) != expected)
            return false;
        const auto n = TrieNode::decode(encoding);
        if (depth == kAddressLen)
            return n.value == value;
        const auto& child = n.children[static_cast<size_t>(nibble_at(address, depth))];
        if (!child)
            return depth + 1 == proof.size() && !value;
        expected = to_hex(*child);
    }
    return false;  // proof ended before reaching a leaf or a missing child
}

void MerkleTrie::for_each(const std::string& root, std::string_view prefix,
    const std::function<void(const std::string&, const Bytes&)>& visit) const
{
    if (prefix.size() > kAddressLen || !is_lower_hex(prefix))
        throw TrieError("malformed address prefix");
    auto at = load_root(root);
    std::string path;
    for (size_t depth = 0; depth < prefix.size() && at; ++depth)
    {
        at = node(*at)->children[static_cast<size_t>(nibble_at(prefix, depth))];
        path += prefix[depth];
    }
    if (!at)
        return;

    const std::function<void(const Digest&, std::string&)> walk = [&](const Digest& d,
                                                                      std::string& p) {
        const auto n = node(d);
        if (p.size() == kAddressLen)
        {
            if (n->value)
                visit(p, *n->value);
            return;
        }
        for (size_t i = 0; i < n->children.size(); ++i)
        {
            if (!n->children[i])
                continue;
            p.push_back(kNibbles[i]);
            walk(*n->children[i], p);
            p.pop_back();
        }
    };
    walk(*at, path);
}
}  // namespace airchain::state
