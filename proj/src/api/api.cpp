// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "api/api.hpp"
#include "common/error.hpp"
#include "family/airquality.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace airchain::api
{
namespace
{
Response ok(int status, const codec::Record& body)
{
    return {status, codec::encode(body)};
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> parts;
    size_t start = 0;
    while (start <= path.size())
    {
        const auto end = std::min(path.find('/', start), path.size());
        if (end > start)
            parts.emplace_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

std::optional<int64_t> parse_int(const std::string& s)
{
    int64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
        return std::nullopt;
    return v;
}

/// Integer query parameter; throws CodecError when present but malformed.
std::optional<int64_t> int_param(const Request& req, const std::string& name)
{
    const auto it = req.query.find(name);
    if (it == req.query.end())
        return std::nullopt;
    const auto v = parse_int(it->second);
    if (!v)
        throw CodecError{"parameter " + name + " is not an integer"};
    return v;
}

std::string header(const Request& req, std::string_view name)
{
    const auto it = req.headers.find(std::string{name});
    return it == req.headers.end() ? std::string{} : it->second;
}

codec::Record block_record(const ledger::Block& b)
{
    auto r = ledger::to_record(b);
    r["block_id"] = b.block_id;
    return r;
}

std::string format_z(double z)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", z);
    return buf;
}

bool is_digest(std::string_view s) noexcept
{
    return s.size() == crypto::kDigestHexLen &&
           std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}
}  // namespace

std::string_view to_string(ReceiptStatus s) noexcept
{
    switch (s)
    {
    case ReceiptStatus::accepted:
        return "accepted";
    case ReceiptStatus::invalid:
        return "invalid";
    case ReceiptStatus::unauthorized:
        return "unauthorized";
    }
    return "invalid";
}

codec::Record to_record(const SubmitReceipt& r)
{
    codec::Record rec{{"batch_id", r.batch_id}, {"status", std::string{to_string(r.status)}}};
    if (!r.violations.empty())
        rec["violations"] = r.violations;
    return rec;
}

SubmitReceipt receipt_from_record(const codec::Record& r)
{
    SubmitReceipt out;
    out.batch_id = codec::get_string(r, "batch_id");
    const auto status = codec::get_string(r, "status");
    if (status == "accepted")
        out.status = ReceiptStatus::accepted;
    else if (status == "invalid")
        out.status = ReceiptStatus::invalid;
    else if (status == "unauthorized")
        out.status = ReceiptStatus::unauthorized;
    else
        throw CodecError{"receipt: unknown status " + status};
    if (r.contains("violations"))
        out.violations = codec::get_string_list(r, "violations");
    return out;
}

std::string encode_batch_list(const std::vector<ledger::Batch>& batches)
{
    auto list = codec::Record::array();
    for (const auto& b : batches)
        list.push_back(ledger::to_record(b));
    return codec::encode({{"batches", std::move(list)}});
}

Response error_response(int status, std::string_view kind, std::string_view message)
{
    return ok(status, {{"error", std::string{kind}}, {"message", std::string{message}}});
}

std::vector<codec::Record> query_readings(const state::MerkleTrie& trie, const std::string& state_root,
    const ReadingQuery& q)
{
    std::vector<codec::Record> out;
    const auto in = [](int64_t v, const std::optional<int64_t>& lo, const std::optional<int64_t>& hi) {
        return (!lo || v >= *lo) && (!hi || v <= *hi);
    };
    trie.for_each(state_root, family::kAirQualityNamespace, [&](const std::string& address, const Bytes& value) {
        family::AirReading r;
        try
        {
            r = family::decode_reading(value);
        }
        catch (const CodecError&)
        {
            return;
        }
        if (!in(r.lat_udeg, q.min_lat, q.max_lat) || !in(r.lon_udeg, q.min_lon, q.max_lon) ||
            !in(r.timestamp_s, q.since, q.until))
            return;
        if ((q.source && r.source_flag != *q.source) || (q.reporter && r.reporter_public_key != *q.reporter))
            return;
        auto rec = family::to_record(r);
        rec["address"] = address;
        out.push_back(std::move(rec));
    });
    return out;
}

codec::Record status_record(const node::ValidatorStatus& s)
{
    auto ztests = codec::Record::array();
    for (const auto& [node_id, z] : s.ztests)
    {
        ztests.push_back({{"node_id", node_id}, {"z_score", format_z(z.z)}, {"flagged", z.flagged ? 1 : 0},
            {"window_rounds", s.poet_rounds}});
    }
    auto wins = codec::Record::object();
    for (const auto& [node_id, count] : s.poet_wins)
        wins[node_id] = count;
    return {
        {"algorithm", std::string{consensus::to_string(s.algorithm)}},
        {"members", s.members},
        {"head_id", s.head_id},
        {"height", s.head_num},
        {"peers", s.peers},
        {"pending", s.pending},
        {"pbft", {{"view", s.pbft_view}, {"view_changes", s.view_changes}}},
        {"raft", {{"term", s.raft_term}, {"role", s.raft_role}, {"leader", s.raft_leader}}},
        {"poet", {{"rounds", s.poet_rounds}, {"wins", std::move(wins)}, {"ztests", std::move(ztests)}}},
    };
}

Api::Api(NodeAccess& node, registry::Registry& registry, ApiConfig config, std::function<int64_t()> clock_s)
  : node_{node}, registry_{registry}, config_{std::move(config)}, clock_s_{std::move(clock_s)}
{
    if (!clock_s_)
    {
        clock_s_ = [] {
            return std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
        };
    }
}

Response Api::handle(const Request& req) const
{
    const auto parts = split_path(req.path);
    try
    {
        if (req.method == "POST" && parts == std::vector<std::string>{"batches"})
            return submit_batches(req);
        if (req.method == "GET" && parts.size() == 1)
        {
            if (parts[0] == "blocks")
                return get_blocks(req);
            if (parts[0] == "readings")
                return get_readings(req);
            if (parts[0] == "peers")
                return get_peers();
            if (parts[0] == "status")
                return get_status();
        }
        if (req.method == "GET" && parts.size() == 2 && parts[0] == "blocks")
            return get_block(parts[1]);
        if (req.method == "GET" && parts.size() == 2 && parts[0] == "state")
            return get_state(parts[1]);
        if (parts.size() == 3 && parts[0] == "accounts" && parts[2] == "keys")
        {
            if (req.method == "POST")
                return issue_key(req, parts[1]);
            if (req.method == "GET")
                return list_keys(req, parts[1]);
        }
        if (req.method == "DELETE" && parts.size() == 2 && parts[0] == "keys")
            return revoke_key(req, parts[1]);
        return error_response(404, "not-found", "no route for " + req.method + " " + req.path);
    }
    catch (const CodecError& e)
    {
        return error_response(400, "bad-request", e.what());
    }
    catch (const ConfigError& e)
    {
        return error_response(400, "bad-request", e.what());
    }
    catch (const NotFoundError& e)
    {
        return error_response(404, "not-found", e.what());
    }
}

Response Api::submit_batches(const Request& req) const
{
    const auto key = header(req, kApiKeyHeader);
    const auto key_status = key.empty() ? registry::KeyStatus::unknown : registry_.check_key(key);

    const auto body = codec::decode(req.body);
    const auto& list = codec::field(body, "batches");
    if (!list.is_array() || list.empty())
        throw CodecError{"batches must be a non-empty list"};
    if (list.size() > config_.max_batches_per_request)
        throw CodecError{"too many batches in one request"};

    auto receipts = codec::Record::array();
    if (key_status != registry::KeyStatus::active)
    {
        const std::string why = "api key " + std::string{to_string(key_status)};
        for (const auto& item : list)
        {
            std::string id;
            if (item.is_object() && item.contains("header_signature") && item["header_signature"].is_string())
                id = item["header_signature"].get<std::string>();
            receipts.push_back(to_record(SubmitReceipt{id, ReceiptStatus::unauthorized, {why}}));
        }
        return ok(401, {{"receipts", std::move(receipts)}});
    }

    bool all_accepted = true;
    for (const auto& item : list)
    {
        SubmitReceipt receipt;
        try
        {
            const auto batch = ledger::batch_from_record(item);
            receipt.batch_id = batch.id();
            receipt.violations = ledger::validate_batch(batch);
            if (receipt.violations.empty())
            {
                const auto r = node_.submit(batch);
                if (r.status == journal::SubmitStatus::rejected)
                    receipt.violations = r.violations;
            }
        }
        catch (const CodecError& e)
        {
            receipt.violations = {e.what()};
        }
        receipt.status = receipt.violations.empty() ? ReceiptStatus::accepted : ReceiptStatus::invalid;
        all_accepted &= receipt.status == ReceiptStatus::accepted;
        receipts.push_back(to_record(receipt));
    }
    return ok(all_accepted ? 202 : 400, {{"receipts", std::move(receipts)}});
}

Response Api::get_blocks(const Request& req) const
{
    const auto limit = int_param(req, "limit").value_or(static_cast<int64_t>(config_.max_page));
    if (limit <= 0 || limit > static_cast<int64_t>(config_.max_page))
        throw CodecError{"limit must lie in [1, " + std::to_string(config_.max_page) + "]"};
    const auto start = int_param(req, "start");
    if (start && *start < 0)
        throw CodecError{"start must be non-negative"};
    codec::Record body;
    node_.read([&](const node::Validator& v) {
        const auto& store = v.journal().store();
        const uint64_t height = store.height();
        uint64_t from = start ? std::min<uint64_t>(static_cast<uint64_t>(*start), height) : height;
        auto blocks = codec::Record::array();
        int64_t n = 0;
        for (;; --from)
        {
            blocks.push_back(block_record(*store.at(from)));
            if (++n == limit || from == 0)
                break;
        }
        body = {{"head", store.head().block_id}, {"blocks", std::move(blocks)}};
        if (from > 0)
            body["next"] = from - 1;
    });
    return ok(200, body);
}

Response Api::get_block(const std::string& id) const
{
    if (!is_digest(id))
        throw CodecError{"block id must be 128 lowercase hex characters"};
    std::optional<codec::Record> found;
    node_.read([&](const node::Validator& v) {
        if (const auto* b = v.journal().store().find(id))
            found = block_record(*b);
    });
    if (!found)
        return error_response(404, "not-found", "no committed block " + id);
    return ok(200, *found);
}

Response Api::get_state(const std::string& address) const
{
    if (!state::is_valid_address(address))
        throw CodecError{"address must be 70 lowercase hex characters"};
    std::optional<Bytes> value;
    std::string head;
    node_.read([&](const node::Validator& v) {
        const auto& j = v.journal();
        head = j.head().block_id;
        value = j.trie().get(j.head().header.state_root_hash, address);
    });
    if (!value)
        return error_response(404, "not-found", "no entry at " + address);
    return ok(200, {{"address", address}, {"data", to_hex(*value)}, {"head", head}});
}

Response Api::get_readings(const Request& req) const
{
    ReadingQuery q;
    q.min_lat = int_param(req, "min_lat");
    q.max_lat = int_param(req, "max_lat");
    q.min_lon = int_param(req, "min_lon");
    q.max_lon = int_param(req, "max_lon");
    q.since = int_param(req, "since");
    q.until = int_param(req, "until");
    if (const auto it = req.query.find("source"); it != req.query.end())
    {
        q.source = family::parse_source_flag(it->second);
        if (!q.source)
            throw CodecError{"unknown source flag " + it->second};
    }
    if (const auto it = req.query.find("reporter"); it != req.query.end())
        q.reporter = it->second;

    std::vector<codec::Record> readings;
    std::string head;
    node_.read([&](const node::Validator& v) {
        const auto& j = v.journal();
        head = j.head().block_id;
        readings = query_readings(j.trie(), j.head().header.state_root_hash, q);
    });
    const auto count = readings.size();
    return ok(200, {{"head", head}, {"count", count}, {"readings", std::move(readings)}});
}

Response Api::get_peers() const
{
    auto peers = codec::Record::array();
    node_.read([&](const node::Validator& v) {
        for (const auto& [node_id, endpoint] : v.peers().peers)
            peers.push_back({{"node_id", node_id}, {"endpoint", endpoint}});
    });
    return ok(200, {{"peers", std::move(peers)}});
}

Response Api::get_status() const
{
    codec::Record body;
    node_.read([&](const node::Validator& v) { body = status_record(v.status()); });
    return ok(200, body);
}

std::optional<Response> Api::check_admin(const Request& req) const
{
    if (config_.admin_token && header(req, kAdminTokenHeader) != *config_.admin_token)
        return error_response(401, "unauthorized", "admin token required");
    return std::nullopt;
}

Response Api::issue_key(const Request& req, const std::string& account_id) const
{
    if (auto denied = check_admin(req))
        return *denied;
    const auto now = clock_s_();
    const auto key = registry_.issue_key(account_id, now);
    return ok(201, {{"account_id", account_id}, {"key", key}, {"status", "active"}, {"issued_at", now}});
}

Response Api::revoke_key(const Request& req, const std::string& key) const
{
    if (auto denied = check_admin(req))
        return *denied;
    registry_.revoke_key(key, clock_s_());
    return ok(200, {{"key", key}, {"status", "revoked"}});
}

Response Api::list_keys(const Request& req, const std::string& account_id) const
{
    if (auto denied = check_admin(req))
        return *denied;
    const auto account = registry_.account(account_id);
    if (!account)
        return error_response(404, "not-found", "no account " + account_id);
    auto keys = codec::Record::array();
    for (const auto& k : account->api_keys)
        keys.push_back({{"key", k.key}, {"status", std::string{to_string(k.status)}}, {"issued_at", k.issued_at}});
    auto flags = codec::Record::array();
    for (const auto& f : account->flags)
    {
        codec::Record rec{{"reason", f.reason}, {"at", f.at}};
        if (f.z_score)
            rec["z_score"] = *f.z_score;
        flags.push_back(std::move(rec));
    }
    return ok(200, {{"account_id", account_id}, {"keys", std::move(keys)}, {"flags", std::move(flags)}});
}
}  // namespace airchain::api
