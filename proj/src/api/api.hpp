// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "family/airquality.hpp"
#include "journal/journal.hpp"
#include "ledger/codec.hpp"
#include "node/validator.hpp"
#include "registry/registry.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace airchain::api
{
inline constexpr uint16_t kDefaultApiPort = 8008;
inline constexpr uint16_t kDefaultValidatorPort = 4004;
inline constexpr uint16_t kDefaultConsensusPort = 5050;

inline constexpr std::string_view kApiKeyHeader = "x-api-key";
inline constexpr std::string_view kAdminTokenHeader = "x-admin-token";

enum class ReceiptStatus
{
    accepted,
    invalid,
    unauthorized,
};

std::string_view to_string(ReceiptStatus s) noexcept;

struct SubmitReceipt
{
    std::string batch_id;
    ReceiptStatus status = ReceiptStatus::invalid;
    std::vector<std::string> violations;
};

codec::Record to_record(const SubmitReceipt& r);
SubmitReceipt receipt_from_record(const codec::Record& r);

/// POST /batches body.
std::string encode_batch_list(const std::vector<ledger::Batch>& batches);

struct Request
{
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    /// Header names in lower case.
    std::map<std::string, std::string> headers;
    std::string body;
};

struct Response
{
    int status = 200;
    /// Canonical record text.
    std::string body;
};

/// The node behind the API. `read` runs `fn` against a consistent view;
/// `submit` hands a structurally valid batch to the validator.
class NodeAccess
{
public:
    virtual ~NodeAccess() = default;
    virtual void read(const std::function<void(const node::Validator&)>& fn) const = 0;
    virtual journal::SubmitResult submit(const ledger::Batch& batch) = 0;
};

struct ApiConfig
{
    /// When set, key administration requires this value in X-Admin-Token.
    std::optional<std::string> admin_token;
    size_t max_page = 100;
    size_t max_batches_per_request = 100;
};

/// Filters for GET /readings. Bounds are inclusive.
struct ReadingQuery
{
    std::optional<int64_t> min_lat, max_lat, min_lon, max_lon;
    std::optional<int64_t> since, until;
    std::optional<family::SourceFlag> source;
    std::optional<std::string> reporter;
};

/// Decoded readings committed under `state_root` that pass `q`, in address
/// order, each with its "address".
std::vector<codec::Record> query_readings(const state::MerkleTrie& trie, const std::string& state_root,
    const ReadingQuery& q);

codec::Record status_record(const node::ValidatorStatus& s);

/// Request handlers for the REST surface. Thread-safe when the NodeAccess
/// and Registry are.
class Api
{
public:
    Api(NodeAccess& node, registry::Registry& registry, ApiConfig config = {},
        std::function<int64_t()> clock_s = {});

    Response handle(const Request& req) const;

private:
    Response submit_batches(const Request& req) const;
    Response get_blocks(const Request& req) const;
    Response get_block(const std::string& id) const;
    Response get_state(const std::string& address) const;
    Response get_readings(const Request& req) const;
    Response get_peers() const;
    Response get_status() const;
    Response issue_key(const Request& req, const std::string& account_id) const;
    Response revoke_key(const Request& req, const std::string& key) const;
    Response list_keys(const Request& req, const std::string& account_id) const;
    std::optional<Response> check_admin(const Request& req) const;

    NodeAccess& node_;
    registry::Registry& registry_;
    ApiConfig config_;
    std::function<int64_t()> clock_s_;
};

Response error_response(int status, std::string_view kind, std::string_view message);
}  // namespace airchain::api
