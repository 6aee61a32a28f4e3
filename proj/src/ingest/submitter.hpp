// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "api/api.hpp"
#include "api/http.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace airchain::ingest
{
/// Posts a request body to a path with an API key. Throws TransportError
/// when the endpoint cannot be reached.
using Poster = std::function<api::HttpResponse(const std::string& path, const std::string& body,
    const std::string& api_key)>;

Poster http_poster(const api::HttpClient& client);

struct RetryPolicy
{
    int retries = 3;
    int64_t initial_backoff_ms = 200;
    int64_t backoff_factor = 2;
    /// Waits between attempts; real sleep when unset.
    std::function<void(int64_t ms)> sleep;
};

struct SubmitOutcome
{
    std::optional<api::SubmitReceipt> receipt;
    /// HTTP status and body of a rejection, verbatim.
    std::optional<int> rejected_status;
    std::string rejected_body;
    /// Message of the last transport failure when every attempt failed.
    std::string transport_error;
    int attempts = 0;

    bool accepted() const noexcept
    {
        return receipt && receipt->status == api::ReceiptStatus::accepted;
    }
};

/// Sends one batch to POST /batches. Transport failures are retried with
/// exponential backoff; HTTP rejections are returned as they came.
SubmitOutcome submit_batch(const ledger::Batch& batch, const std::string& api_key, const Poster& post,
    const RetryPolicy& policy = {});
}  // namespace airchain::ingest
