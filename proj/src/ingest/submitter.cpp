// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ingest/submitter.hpp"
#include "common/error.hpp"

#include <chrono>
#include <thread>

namespace airchain::ingest
{
Poster http_poster(const api::HttpClient& client)
{
    return [&client](const std::string& path, const std::string& body, const std::string& api_key) {
        return client.post(path, body, {{std::string{api::kApiKeyHeader}, api_key}});
    };
}

SubmitOutcome submit_batch(const ledger::Batch& batch, const std::string& api_key, const Poster& post,
    const RetryPolicy& policy)
{
    const auto body = api::encode_batch_list({batch});
    const auto sleep = policy.sleep ? policy.sleep
                                    : [](int64_t ms) { std::this_thread::sleep_for(std::chrono::milliseconds{ms}); };
    SubmitOutcome out;
    int64_t backoff = policy.initial_backoff_ms;
    for (int attempt = 0; attempt <= policy.retries; ++attempt)
    {
        if (attempt > 0)
        {
            sleep(backoff);
            backoff *= policy.backoff_factor;
        }
        ++out.attempts;
        api::HttpResponse res;
        try
        {
            res = post("/batches", body, api_key);
        }
        catch (const TransportError& e)
        {
            out.transport_error = e.what();
            continue;
        }
        out.transport_error.clear();
        try
        {
            const auto rec = codec::decode(res.body);
            const auto& receipts = codec::field(rec, "receipts");
            if (receipts.is_array() && receipts.size() == 1)
                out.receipt = api::receipt_from_record(receipts.front());
        }
        catch (const CodecError&)
        {
        }
        if (res.status != 202)
        {
            out.rejected_status = res.status;
            out.rejected_body = res.body;
        }
        return out;
    }
    return out;
}
}  // namespace airchain::ingest
