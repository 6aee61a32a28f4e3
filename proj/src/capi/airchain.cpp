// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include <airchain/airchain.h>

#include "api/http.hpp"
#include "common/error.hpp"
#include "consensus/analysis.hpp"
#include "ingest/emulator.hpp"
#include "ingest/submitter.hpp"
#include "ingest/trigger.hpp"
#include "ledger/codec.hpp"
#include "ledger/crypto.hpp"
#include "node/runtime.hpp"
#include "node/simulation.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <ctime>
#include <string>

using namespace airchain;

struct airchain_node
{
    std::unique_ptr<node::NodeRuntime> runtime;
};

namespace
{
thread_local std::string last_error;

airchain_status fail(airchain_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

char* dup(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put(char** out, const std::string& s)
{
    if (out)
        *out = dup(s);
}

template <typename F>
airchain_status guarded(F&& body)
{
    last_error.clear();
    try
    {
        return body();
    }
    catch (const CodecError& e)
    {
        return fail(AIRCHAIN_ERR_CODEC, e.what());
    }
    catch (const CryptoError& e)
    {
        return fail(AIRCHAIN_ERR_CRYPTO, e.what());
    }
    catch (const TrieError& e)
    {
        return fail(AIRCHAIN_ERR_STATE, e.what());
    }
    catch (const ConfigError& e)
    {
        return fail(AIRCHAIN_ERR_CONFIG, e.what());
    }
    catch (const IoError& e)
    {
        return fail(AIRCHAIN_ERR_IO, e.what());
    }
    catch (const TransportError& e)
    {
        return fail(AIRCHAIN_ERR_TRANSPORT, e.what());
    }
    catch (const NotFoundError& e)
    {
        return fail(AIRCHAIN_ERR_NOT_FOUND, e.what());
    }
    catch (const UnauthorizedError& e)
    {
        return fail(AIRCHAIN_ERR_UNAUTHORIZED, e.what());
    }
    catch (const InsufficientDataError& e)
    {
        return fail(AIRCHAIN_ERR_INSUFFICIENT_DATA, e.what());
    }
    catch (const nlohmann::json::exception& e)
    {
        return fail(AIRCHAIN_ERR_INVALID_ARGUMENT, e.what());
    }
    catch (const std::exception& e)
    {
        return fail(AIRCHAIN_ERR_INTERNAL, e.what());
    }
    catch (...)
    {
        return fail(AIRCHAIN_ERR_INTERNAL, "unknown error");
    }
}

#define REQUIRE_ARG(p)                                                                          \
    do                                                                                          \
    {                                                                                           \
        if (!(p))                                                                               \
            return fail(AIRCHAIN_ERR_INVALID_ARGUMENT, std::string{"missing argument: "} + #p); \
    } while (0)

template <typename T>
T opt(const nlohmann::json& j, const char* key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}
}  // namespace

extern "C" {

const char* airchain_version(void)
{
    return "0.1.0";
}

const char* airchain_status_name(airchain_status status)
{
    switch (status)
    {
    case AIRCHAIN_OK: return "ok";
    case AIRCHAIN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AIRCHAIN_ERR_CODEC: return "codec error";
    case AIRCHAIN_ERR_CRYPTO: return "crypto error";
    case AIRCHAIN_ERR_STATE: return "state error";
    case AIRCHAIN_ERR_CONFIG: return "config error";
    case AIRCHAIN_ERR_IO: return "io error";
    case AIRCHAIN_ERR_TRANSPORT: return "transport error";
    case AIRCHAIN_ERR_NOT_FOUND: return "not found";
    case AIRCHAIN_ERR_UNAUTHORIZED: return "unauthorized";
    case AIRCHAIN_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case AIRCHAIN_ERR_REJECTED: return "rejected";
    case AIRCHAIN_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* airchain_last_error(void)
{
    return last_error.c_str();
}

void airchain_string_free(char* s)
{
    std::free(s);
}

airchain_status airchain_keygen(const char* key_file, char** public_key_out)
{
    REQUIRE_ARG(key_file);
    return guarded([&] {
        const auto key = crypto::keypair_generate();
        crypto::save_key_file(key_file, key);
        put(public_key_out, key.public_key);
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_key_public(const char* key_file, char** public_key_out)
{
    REQUIRE_ARG(key_file);
    return guarded([&] {
        put(public_key_out, crypto::load_key_file(key_file).public_key);
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_max_faults(int64_t n, int64_t* out)
{
    REQUIRE_ARG(out);
    return guarded([&] {
        *out = consensus::max_faults(n);
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_sybil_threshold(double n, double* out)
{
    REQUIRE_ARG(out);
    return guarded([&] {
        *out = consensus::sybil_threshold(n);
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_ztest_winrate(int64_t wins, int64_t rounds, int64_t n, double* z_out, int* flagged_out)
{
    return guarded([&] {
        const auto t = consensus::ztest_winrate(wins, rounds, n);
        if (z_out)
            *z_out = t.z;
        if (flagged_out)
            *flagged_out = t.flagged ? 1 : 0;
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_scenario_run(const char* scenario_file, int override_seed, uint64_t seed, int* ok_out,
    char** human_report_out, char** canonical_report_out)
{
    REQUIRE_ARG(scenario_file);
    return guarded([&] {
        auto scenario = node::load_scenario(scenario_file);
        if (override_seed)
            scenario.seed = seed;
        node::Simulation sim{std::move(scenario)};
        const auto report = sim.run();
        if (ok_out)
            *ok_out = report.ok() ? 1 : 0;
        put(human_report_out, node::format_report(report));
        put(canonical_report_out, node::encode_report(report));
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_node_open(const char* config_file, airchain_node** node_out)
{
    REQUIRE_ARG(config_file);
    REQUIRE_ARG(node_out);
    return guarded([&] {
        auto handle = std::make_unique<airchain_node>();
        handle->runtime = std::make_unique<node::NodeRuntime>(node::load_node_config(config_file));
        *node_out = handle.release();
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_node_start(airchain_node* node)
{
    REQUIRE_ARG(node);
    return guarded([&] {
        node->runtime->start();
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_node_stop(airchain_node* node)
{
    REQUIRE_ARG(node);
    return guarded([&] {
        node->runtime->stop();
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_node_info(airchain_node* node, char** info_out)
{
    REQUIRE_ARG(node);
    REQUIRE_ARG(info_out);
    return guarded([&] {
        const auto& rt = *node->runtime;
        codec::Record info = {{"node_id", rt.node_id()}, {"api_port", rt.api_port()},
            {"internal_port", rt.internal_port()}, {"consensus_port", rt.consensus_port()},
            {"running", rt.running() ? 1 : 0}};
        if (rt.running())
        {
            rt.read([&](const node::Validator& v) {
                const auto s = v.status();
                info["head_id"] = s.head_id;
                info["head_num"] = s.head_num;
                info["algorithm"] = std::string{consensus::to_string(s.algorithm)};
                info["peers"] = s.peers;
            });
        }
        *info_out = dup(codec::encode(info));
        return AIRCHAIN_OK;
    });
}

void airchain_node_close(airchain_node* node)
{
    if (!node)
        return;
    try
    {
        node->runtime->stop();
    }
    catch (...)
    {
    }
    delete node;
}

airchain_status airchain_request(const char* endpoint, const char* method, const char* path, const char* body,
    const char* headers, int timeout_ms, int* http_status_out, char** body_out)
{
    REQUIRE_ARG(endpoint);
    REQUIRE_ARG(method);
    REQUIRE_ARG(path);
    return guarded([&] {
        std::map<std::string, std::string> hs;
        if (headers && *headers)
        {
            const auto j = nlohmann::json::parse(headers);
            for (const auto& [k, v] : j.items())
                hs[k] = v.get<std::string>();
        }
        const api::HttpClient client{endpoint, timeout_ms > 0 ? timeout_ms : 5000};
        const std::string m = method;
        api::HttpResponse r;
        if (m == "GET")
            r = client.get(path);
        else if (m == "POST")
            r = client.post(path, body ? body : "", hs);
        else if (m == "DELETE")
            r = client.del(path, hs);
        else
            return fail(AIRCHAIN_ERR_INVALID_ARGUMENT, "unsupported method " + m);
        if (http_status_out)
            *http_status_out = r.status;
        put(body_out, r.body);
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_emulate(const char* options, char** result_out)
{
    REQUIRE_ARG(result_out);
    return guarded([&] {
        const auto o = nlohmann::json::parse(options && *options ? options : "{}");
        ingest::DeviceConfig dc;
        const auto key_file = opt<std::string>(o, "key_file", "");
        dc.key = key_file.empty() ? crypto::keypair_generate() : crypto::load_key_file(key_file);
        dc.seed = opt<uint64_t>(o, "seed", 1);
        dc.lat_udeg = opt<int64_t>(o, "lat_udeg", 0);
        dc.lon_udeg = opt<int64_t>(o, "lon_udeg", 0);
        const auto source = opt<std::string>(o, "source", "citizen");
        const auto flag = family::parse_source_flag(source);
        if (!flag)
            return fail(AIRCHAIN_ERR_INVALID_ARGUMENT, "unknown source " + source);
        dc.source_flag = *flag;
        ingest::Ambient ambient;
        ambient.pm1_0 = opt<int64_t>(o, "pm1_0", 8);
        ambient.pm2_5 = opt<int64_t>(o, "pm2_5", 12);
        ambient.pm10_0 = opt<int64_t>(o, "pm10_0", 20);
        ambient.temp_c = opt<double>(o, "temp_c", 20);
        ambient.humidity_pct = opt<double>(o, "humidity_pct", 50);
        const auto count = opt<int64_t>(o, "count", 10);
        const auto start = opt<int64_t>(o, "start_s", static_cast<int64_t>(std::time(nullptr)));
        const auto interval = opt<int64_t>(o, "interval_s", 6);
        if (count < 0 || interval < 0)
            return fail(AIRCHAIN_ERR_INVALID_ARGUMENT, "count and interval_s must be non-negative");

        ingest::EmulatedDevice device{dc};
        auto readings = codec::Record::array();
        int64_t rejected = 0;
        for (int64_t i = 0; i < count; ++i)
        {
            if (const auto r = device.read(ambient, start + i * interval))
                readings.push_back(family::to_record(*r));
            else
                ++rejected;
        }
        *result_out = dup(codec::encode({{"readings", std::move(readings)}, {"rejected", rejected}}));
        return AIRCHAIN_OK;
    });
}

airchain_status airchain_submit_readings(const char* endpoint, const char* api_key, const char* key_file,
    const char* readings, char** receipt_out)
{
    REQUIRE_ARG(endpoint);
    REQUIRE_ARG(api_key);
    REQUIRE_ARG(key_file);
    REQUIRE_ARG(readings);
    return guarded([&] {
        const auto key = crypto::load_key_file(key_file);
        const auto list = codec::decode(std::string_view{readings});
        if (!list.is_array())
            return fail(AIRCHAIN_ERR_INVALID_ARGUMENT, "readings must be an array");
        std::vector<family::AirReading> rs;
        for (auto rec : list)
        {
            if (rec.is_object() && !rec.contains("reporter_public_key"))
                rec["reporter_public_key"] = key.public_key;
            rs.push_back(family::reading_from_record(rec));
        }
        const auto batch = ingest::make_reading_batch(rs, key);
        const api::HttpClient client{endpoint};
        const auto out = ingest::submit_batch(batch, api_key, ingest::http_poster(client));
        if (out.receipt)
            put(receipt_out, codec::encode(api::to_record(*out.receipt)));
        if (out.accepted())
            return AIRCHAIN_OK;
        if (out.rejected_status)
        {
            return fail(*out.rejected_status == 401 ? AIRCHAIN_ERR_UNAUTHORIZED : AIRCHAIN_ERR_REJECTED,
                "HTTP " + std::to_string(*out.rejected_status) + ": " + out.rejected_body);
        }
        if (!out.transport_error.empty())
            return fail(AIRCHAIN_ERR_TRANSPORT, out.transport_error);
        return fail(AIRCHAIN_ERR_REJECTED, "batch not accepted");
    });
}
}
