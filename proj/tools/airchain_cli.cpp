// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include <airchain/airchain.h>

#include <CLI11.hpp>

#include <cctype>
#include <csignal>
#include <pthread.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace
{
enum Exit : int
{
    kOk = 0,
    kViolation = 1,
    kUsage = 2,
    kRuntime = 3,
};

struct Owned
{
    char* p = nullptr;
    ~Owned() { airchain_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

int report(airchain_status s)
{
    std::cerr << "error: " << airchain_status_name(s);
    if (*airchain_last_error())
        std::cerr << ": " << airchain_last_error();
    std::cerr << "\n";
    switch (s)
    {
    case AIRCHAIN_OK: return kOk;
    case AIRCHAIN_ERR_INVALID_ARGUMENT:
    case AIRCHAIN_ERR_CONFIG:
    case AIRCHAIN_ERR_CODEC: return kUsage;
    default: return kRuntime;
    }
}

int http_exit(int status, const std::string& body)
{
    if (status < 400)
    {
        std::cout << body << "\n";
        return kOk;
    }
    std::cerr << "HTTP " << status << ": " << body << "\n";
    return status == 400 ? kUsage : kRuntime;
}

std::string read_text(const std::string& path)
{
    if (path == "-")
        return {std::istreambuf_iterator<char>{std::cin}, {}};
    std::ifstream in{path};
    if (!in)
        throw CLI::ValidationError{"cannot read " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string url_encode(const std::string& s)
{
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s)
    {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~')
            out += static_cast<char>(c);
        else
        {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

int request(const std::string& endpoint, const char* method, const std::string& path, const std::string& body,
    const std::string& headers)
{
    int status = 0;
    Owned out;
    const auto s = airchain_request(endpoint.c_str(), method, path.c_str(), body.c_str(),
        headers.empty() ? nullptr : headers.c_str(), 10000, &status, &out.p);
    if (s != AIRCHAIN_OK)
        return report(s);
    return http_exit(status, out.str());
}

volatile std::sig_atomic_t stop_requested = 0;
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"AirChain node and operator tool"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string{airchain_version()});

    // keygen
    auto* keygen = app.add_subcommand("keygen", "Write a new key file");
    std::string key_file;
    bool force = false;
    keygen->add_option("--key-file", key_file, "Output path")->required();
    keygen->add_flag("--force", force, "Overwrite an existing file");

    // run-node
    auto* run_node = app.add_subcommand("run-node", "Run a validator until SIGINT or SIGTERM");
    std::string config_file;
    run_node->add_option("--config", config_file, "Node config file (falls back to $AIRCHAIN_CONFIG)");

    // scenario
    auto* scenario = app.add_subcommand("scenario", "Run a simulation scenario");
    std::string scenario_file;
    std::optional<uint64_t> seed;
    bool json = false;
    scenario->add_option("--scenario", scenario_file, "Scenario file")->required();
    scenario->add_option("--seed", seed, "Replace the scenario seed");
    scenario->add_flag("--json", json, "Print the canonical report");

    // emulate
    auto* emulate = app.add_subcommand("emulate", "Emulate a sensor and print calibrated readings");
    std::string emulate_key;
    uint64_t emulate_seed = 1;
    int64_t count = 10, lat = 0, lon = 0, pm1 = 8, pm25 = 12, pm10 = 20, interval = 6;
    std::optional<int64_t> start;
    std::string source = "citizen";
    double temp = 20, humidity = 50;
    const auto add_device_options = [&](CLI::App* sub) {
        sub->add_option("--seed", emulate_seed, "Noise seed");
        sub->add_option("--count", count, "Number of samples");
        sub->add_option("--lat", lat, "Latitude in microdegrees");
        sub->add_option("--lon", lon, "Longitude in microdegrees");
        sub->add_option("--source", source, "citizen, government, institutional or other");
        sub->add_option("--pm1", pm1, "True PM1.0");
        sub->add_option("--pm25", pm25, "True PM2.5");
        sub->add_option("--pm10", pm10, "True PM10");
        sub->add_option("--temp", temp, "Ambient temperature in C");
        sub->add_option("--humidity", humidity, "Relative humidity in percent");
        sub->add_option("--start", start, "Timestamp of the first sample (default now)");
        sub->add_option("--interval", interval, "Seconds between samples");
    };
    emulate->add_option("--key-file", emulate_key, "Reporter key (default: a throwaway key)");
    add_device_options(emulate);

    // submit
    auto* submit = app.add_subcommand("submit", "Sign readings into a batch and post it");
    std::string endpoint = "127.0.0.1:8008";
    std::string api_key;
    std::string readings_file;
    submit->add_option("--endpoint", endpoint, "Node API host:port");
    submit->add_option("--api-key", api_key, "API key")->required();
    submit->add_option("--key-file", key_file, "Reporter key file")->required();
    submit->add_option("--readings", readings_file, "JSON array of readings, or - for stdin (default: emulate)");
    add_device_options(submit);

    // query
    auto* query = app.add_subcommand("query", "Read from a node API");
    std::string target;
    std::string target_arg;
    std::optional<int64_t> limit;
    std::string block_start;
    std::optional<int64_t> min_lat, max_lat, min_lon, max_lon, since, until;
    std::string source_filter, reporter;
    query->add_option("--endpoint", endpoint, "Node API host:port");
    query->add_option("target", target, "blocks, block, state, readings, peers or status")
        ->required()
        ->check(CLI::IsMember({"blocks", "block", "state", "readings", "peers", "status"}));
    query->add_option("id", target_arg, "Block id or state address");
    query->add_option("--limit", limit, "Page size for blocks");
    query->add_option("--start", block_start, "Block number to page down from");
    query->add_option("--min-lat", min_lat);
    query->add_option("--max-lat", max_lat);
    query->add_option("--min-lon", min_lon);
    query->add_option("--max-lon", max_lon);
    query->add_option("--since", since);
    query->add_option("--until", until);
    query->add_option("--source", source_filter);
    query->add_option("--reporter", reporter);

    // key issue / revoke / list
    auto* key = app.add_subcommand("key", "Administer API keys");
    key->require_subcommand(1);
    std::string account, admin_token, revoke_target;
    if (const char* t = std::getenv("AIRCHAIN_ADMIN_TOKEN"))
        admin_token = t;
    auto* key_issue = key->add_subcommand("issue", "Issue a key for an account");
    key_issue->add_option("--endpoint", endpoint, "Node API host:port");
    key_issue->add_option("--account", account, "Account id (lowercase hex)")->required();
    key_issue->add_option("--admin-token", admin_token, "Admin token");
    auto* key_revoke = key->add_subcommand("revoke", "Revoke a key");
    key_revoke->add_option("--endpoint", endpoint, "Node API host:port");
    key_revoke->add_option("key", revoke_target, "Key to revoke")->required();
    key_revoke->add_option("--admin-token", admin_token, "Admin token");
    auto* key_list = key->add_subcommand("list", "List an account's keys");
    key_list->add_option("--endpoint", endpoint, "Node API host:port");
    key_list->add_option("--account", account, "Account id (lowercase hex)")->required();
    key_list->add_option("--admin-token", admin_token, "Admin token");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const auto device_options = [&](const std::string& key_path) {
        std::ostringstream o;
        o << "{\"seed\":" << emulate_seed << ",\"count\":" << count << ",\"lat_udeg\":" << lat
          << ",\"lon_udeg\":" << lon << ",\"source\":" << quote(source) << ",\"pm1_0\":" << pm1
          << ",\"pm2_5\":" << pm25 << ",\"pm10_0\":" << pm10 << ",\"temp_c\":" << temp
          << ",\"humidity_pct\":" << humidity << ",\"interval_s\":" << interval;
        if (start)
            o << ",\"start_s\":" << *start;
        if (!key_path.empty())
            o << ",\"key_file\":" << quote(key_path);
        o << "}";
        return o.str();
    };
    const auto admin_headers = [&] {
        return admin_token.empty() ? std::string{} : "{\"x-admin-token\":" + quote(admin_token) + "}";
    };

    try
    {
        if (*keygen)
        {
            if (!force && std::filesystem::exists(key_file))
            {
                std::cerr << "error: " << key_file << " exists; pass --force to overwrite\n";
                return kUsage;
            }
            Owned pub;
            if (const auto s = airchain_keygen(key_file.c_str(), &pub.p); s != AIRCHAIN_OK)
                return report(s);
            std::cout << pub.str() << "\n";
            return kOk;
        }

        if (*run_node)
        {
            if (config_file.empty())
            {
                if (const char* env = std::getenv("AIRCHAIN_CONFIG"))
                    config_file = env;
            }
            if (config_file.empty())
            {
                std::cerr << "error: pass --config or set AIRCHAIN_CONFIG\n";
                return kUsage;
            }
            sigset_t signals;
            sigemptyset(&signals);
            sigaddset(&signals, SIGINT);
            sigaddset(&signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &signals, nullptr);

            airchain_node* node = nullptr;
            if (const auto s = airchain_node_open(config_file.c_str(), &node); s != AIRCHAIN_OK)
                return report(s);
            std::unique_ptr<airchain_node, void (*)(airchain_node*)> guard{node, airchain_node_close};
            if (const auto s = airchain_node_start(node); s != AIRCHAIN_OK)
                return report(s);
            Owned info;
            if (airchain_node_info(node, &info.p) == AIRCHAIN_OK)
                std::cout << info.str() << std::endl;
            int received = 0;
            sigwait(&signals, &received);
            if (const auto s = airchain_node_stop(node); s != AIRCHAIN_OK)
                return report(s);
            std::cerr << "stopped\n";
            return kOk;
        }

        if (*scenario)
        {
            int ok = 0;
            Owned human, canonical;
            const auto s = airchain_scenario_run(scenario_file.c_str(), seed ? 1 : 0, seed.value_or(0), &ok,
                &human.p, &canonical.p);
            if (s != AIRCHAIN_OK)
                return report(s);
            std::cout << (json ? canonical.str() : human.str()) << "\n";
            return ok ? kOk : kViolation;
        }

        if (*emulate)
        {
            Owned out;
            if (const auto s = airchain_emulate(device_options(emulate_key).c_str(), &out.p); s != AIRCHAIN_OK)
                return report(s);
            std::cout << out.str() << "\n";
            return kOk;
        }

        if (*submit)
        {
            std::string readings;
            if (!readings_file.empty())
                readings = read_text(readings_file);
            else
            {
                Owned out;
                if (const auto s = airchain_emulate(device_options(key_file).c_str(), &out.p); s != AIRCHAIN_OK)
                    return report(s);
                const auto text = out.str();
                const auto open = text.find('[');
                const auto close = text.rfind(']');
                readings = text.substr(open, close - open + 1);
            }
            Owned receipt;
            const auto s = airchain_submit_readings(endpoint.c_str(), api_key.c_str(), key_file.c_str(),
                readings.c_str(), &receipt.p);
            if (receipt.p)
                std::cout << receipt.str() << "\n";
            return s == AIRCHAIN_OK ? kOk : report(s);
        }

        if (*query)
        {
            std::string path;
            if (target == "blocks")
            {
                path = "/blocks";
                std::string sep = "?";
                if (limit)
                {
                    path += sep + "limit=" + std::to_string(*limit);
                    sep = "&";
                }
                if (!block_start.empty())
                    path += sep + "start=" + url_encode(block_start);
            }
            else if (target == "block" || target == "state")
            {
                if (target_arg.empty())
                {
                    std::cerr << "error: query " << target << " needs an id\n";
                    return kUsage;
                }
                path = (target == "block" ? "/blocks/" : "/state/") + url_encode(target_arg);
            }
            else if (target == "readings")
            {
                path = "/readings";
                std::string sep = "?";
                const auto add = [&](const char* name, const std::string& value) {
                    path += sep + name + "=" + url_encode(value);
                    sep = "&";
                };
                const auto add_int = [&](const char* name, const std::optional<int64_t>& v) {
                    if (v)
                        add(name, std::to_string(*v));
                };
                add_int("min_lat", min_lat);
                add_int("max_lat", max_lat);
                add_int("min_lon", min_lon);
                add_int("max_lon", max_lon);
                add_int("since", since);
                add_int("until", until);
                if (!source_filter.empty())
                    add("source", source_filter);
                if (!reporter.empty())
                    add("reporter", reporter);
            }
            else
                path = "/" + target;
            return request(endpoint, "GET", path, "", "");
        }

        if (*key_issue)
            return request(endpoint, "POST", "/accounts/" + url_encode(account) + "/keys", "{}", admin_headers());
        if (*key_list)
            return request(endpoint, "GET", "/accounts/" + url_encode(account) + "/keys", "", admin_headers());
        if (*key_revoke)
            return request(endpoint, "DELETE", "/keys/" + url_encode(revoke_target), "", admin_headers());
    }
    catch (const CLI::Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
