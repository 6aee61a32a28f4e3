// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "api/http.hpp"
#include "common/error.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>

namespace airchain::api
{
namespace
{
constexpr const char* kContentType = "application/json";

Request to_request(const httplib::Request& in)
{
    Request r;
    r.method = in.method;
    r.path = in.path;
    for (const auto& [k, v] : in.params)
        r.query[k] = v;
    for (const auto& [k, v] : in.headers)
    {
        std::string lower = k;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        r.headers[lower] = v;
    }
    r.body = in.body;
    return r;
}

HttpResponse from_result(const httplib::Result& res, const std::string& what)
{
    if (!res)
        throw TransportError{what + ": " + httplib::to_string(res.error())};
    return {res->status, res->body};
}

httplib::Headers to_headers(const std::map<std::string, std::string>& headers)
{
    httplib::Headers out;
    for (const auto& [k, v] : headers)
        out.emplace(k, v);
    return out;
}
}  // namespace

HttpServer::HttpServer(const Api& api, std::string host, uint16_t port)
  : api_{api}, host_{std::move(host)}, port_{port}
{
}

HttpServer::~HttpServer()
{
    stop();
}

void HttpServer::start()
{
    server_ = std::make_unique<httplib::Server>();
    const auto handler = [this](const httplib::Request& in, httplib::Response& out) {
        const auto r = api_.handle(to_request(in));
        out.status = r.status;
        out.set_content(r.body, kContentType);
    };
    const std::string any = R"(/.*)";
    server_->Get(any, handler);
    server_->Post(any, handler);
    server_->Delete(any, handler);
    server_->set_payload_max_length(4u << 20);
    // Address reuse without port sharing.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });

    if (port_ == 0)
    {
        const int bound = server_->bind_to_any_port(host_);
        if (bound <= 0)
            throw TransportError{"api: cannot bind " + host_};
        port_ = static_cast<uint16_t>(bound);
    }
    else if (!server_->bind_to_port(host_, port_))
        throw TransportError{"api: cannot bind " + host_ + ":" + std::to_string(port_)};
    thread_ = std::thread{[this] { server_->listen_after_bind(); }};
    server_->wait_until_ready();
}

void HttpServer::stop()
{
    if (server_)
        server_->stop();
    if (thread_.joinable())
        thread_.join();
    server_.reset();
}

HttpClient::HttpClient(std::string endpoint, int timeout_ms) : endpoint_{std::move(endpoint)}, timeout_ms_{timeout_ms}
{
    std::string_view e = endpoint_;
    if (e.starts_with("http://"))
        e.remove_prefix(7);
    const auto colon = e.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
        throw ConfigError{"endpoint must be host:port, got " + endpoint_};
    host_ = std::string{e.substr(0, colon)};
    const auto port = e.substr(colon + 1);
    port_ = 0;
    for (const char c : port)
    {
        if (c < '0' || c > '9' || port_ > 65535)
            throw ConfigError{"endpoint port is not a number: " + endpoint_};
        port_ = port_ * 10 + (c - '0');
    }
    if (port_ <= 0 || port_ > 65535)
        throw ConfigError{"endpoint port out of range: " + endpoint_};
}

namespace
{
httplib::Client make_client(const std::string& host, int port, int timeout_ms)
{
    httplib::Client c{host, port};
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    c.set_connection_timeout(sec, usec);
    c.set_read_timeout(sec, usec);
    c.set_write_timeout(sec, usec);
    return c;
}
}  // namespace

HttpResponse HttpClient::get(const std::string& path_and_query) const
{
    auto c = make_client(host_, port_, timeout_ms_);
    return from_result(c.Get(path_and_query), "GET " + endpoint_ + path_and_query);
}

HttpResponse HttpClient::post(const std::string& path, const std::string& body,
    const std::map<std::string, std::string>& headers) const
{
    auto c = make_client(host_, port_, timeout_ms_);
    return from_result(c.Post(path, to_headers(headers), body, kContentType), "POST " + endpoint_ + path);
}

HttpResponse HttpClient::del(const std::string& path, const std::map<std::string, std::string>& headers) const
{
    auto c = make_client(host_, port_, timeout_ms_);
    return from_result(c.Delete(path, to_headers(headers)), "DELETE " + endpoint_ + path);
}
}  // namespace airchain::api
