// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "api/api.hpp"

#include <map>
#include <memory>
#include <string>
#include <thread>

namespace httplib
{
class Server;
}

namespace airchain::api
{
/// Serves an Api over HTTP on a background thread.
class HttpServer
{
public:
    HttpServer(const Api& api, std::string host, uint16_t port);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and starts serving. Throws TransportError when the port cannot
    /// be bound. Port 0 picks a free port.
    void start();
    void stop();
    uint16_t port() const noexcept { return port_; }

private:
    const Api& api_;
    std::string host_;
    uint16_t port_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

struct HttpResponse
{
    int status = 0;
    std::string body;
};

/// Blocking client for one endpoint, "host:port" or "http://host:port".
/// Every call throws TransportError when no response arrives.
class HttpClient
{
public:
    explicit HttpClient(std::string endpoint, int timeout_ms = 5000);

    HttpResponse get(const std::string& path_and_query) const;
    HttpResponse post(const std::string& path, const std::string& body,
        const std::map<std::string, std::string>& headers = {}) const;
    HttpResponse del(const std::string& path, const std::map<std::string, std::string>& headers = {}) const;

    const std::string& endpoint() const noexcept { return endpoint_; }

private:
    std::string endpoint_;
    std::string host_;
    int port_ = 0;
    int timeout_ms_;
};
}  // namespace airchain::api
