// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ledger/crypto.hpp"
#include "network/message.hpp"
#include "network/peering.hpp"

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace airchain::network
{
/// Signed, length-prefixed envelopes over TCP. Every callback and every
/// public call after construction runs on the io_context's thread.
class TcpTransport
{
public:
    /// Receives the authenticated sender and the message.
    using Handler = std::function<void(const std::string& from, const MessagePtr&)>;

    TcpTransport(boost::asio::io_context& io, crypto::KeyPair key, Handler handler);
    ~TcpTransport();
    TcpTransport(const TcpTransport&) = delete;
    TcpTransport& operator=(const TcpTransport&) = delete;

    /// Binds and accepts on host:port (0 picks a port) and returns the
    /// bound port. Throws TransportError.
    uint16_t listen(const std::string& host, uint16_t port);

    /// Where to dial each node id.
    void set_directory(const Directory& directory);

    /// Queues `message` for `to`, dialling when no connection is open.
    /// Messages to unknown or unreachable nodes are dropped.
    void send(const std::string& to, const MessagePtr& message);

    size_t open_connections() const noexcept { return connections_.size(); }
    uint64_t rejected_frames() const noexcept { return rejected_; }

    void close();

private:
    struct Connection;
    using ConnectionPtr = std::shared_ptr<Connection>;

    void accept(boost::asio::ip::tcp::acceptor& acceptor);
    void start_read(const ConnectionPtr& c);
    void on_frame(const ConnectionPtr& c, const std::string& body);
    void flush(const ConnectionPtr& c);
    void drop(const ConnectionPtr& c);
    const std::string& encoded(const MessagePtr& message);

    boost::asio::io_context& io_;
    crypto::KeyPair key_;
    Handler handler_;
    std::vector<std::unique_ptr<boost::asio::ip::tcp::acceptor>> acceptors_;
    std::map<std::string, std::string> endpoints_;
    std::map<std::string, ConnectionPtr> by_id_;
    std::vector<ConnectionPtr> connections_;
    MessagePtr last_message_;
    std::string last_frame_;
    uint64_t rejected_ = 0;
    bool closed_ = false;
};
}  // namespace airchain::network
