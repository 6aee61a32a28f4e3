// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "network/tcp.hpp"
#include "common/error.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/write.hpp>

#include <algorithm>
#include <array>
#include <deque>

namespace airchain::network
{
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace
{
constexpr size_t kMaxQueuedFrames = 4096;

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint)
{
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size())
        return {};
    return {endpoint.substr(0, colon), endpoint.substr(colon + 1)};
}
}  // namespace

struct TcpTransport::Connection
{
    explicit Connection(asio::io_context& io) : socket{io}, resolver{io} {}

    tcp::socket socket;
    tcp::resolver resolver;
    std::string peer_id;  ///< empty until the first authenticated frame
    bool connected = false;
    bool writing = false;
    bool dead = false;
    std::deque<std::string> queue;
    FrameReader reader;
    std::array<char, 64 * 1024> buffer{};
};

TcpTransport::TcpTransport(asio::io_context& io, crypto::KeyPair key, Handler handler)
  : io_{io}, key_{std::move(key)}, handler_{std::move(handler)}
{
}

TcpTransport::~TcpTransport()
{
    close();
}

uint16_t TcpTransport::listen(const std::string& host, uint16_t port)
{
    try
    {
        auto acceptor = std::make_unique<tcp::acceptor>(io_);
        const tcp::endpoint ep{asio::ip::make_address(host), port};
        acceptor->open(ep.protocol());
        acceptor->set_option(tcp::acceptor::reuse_address(true));
        acceptor->bind(ep);
        acceptor->listen();
        const auto bound = acceptor->local_endpoint().port();
        accept(*acceptor);
        acceptors_.push_back(std::move(acceptor));
        return bound;
    }
    catch (const boost::system::system_error& e)
    {
        throw TransportError{"tcp: cannot listen on " + host + ":" + std::to_string(port) + ": " + e.what()};
    }
}

void TcpTransport::accept(tcp::acceptor& acceptor)
{
    auto c = std::make_shared<Connection>(io_);
    acceptor.async_accept(c->socket, [this, &acceptor, c](const boost::system::error_code& ec) {
        if (closed_ || ec == asio::error::operation_aborted)
            return;
        if (!ec)
        {
            c->connected = true;
            connections_.push_back(c);
            start_read(c);
        }
        accept(acceptor);
    });
}

void TcpTransport::set_directory(const Directory& directory)
{
    for (const auto& e : directory)
    {
        if (e.node_id != key_.public_key)
            endpoints_[e.node_id] = e.endpoint;
    }
}

const std::string& TcpTransport::encoded(const MessagePtr& message)
{
    if (message != last_message_)
    {
        Message m = *message;
        m.sender = key_.public_key;
        const auto signature = crypto::sign(signing_bytes(m), key_);
        last_frame_ = frame(codec::encode(to_envelope(m, signature)));
        last_message_ = message;
    }
    return last_frame_;
}

void TcpTransport::send(const std::string& to, const MessagePtr& message)
{
    if (closed_ || to == key_.public_key)
        return;
    ConnectionPtr c;
    if (const auto it = by_id_.find(to); it != by_id_.end())
        c = it->second;
    else
    {
        const auto ep = endpoints_.find(to);
        if (ep == endpoints_.end())
            return;
        const auto [host, port] = split_endpoint(ep->second);
        if (host.empty())
            return;
        c = std::make_shared<Connection>(io_);
        c->peer_id = to;
        by_id_[to] = c;
        connections_.push_back(c);
        c->resolver.async_resolve(host, port, [this, c](const boost::system::error_code& ec, tcp::resolver::results_type results) {
            if (ec || c->dead)
                return drop(c);
            asio::async_connect(c->socket, results, [this, c](const boost::system::error_code& ec2, const tcp::endpoint&) {
                if (ec2 || c->dead)
                    return drop(c);
                c->connected = true;
                start_read(c);
                flush(c);
            });
        });
    }
    if (c->queue.size() >= kMaxQueuedFrames)
        return;
    c->queue.push_back(encoded(message));
    flush(c);
}

void TcpTransport::flush(const ConnectionPtr& c)
{
    if (!c->connected || c->writing || c->dead || c->queue.empty())
        return;
    c->writing = true;
    asio::async_write(c->socket, asio::buffer(c->queue.front()), [this, c](const boost::system::error_code& ec, size_t) {
        c->writing = false;
        if (ec)
            return drop(c);
        c->queue.pop_front();
        flush(c);
    });
}

void TcpTransport::start_read(const ConnectionPtr& c)
{
    c->socket.async_read_some(asio::buffer(c->buffer), [this, c](const boost::system::error_code& ec, size_t n) {
        if (ec || c->dead)
            return drop(c);
        try
        {
            c->reader.feed(std::string_view{c->buffer.data(), n});
            while (auto body = c->reader.next())
            {
                on_frame(c, *body);
                if (c->dead)
                    return;
            }
        }
        catch (const TransportError&)
        {
            ++rejected_;
            return drop(c);
        }
        start_read(c);
    });
}

void TcpTransport::on_frame(const ConnectionPtr& c, const std::string& body)
{
    Envelope e;
    try
    {
        e = envelope_from_record(codec::decode(body));
        if (!crypto::verify(signing_bytes(e.message), e.signature, e.message.sender))
            throw CodecError{"bad envelope signature"};
    }
    catch (const Error&)
    {
        ++rejected_;
        return;
    }
    const std::string sender = e.message.sender;
    if (c->peer_id.empty())
    {
        c->peer_id = sender;
        by_id_.try_emplace(sender, c);
    }
    else if (c->peer_id != sender)
    {
        ++rejected_;
        return drop(c);
    }
    handler_(sender, std::make_shared<const Message>(std::move(e.message)));
}

void TcpTransport::drop(const ConnectionPtr& c)
{
    if (c->dead)
        return;
    c->dead = true;
    boost::system::error_code ignored;
    c->socket.close(ignored);
    if (!c->peer_id.empty())
    {
        const auto it = by_id_.find(c->peer_id);
        if (it != by_id_.end() && it->second == c)
            by_id_.erase(it);
    }
    std::erase(connections_, c);
}

void TcpTransport::close()
{
    if (closed_)
        return;
    closed_ = true;
    for (auto& a : acceptors_)
    {
        boost::system::error_code ignored;
        a->close(ignored);
    }
    const auto all = connections_;
    for (const auto& c : all)
        drop(c);
}
}  // namespace airchain::network
