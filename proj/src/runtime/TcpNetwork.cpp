/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <atmosphere/runtime/Network.hpp>

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/write.hpp>

#include <deque>

namespace atmosphere::runtime {

namespace asio = boost::asio;
using asio::ip::tcp;

namespace {

class TcpConnection : public Connection, public std::enable_shared_from_this<TcpConnection> {
  public:
    explicit TcpConnection(tcp::socket socket) : socket(std::move(socket)) {
        boost::system::error_code ignored;
        this->socket.set_option(tcp::no_delay(true), ignored);
    }

    void start() { readMore(); }

    void send(std::string bytes) override {
        if (!open) return;
        queued += bytes.size();
        outbox.push_back(std::move(bytes));
        if (!writing) writeMore();
    }

    void close() override {
        if (!open) return;
        open = false;
        boost::system::error_code ignored;
        socket.shutdown(tcp::socket::shutdown_both, ignored);
        socket.close(ignored);
        asio::post(socket.get_executor(), [self = shared_from_this()] { self->closed(); });
    }

    bool isOpen() const override { return open; }
    std::size_t queuedBytes() const override { return queued; }

  private:
    void readMore() {
        socket.async_read_some(asio::buffer(buffer), [self = shared_from_this()](auto ec, std::size_t n) {
            if (ec) {
                self->close();
                return;
            }
            self->deliver(std::string_view(self->buffer.data(), n));
            if (self->open) self->readMore();
        });
    }

    void writeMore() {
        if (outbox.empty() || !open) {
            writing = false;
            return;
        }
        writing = true;
        asio::async_write(socket, asio::buffer(outbox.front()), [self = shared_from_this()](auto ec, std::size_t) {
            if (ec) {
                self->writing = false;
                self->close();
                return;
            }
            self->queued -= self->outbox.front().size();
            self->outbox.pop_front();
            self->writeMore();
        });
    }

    tcp::socket socket;
    std::array<char, 64 * 1024> buffer{};
    std::deque<std::string> outbox;
    std::size_t queued = 0;
    bool writing = false;
    bool open = true;
};

}// namespace

struct TcpNetwork::Impl {
    AsioLoop& loop;
    std::map<std::string, std::uint16_t> ports;
    std::string host;
    std::map<std::string, std::shared_ptr<tcp::acceptor>> acceptors;

    void acceptNext(std::shared_ptr<tcp::acceptor> acceptor, AcceptHandler onAccept) {
        acceptor->async_accept([this, acceptor, onAccept](auto ec, tcp::socket socket) {
            if (ec) return;
            auto connection = std::make_shared<TcpConnection>(std::move(socket));
            onAccept(connection);
            connection->start();
            acceptNext(acceptor, onAccept);
        });
    }
};

TcpNetwork::TcpNetwork(AsioLoop& loop, std::map<std::string, std::uint16_t> ports, std::string host)
    : impl(std::make_unique<Impl>(Impl{loop, std::move(ports), std::move(host), {}})) {}

TcpNetwork::~TcpNetwork() {
    for (auto& [endpoint, acceptor] : impl->acceptors) {
        boost::system::error_code ignored;
        acceptor->close(ignored);
    }
}

void TcpNetwork::listen(const std::string& endpoint, AcceptHandler onAccept) {
    auto& io = impl->loop.context();
    const auto port = impl->ports.count(endpoint) ? impl->ports.at(endpoint) : std::uint16_t{0};
    auto acceptor = std::make_shared<tcp::acceptor>(io);
    const tcp::endpoint address(asio::ip::make_address(impl->host), port);
    acceptor->open(address.protocol());
    acceptor->set_option(tcp::acceptor::reuse_address(true));
    acceptor->bind(address);
    acceptor->listen();
    impl->ports[endpoint] = acceptor->local_endpoint().port();
    impl->acceptors[endpoint] = acceptor;
    impl->acceptNext(acceptor, std::move(onAccept));
}

void TcpNetwork::stopListening(const std::string& endpoint) {
    auto it = impl->acceptors.find(endpoint);
    if (it == impl->acceptors.end()) return;
    boost::system::error_code ignored;
    it->second->close(ignored);
    impl->acceptors.erase(it);
}

std::uint16_t TcpNetwork::portOf(const std::string& endpoint) const {
    auto it = impl->ports.find(endpoint);
    return it == impl->ports.end() ? 0 : it->second;
}

void TcpNetwork::connect(const std::string& fromNode, const std::string& endpoint, ConnectHandler onConnect) {
    auto& io = impl->loop.context();
    const auto port = portOf(endpoint);
    if (port == 0) {
        asio::post(io, [onConnect, endpoint] { onConnect(nullptr, "unknown endpoint " + endpoint); });
        return;
    }
    auto socket = std::make_shared<tcp::socket>(io);
    const tcp::endpoint address(asio::ip::make_address(impl->host), port);
    socket->async_connect(address, [this, socket, fromNode, endpoint, onConnect](auto ec) {
        if (ec) {
            onConnect(nullptr, "cannot connect to " + endpoint + ": " + ec.message());
            return;
        }
        registry.record(fromNode, endpoint);
        auto connection = std::make_shared<TcpConnection>(std::move(*socket));
        onConnect(connection, "");
        connection->start();
    });
}

}// namespace atmosphere::runtime
