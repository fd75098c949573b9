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

#ifndef ATMOSPHERE_RUNTIME_NETWORK_HPP_
#define ATMOSPHERE_RUNTIME_NETWORK_HPP_

#include <atmosphere/runtime/EventLoop.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace atmosphere::runtime {

/// Node part of an endpoint name such as "f1:mqtt".
std::string nodeOfEndpoint(const std::string& endpoint);

/// A reliable, ordered byte channel between two nodes.
class Connection {
  public:
    using DataHandler = std::function<void(std::string_view)>;
    using CloseHandler = std::function<void()>;

    virtual ~Connection() = default;
    /// One call carries one protocol frame.
    virtual void send(std::string bytes) = 0;
    virtual void close() = 0;
    virtual bool isOpen() const = 0;
    virtual std::size_t queuedBytes() const { return 0; }

    void onData(DataHandler handler) { dataHandler = std::move(handler); }
    void onClose(CloseHandler handler) { closeHandler = std::move(handler); }

  protected:
    void deliver(std::string_view bytes) {
        if (dataHandler) dataHandler(bytes);
    }
    void closed() {
        if (auto handler = std::exchange(closeHandler, nullptr)) handler();
        dataHandler = nullptr;
    }

  private:
    DataHandler dataHandler;
    CloseHandler closeHandler;
};

using ConnectionPtr = std::shared_ptr<Connection>;
using AcceptHandler = std::function<void(ConnectionPtr)>;
/// Receives a null connection and an error text on failure.
using ConnectHandler = std::function<void(ConnectionPtr, const std::string&)>;

struct ConnectionRecord {
    std::string fromNode;
    std::string toNode;
    std::string endpoint;
};

/// Every connection ever established during a run.
class ConnectionRegistry {
  public:
    void record(const std::string& fromNode, const std::string& endpoint);
    std::vector<ConnectionRecord> all() const;

  private:
    mutable std::mutex mutex;
    std::vector<ConnectionRecord> records;
};

class Network {
  public:
    virtual ~Network() = default;
    virtual void listen(const std::string& endpoint, AcceptHandler onAccept) = 0;
    virtual void stopListening(const std::string& endpoint) = 0;
    virtual void connect(const std::string& fromNode, const std::string& endpoint, ConnectHandler onConnect) = 0;
    ConnectionRegistry& connections() { return registry; }

  protected:
    ConnectionRegistry registry;
};

/// Retries a refused connection up to `attempts` times, `delayUs` apart.
void connectWithRetry(EventLoop& loop, Network& network, const std::string& fromNode, const std::string& endpoint,
                      int attempts, std::int64_t delayUs, ConnectHandler onConnect);

struct LinkProfile {
    std::int64_t latencyUs = 0;
    /// Probability that one send is silently lost.
    double lossRate = 0.0;
};

/// In-process links over an EventLoop with constant latency and seeded loss.
class SimNetwork : public Network {
  public:
    SimNetwork(EventLoop& loop, std::uint64_t seed = 1, LinkProfile defaults = {});

    void listen(const std::string& endpoint, AcceptHandler onAccept) override;
    void stopListening(const std::string& endpoint) override;
    void connect(const std::string& fromNode, const std::string& endpoint, ConnectHandler onConnect) override;

    /// Overrides the profile of every connection to `endpoint`, effective for later sends.
    void setProfile(const std::string& endpoint, LinkProfile profile);
    LinkProfile profileFor(const std::string& endpoint) const;
    std::uint64_t dropped() const { return droppedSends; }

  private:
    class SimConnection;
    friend class SimConnection;
    bool lose(double rate);

    EventLoop& loop;
    std::mt19937_64 rng;
    LinkProfile defaults;
    std::map<std::string, LinkProfile> profiles;
    std::map<std::string, AcceptHandler> listeners;
    std::uint64_t droppedSends = 0;
};


/// Loopback TCP. Endpoints map to ports; port 0 binds an ephemeral port.
class TcpNetwork : public Network {
  public:
    explicit TcpNetwork(AsioLoop& loop, std::map<std::string, std::uint16_t> ports = {}, std::string host = "127.0.0.1");
    ~TcpNetwork() override;

    void listen(const std::string& endpoint, AcceptHandler onAccept) override;
    void stopListening(const std::string& endpoint) override;
    void connect(const std::string& fromNode, const std::string& endpoint, ConnectHandler onConnect) override;

    std::uint16_t portOf(const std::string& endpoint) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl;
};

}// namespace atmosphere::runtime

#endif// ATMOSPHERE_RUNTIME_NETWORK_HPP_
