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

#ifndef ATMOSPHERE_RUNTIME_GATEWAY_HPP_
#define ATMOSPHERE_RUNTIME_GATEWAY_HPP_

#include <atmosphere/agent/GatewayRegistry.hpp>
#include <atmosphere/runtime/Metrics.hpp>
#include <atmosphere/runtime/Network.hpp>

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <string>

namespace atmosphere::runtime {

inline constexpr const char* kRegisterStream = "Register";

/// True for the registration request an edge sends to `ams` for each of its agents.
bool isRegistration(const agent::AclMessage& message);

/**
 * Agent-platform gateway hosted by a fog node. Edge connections register
 * their agents, then every message is dispatched through the registry. The
 * built-in `gateway` service answers a REQUEST with an INFORM carrying the
 * same content and absorbs INFORMs.
 */
class GatewayServer {
  public:
    GatewayServer(EventLoop& loop, Network& network, std::string endpoint, RunCounters& counters);
    ~GatewayServer();

    void start();
    void stop();

    agent::GatewayRegistry& registry() { return agents; }
    std::uint64_t absorbed() const { return absorbedInforms; }
    std::uint64_t echoed() const { return echoedRequests; }
    std::uint64_t rejected() const { return rejectedMessages; }

  private:
    struct Peer;
    void accept(ConnectionPtr connection);
    void handle(const std::shared_ptr<Peer>& peer, agent::AclMessage message);
    void route(const agent::AclMessage& message);
    void serve(const agent::AclMessage& message);

    EventLoop& loop;
    Network& network;
    std::string address;
    RunCounters& counters;
    agent::GatewayRegistry agents;
    std::map<Peer*, std::shared_ptr<Peer>> peers;
    std::map<std::string, std::shared_ptr<Peer>> owner;// agent id -> connection
    std::uint64_t absorbedInforms = 0;
    std::uint64_t echoedRequests = 0;
    std::uint64_t rejectedMessages = 0;
    bool running = false;
};

/// One edge node's connection to the fog gateway, shared by its agents.
class GatewayClient {
  public:
    GatewayClient(EventLoop& loop, Network& network, RunCounters& counters, std::string nodeId, std::string endpoint);
    ~GatewayClient();

    void start(std::function<void(const std::string& error)> onReady = {});
    void registerAgent(const std::string& agentId, const std::string& group);
    void send(const agent::AclMessage& message);
    void onMessage(std::function<void(agent::AclMessage)> handler) { messageHandler = std::move(handler); }
    bool connected() const { return connection && connection->isOpen(); }
    void close();

  private:
    void transmit(const agent::AclMessage& message);

    EventLoop& loop;
    Network& network;
    RunCounters& counters;
    std::string nodeId;
    std::string endpoint;
    ConnectionPtr connection;
    agent::AclFramer framer;
    std::deque<agent::AclMessage> backlog;
    std::function<void(agent::AclMessage)> messageHandler;
    std::shared_ptr<bool> alive = std::make_shared<bool>(true);
};

}// namespace atmosphere::runtime

#endif// ATMOSPHERE_RUNTIME_GATEWAY_HPP_
