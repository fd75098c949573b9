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

#include <atmosphere/runtime/Gateway.hpp>

#include <spdlog/spdlog.h>

#include <set>

namespace atmosphere::runtime {

using agent::AclMessage;

namespace {
constexpr const char* kServiceGroup = "#service";
}

bool isRegistration(const AclMessage& m) {
    return m.performative == agent::Performative::Request && m.receivers.size() == 1 && m.receivers[0] == agent::kAmsAgent &&
           m.stream() == kRegisterStream;
}

struct GatewayServer::Peer {
    ConnectionPtr connection;
    agent::AclFramer framer;
    std::vector<std::string> agents;
};

GatewayServer::GatewayServer(EventLoop& loop, Network& network, std::string endpoint, RunCounters& counters)
    : loop(loop), network(network), address(std::move(endpoint)), counters(counters) {
    agents.registerAgent(agent::kGatewayAgent, kServiceGroup);
}

GatewayServer::~GatewayServer() { stop(); }

void GatewayServer::start() {
    running = true;
    network.listen(address, [this](ConnectionPtr c) { accept(std::move(c)); });
}

void GatewayServer::stop() {
    if (!running) return;
    running = false;
    network.stopListening(address);
    auto all = peers;
    for (auto& [ptr, peer] : all) {
        peer->connection->onData(nullptr);
        peer->connection->onClose(nullptr);
        peer->connection->close();
    }
    peers.clear();
    owner.clear();
}

void GatewayServer::accept(ConnectionPtr connection) {
    auto peer = std::make_shared<Peer>();
    peer->connection = connection;
    peers[peer.get()] = peer;
    std::weak_ptr<Peer> weak = peer;
    connection->onData([this, weak](std::string_view bytes) {
        auto p = weak.lock();
        if (!p) return;
        p->framer.append(bytes);
        while (peers.count(p.get())) {
            std::optional<AclMessage> m;
            try {
                m = p->framer.next();
            } catch (const AtmosphereError& e) {
                spdlog::warn("{}: closing connection after bad frame: {}", address, e.what());
                p->connection->close();
                return;
            }
            if (!m) return;
            handle(p, std::move(*m));
        }
    });
    connection->onClose([this, weak] {
        auto p = weak.lock();
        if (!p) return;
        for (const auto& id : p->agents) {
            if (auto it = owner.find(id); it != owner.end() && it->second == p) {
                owner.erase(it);
                agents.unregisterAgent(id);
            }
        }
        peers.erase(p.get());
    });
}

void GatewayServer::handle(const std::shared_ptr<Peer>& peer, AclMessage message) {
    if (isRegistration(message)) {
        const auto id = message.content.value("agent", std::string());
        const auto group = message.content.value("group", std::string());
        if (id.empty() || id == agent::kGatewayAgent || id == agent::kAmsAgent) {
            ++rejectedMessages;
            spdlog::warn("{}: refusing registration of '{}'", address, id);
            return;
        }
        if (auto it = owner.find(id); it != owner.end()) {
            agents.unregisterAgent(id);
        }
        agents.registerAgent(id, group);
        owner[id] = peer;
        peer->agents.push_back(id);
        return;
    }
    auto it = owner.find(message.sender);
    if (it == owner.end() || it->second != peer) {
        ++rejectedMessages;
        spdlog::warn("{}: message from unregistered agent '{}' dropped", address, message.sender);
        return;
    }
    route(message);
}

void GatewayServer::route(const AclMessage& message) {
    std::vector<std::string> grown;
    try {
        grown = agents.dispatch(message);
    } catch (const agent::UnregisteredSenderError& e) {
        ++rejectedMessages;
        spdlog::warn("{}: {}", address, e.what());
        return;
    }
    std::set<std::string> seen;
    for (const auto& id : grown) {
        if (!seen.insert(id).second) continue;
        auto queued = agents.drain(id);
        if (id == agent::kGatewayAgent) {
            for (const auto& m : queued) serve(m);
            continue;
        }
        auto it = owner.find(id);
        if (it == owner.end()) continue;
        for (auto& m : queued) {
            m.deliveredTo = id;
            ++counters.acl;
            it->second->connection->send(agent::frameAcl(m));
        }
    }
}

void GatewayServer::serve(const AclMessage& message) {
    if (message.performative == agent::Performative::Inform) {
        ++absorbedInforms;
        return;
    }
    ++echoedRequests;
    AclMessage reply;
    reply.performative = agent::Performative::Inform;
    reply.sender = agent::kGatewayAgent;
    reply.receivers = {message.sender};
    reply.content = message.content;
    reply.sentAt = loop.nowMs();
    route(reply);
}

}// namespace atmosphere::runtime
