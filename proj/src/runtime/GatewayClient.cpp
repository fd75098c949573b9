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

namespace atmosphere::runtime {

using agent::AclMessage;

GatewayClient::GatewayClient(EventLoop& loop, Network& network, RunCounters& counters, std::string nodeId,
                             std::string endpoint)
    : loop(loop), network(network), counters(counters), nodeId(std::move(nodeId)), endpoint(std::move(endpoint)) {}

GatewayClient::~GatewayClient() {
    *alive = false;
    close();
}

void GatewayClient::start(std::function<void(const std::string&)> onReady) {
    std::weak_ptr<bool> guard = alive;
    connectWithRetry(loop, network, nodeId, endpoint, 50, 100'000, [this, guard, onReady](ConnectionPtr c, const std::string& error) {
        if (guard.expired()) return;
        if (!c) {
            spdlog::error("{}: {}", nodeId, error);
            if (onReady) onReady(error);
            return;
        }
        connection = std::move(c);
        connection->onData([this, guard](std::string_view bytes) {
            if (guard.expired()) return;
            framer.append(bytes);
            while (true) {
                std::optional<AclMessage> m;
                try {
                    m = framer.next();
                } catch (const AtmosphereError& e) {
                    spdlog::error("{}: bad frame from gateway: {}", nodeId, e.what());
                    connection->close();
                    return;
                }
                if (!m) return;
                if (messageHandler) messageHandler(std::move(*m));
            }
        });
        while (!backlog.empty()) {
            transmit(backlog.front());
            backlog.pop_front();
        }
        if (onReady) onReady("");
    });
}

void GatewayClient::registerAgent(const std::string& agentId, const std::string& group) {
    AclMessage m;
    m.performative = agent::Performative::Request;
    m.sender = agentId;
    m.receivers = {agent::kAmsAgent};
    m.content = agent::Json::object();
    m.content["_stream"] = kRegisterStream;
    m.content["agent"] = agentId;
    m.content["group"] = group;
    m.sentAt = loop.nowMs();
    send(m);
}

void GatewayClient::send(const AclMessage& message) {
    if (connection) {
        transmit(message);
    } else {
        backlog.push_back(message);
    }
}

void GatewayClient::transmit(const AclMessage& message) {
    if (!connection->isOpen()) return;
    if (isRegistration(message)) {
        ++counters.control;
    } else {
        ++counters.acl;
    }
    connection->send(agent::frameAcl(message));
}

void GatewayClient::close() {
    if (!connection) return;
    connection->onData(nullptr);
    connection->onClose(nullptr);
    connection->close();
    connection.reset();
}

}// namespace atmosphere::runtime
