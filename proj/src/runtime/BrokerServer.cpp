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

#include <atmosphere/runtime/Mqtt.hpp>

#include <spdlog/spdlog.h>

namespace atmosphere::runtime {

void sendPacket(Connection& connection, const mqtt::Packet& packet, RunCounters& counters) {
    const auto bytes = mqtt::encodePacket(packet);
    counters.countPacket(mqtt::typeOf(packet));
    connection.send(std::string(bytes.begin(), bytes.end()));
}

struct BrokerServer::Client {
    ConnectionPtr connection;
    mqtt::PacketFramer framer;
    std::string clientId;
};

BrokerServer::BrokerServer(EventLoop& loop, Network& network, std::string endpoint, RunCounters& counters,
                           mqtt::BrokerConfig config)
    : loop(loop), network(network), address(std::move(endpoint)), counters(counters), broker(std::move(config)) {}

BrokerServer::~BrokerServer() { stop(); }

void BrokerServer::start() {
    running = true;
    network.listen(address, [this](ConnectionPtr c) { accept(std::move(c)); });
}

void BrokerServer::stop() {
    if (!running) return;
    running = false;
    network.stopListening(address);
    if (retransmitTimer) loop.cancel(*retransmitTimer);
    retransmitTimer.reset();
    auto all = clients;
    for (auto& [ptr, client] : all) {
        client->connection->onClose(nullptr);
        client->connection->onData(nullptr);
        client->connection->close();
    }
    clients.clear();
    byId.clear();
}

void BrokerServer::accept(ConnectionPtr connection) {
    auto client = std::make_shared<Client>();
    client->connection = connection;
    clients[client.get()] = client;
    std::weak_ptr<Client> weak = client;
    connection->onData([this, weak](std::string_view bytes) {
        if (auto c = weak.lock()) receive(c, bytes);
    });
    connection->onClose([this, weak] {
        if (auto c = weak.lock()) forget(c);
    });
}

void BrokerServer::forget(const std::shared_ptr<Client>& client) {
    if (!client->clientId.empty()) {
        auto it = byId.find(client->clientId);
        if (it != byId.end() && it->second == client) {
            byId.erase(it);
            broker.disconnect(client->clientId);
        }
    }
    clients.erase(client.get());
}

void BrokerServer::receive(const std::shared_ptr<Client>& client, std::string_view bytes) {
    client->framer.append(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
    while (clients.count(client.get())) {
        std::optional<mqtt::Packet> packet;
        try {
            packet = client->framer.next();
        } catch (const AtmosphereError& e) {
            spdlog::warn("{}: closing client '{}' after malformed packet: {}", address, client->clientId, e.what());
            client->connection->close();
            return;
        }
        if (!packet) return;
        const auto nowMs = loop.nowMs();
        if (client->clientId.empty()) {
            const auto* connect = std::get_if<mqtt::Connect>(&*packet);
            if (!connect) {
                client->connection->close();
                return;
            }
            auto result = broker.connect(*connect, nowMs);
            if (result.accepted) {
                if (auto old = byId.find(result.clientId); old != byId.end() && old->second != client) {
                    old->second->clientId.clear();
                    old->second->connection->close();
                }
                client->clientId = result.clientId;
                byId[result.clientId] = client;
                for (auto& a : result.actions) {
                    if (std::holds_alternative<mqtt::action::Drop>(a)) continue;
                    execute({std::move(a)});
                }
            } else {
                for (auto& a : result.actions) {
                    if (auto* send = std::get_if<mqtt::action::Send>(&a)) sendPacket(*client->connection, send->packet, counters);
                }
                client->connection->close();
                return;
            }
            continue;
        }
        execute(broker.handlePacket(client->clientId, *packet, nowMs));
    }
}

void BrokerServer::execute(std::vector<mqtt::Action> actions) {
    for (auto& a : actions) {
        if (auto* send = std::get_if<mqtt::action::Send>(&a)) {
            auto it = byId.find(send->clientId);
            if (it != byId.end()) sendPacket(*it->second->connection, send->packet, counters);
        } else if (auto* drop = std::get_if<mqtt::action::Drop>(&a)) {
            auto it = byId.find(drop->clientId);
            if (it != byId.end()) {
                ++drops;
                const auto level = drop->reason == "client disconnected" ? spdlog::level::info : spdlog::level::warn;
                spdlog::log(level, "{}: dropping client '{}': {}", address, drop->clientId, drop->reason);
                auto client = it->second;
                byId.erase(it);
                broker.disconnect(drop->clientId);
                client->clientId.clear();
                client->connection->close();
            }
        } else if (auto* local = std::get_if<mqtt::action::LocalDeliver>(&a)) {
            auto it = localHandlers.find(local->subscriberId);
            if (it != localHandlers.end()) it->second(local->topic, local->payload);
        }
    }
    armRetransmit();
}

void BrokerServer::armRetransmit() {
    if (!running) return;
    auto deadline = broker.nextRetransmitDeadline();
    if (!deadline) {
        if (retransmitTimer) loop.cancel(*retransmitTimer);
        retransmitTimer.reset();
        return;
    }
    if (retransmitTimer && retransmitAtMs <= *deadline) return;
    if (retransmitTimer) loop.cancel(*retransmitTimer);
    retransmitAtMs = *deadline;
    retransmitTimer = loop.schedule((*deadline - loop.nowMs()) * 1000, [this] {
        retransmitTimer.reset();
        execute(broker.retransmitTick(loop.nowMs()));
    });
}

void BrokerServer::subscribeLocal(const std::string& subscriberId, const std::string& filter, MessageHandler handler) {
    broker.subscribeLocal(subscriberId, filter);
    localHandlers[subscriberId] = std::move(handler);
}

void BrokerServer::publishLocal(const std::string& topic, std::string payload, std::uint8_t qos) {
    execute(broker.publishLocal(topic, std::move(payload), qos, loop.nowMs()));
}

std::size_t BrokerServer::queuedBytes() const {
    std::size_t total = 0;
    for (const auto& [ptr, client] : clients) total += client->connection->queuedBytes();
    return total;
}

}// namespace atmosphere::runtime
