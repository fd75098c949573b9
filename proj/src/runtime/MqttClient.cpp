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

namespace {
constexpr std::int64_t kDuplicateWindowMs = 30'000;
}

MqttClient::MqttClient(EventLoop& loop, Network& network, RunCounters& counters, MqttClientOptions options)
    : loop(loop), network(network), counters(counters), options(std::move(options)) {}

MqttClient::~MqttClient() {
    *alive = false;
    if (retransmitTimer) loop.cancel(*retransmitTimer);
    if (connection) {
        connection->onData(nullptr);
        connection->onClose(nullptr);
        connection->close();
    }
}

void MqttClient::start(std::function<void(const std::string&)> onReady) {
    readyHandler = std::move(onReady);
    std::weak_ptr<bool> guard = alive;
    connectWithRetry(loop, network, options.nodeId, options.endpoint, options.connectAttempts, options.connectRetryUs,
                     [this, guard](ConnectionPtr c, const std::string& error) {
                         if (guard.expired()) return;
                         if (!c) {
                             spdlog::error("{}: {}", options.clientId, error);
                             if (readyHandler) readyHandler(error);
                             return;
                         }
                         attach(std::move(c));
                     });
}

void MqttClient::attach(ConnectionPtr c) {
    connection = std::move(c);
    std::weak_ptr<bool> guard = alive;
    connection->onData([this, guard](std::string_view bytes) {
        if (!guard.expired()) receive(bytes);
    });
    connection->onClose([this, guard] {
        if (guard.expired()) return;
        if (ready) spdlog::warn("{}: connection to {} closed", options.clientId, options.endpoint);
        ready = false;
    });
    mqtt::Connect connect;
    connect.clientId = options.clientId;
    sendPacket(*connection, connect, counters);
}

void MqttClient::receive(std::string_view bytes) {
    framer.append(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
    while (connection) {
        std::optional<mqtt::Packet> packet;
        try {
            packet = framer.next();
        } catch (const AtmosphereError& e) {
            spdlog::error("{}: malformed packet from broker: {}", options.clientId, e.what());
            connection->close();
            return;
        }
        if (!packet) return;
        if (const auto* ack = std::get_if<mqtt::ConnAck>(&*packet)) {
            if (ack->returnCode != 0) {
                if (readyHandler) readyHandler("connection refused with code " + std::to_string(ack->returnCode));
                return;
            }
            ready = true;
            while (!backlog.empty()) {
                auto next = std::move(backlog.front());
                backlog.pop_front();
                if (auto* p = std::get_if<mqtt::Publish>(&next)) {
                    transmit(std::move(*p));
                } else {
                    sendNow(next);
                }
            }
            if (readyHandler) readyHandler("");
        } else if (const auto* publish = std::get_if<mqtt::Publish>(&*packet)) {
            if (publish->qos == 1) {
                const auto id = publish->packetId.value_or(0);
                sendNow(mqtt::PubAck{id});
                const auto now = loop.nowMs();
                std::erase_if(recentlyReceived, [&](const auto& e) { return now - e.second > kDuplicateWindowMs; });
                if (publish->dup && recentlyReceived.count(id)) {
                    ++duplicates;
                    recentlyReceived[id] = now;
                    continue;
                }
                recentlyReceived[id] = now;
            }
            if (messageHandler) messageHandler(publish->topic, publish->payload);
        } else if (const auto* ack = std::get_if<mqtt::PubAck>(&*packet)) {
            window.acknowledge(ack->packetId);
        }
    }
}

void MqttClient::sendNow(const mqtt::Packet& packet) {
    if (connection && connection->isOpen()) sendPacket(*connection, packet, counters);
}

void MqttClient::subscribe(const std::string& filter, std::uint8_t qos) {
    if (++nextControlId == 0) nextControlId = 1;
    mqtt::Subscribe s{nextControlId, {{filter, qos}}};
    if (ready) {
        sendNow(s);
    } else {
        backlog.emplace_back(std::move(s));
    }
}

void MqttClient::publish(const std::string& topic, std::string payload, std::uint8_t qos) {
    mqtt::Publish p{topic, std::move(payload), std::min<std::uint8_t>(qos, 1), std::nullopt, false};
    if (ready) {
        transmit(std::move(p));
    } else {
        backlog.emplace_back(std::move(p));
    }
}

void MqttClient::transmit(mqtt::Publish publish) {
    if (publish.qos == 1) {
        auto id = window.add(publish, loop.nowMs());
        if (!id) {
            ++gaveUp;
            spdlog::warn("{}: inflight window full, publish on {} abandoned", options.clientId, publish.topic);
            return;
        }
        publish.packetId = id;
        armRetransmit();
    }
    sendNow(publish);
}

void MqttClient::armRetransmit() {
    if (retransmitTimer) return;
    auto deadline = window.nextDeadline(options.retry);
    if (!deadline) return;
    std::weak_ptr<bool> guard = alive;
    retransmitTimer = loop.schedule((*deadline - loop.nowMs()) * 1000, [this, guard] {
        if (guard.expired()) return;
        retransmitTimer.reset();
        retransmit();
    });
}

void MqttClient::retransmit() {
    const auto now = loop.nowMs();
    std::vector<std::uint16_t> exhausted;
    for (const auto& [id, entry] : window.all()) {
        if (entry.retryCount >= options.retry.maxRetries && now - entry.lastSentAtMs >= options.retry.retryTimeoutMs) {
            exhausted.push_back(id);
        }
    }
    for (auto id : exhausted) {
        window.acknowledge(id);
        ++gaveUp;
    }
    for (auto& p : window.tick(now, options.retry).resend) sendNow(p);
    armRetransmit();
}

void MqttClient::disconnect() {
    if (!connection) return;
    sendNow(mqtt::Disconnect{});
    ready = false;
    connection->close();
}

}// namespace atmosphere::runtime
