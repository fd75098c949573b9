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

#ifndef ATMOSPHERE_RUNTIME_MQTT_HPP_
#define ATMOSPHERE_RUNTIME_MQTT_HPP_

#include <atmosphere/mqtt/BrokerCore.hpp>
#include <atmosphere/mqtt/Codec.hpp>
#include <atmosphere/runtime/Metrics.hpp>
#include <atmosphere/runtime/Network.hpp>

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace atmosphere::runtime {

using MessageHandler = std::function<void(const std::string& topic, const std::string& payload)>;

/// Encodes, counts and sends one packet.
void sendPacket(Connection& connection, const mqtt::Packet& packet, RunCounters& counters);

/// BrokerCore attached to a network endpoint, plus in-process subscribers.
class BrokerServer {
  public:
    BrokerServer(EventLoop& loop, Network& network, std::string endpoint, RunCounters& counters,
                 mqtt::BrokerConfig config = {});
    ~BrokerServer();

    void start();
    void stop();

    void subscribeLocal(const std::string& subscriberId, const std::string& filter, MessageHandler handler);
    void publishLocal(const std::string& topic, std::string payload, std::uint8_t qos);

    const std::string& endpoint() const { return address; }
    const mqtt::BrokerCore& core() const { return broker; }
    std::size_t queuedBytes() const;
    std::size_t clientCount() const { return byId.size(); }
    std::uint64_t droppedClients() const { return drops; }

  private:
    struct Client;
    void accept(ConnectionPtr connection);
    void receive(const std::shared_ptr<Client>& client, std::string_view bytes);
    void execute(std::vector<mqtt::Action> actions);
    void forget(const std::shared_ptr<Client>& client);
    void armRetransmit();

    EventLoop& loop;
    Network& network;
    std::string address;
    RunCounters& counters;
    mqtt::BrokerCore broker;
    std::map<Client*, std::shared_ptr<Client>> clients;
    std::map<std::string, std::shared_ptr<Client>> byId;
    std::map<std::string, MessageHandler> localHandlers;
    std::optional<TimerId> retransmitTimer;
    std::int64_t retransmitAtMs = 0;
    std::uint64_t drops = 0;
    bool running = false;
};

struct MqttClientOptions {
    std::string nodeId;
    std::string endpoint;
    std::string clientId;
    mqtt::RetryPolicy retry;
    int connectAttempts = 50;
    std::int64_t connectRetryUs = 100'000;
};

/// QoS 0/1 client with retransmission and duplicate suppression.
class MqttClient {
  public:
    MqttClient(EventLoop& loop, Network& network, RunCounters& counters, MqttClientOptions options);
    ~MqttClient();

    /// Connects and waits for CONNACK; `onReady` receives an error text on failure.
    void start(std::function<void(const std::string& error)> onReady = {});
    void onMessage(MessageHandler handler) { messageHandler = std::move(handler); }
    void subscribe(const std::string& filter, std::uint8_t qos);
    void publish(const std::string& topic, std::string payload, std::uint8_t qos);
    void disconnect();

    bool connected() const { return ready; }
    const std::string& clientId() const { return options.clientId; }
    std::size_t inflight() const { return window.size(); }
    std::uint64_t abandoned() const { return gaveUp; }
    std::uint64_t duplicatesSuppressed() const { return duplicates; }

  private:
    void attach(ConnectionPtr connection);
    void receive(std::string_view bytes);
    void sendNow(const mqtt::Packet& packet);
    void transmit(mqtt::Publish publish);
    void armRetransmit();
    void retransmit();

    EventLoop& loop;
    Network& network;
    RunCounters& counters;
    MqttClientOptions options;
    ConnectionPtr connection;
    mqtt::PacketFramer framer;
    MessageHandler messageHandler;
    std::function<void(const std::string&)> readyHandler;
    bool ready = false;
    std::deque<mqtt::Packet> backlog;
    mqtt::InflightWindow window;
    std::map<std::uint16_t, std::int64_t> recentlyReceived;
    std::uint16_t nextControlId = 0;
    std::optional<TimerId> retransmitTimer;
    std::uint64_t gaveUp = 0;
    std::uint64_t duplicates = 0;
    std::shared_ptr<bool> alive = std::make_shared<bool>(true);
};

}// namespace atmosphere::runtime

#endif// ATMOSPHERE_RUNTIME_MQTT_HPP_
