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

#ifndef ATMOSPHERE_MQTT_BROKERCORE_HPP_
#define ATMOSPHERE_MQTT_BROKERCORE_HPP_

#include <atmosphere/mqtt/Inflight.hpp>
#include <atmosphere/mqtt/Packet.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace atmosphere::mqtt {

struct BrokerConfig {
    RetryPolicy retry;
    /// How long a received QoS 1 packet id is remembered for duplicate suppression.
    std::int64_t duplicateWindowMs = 30'000;
    /// Authentication hook; accepts everyone when unset.
    std::function<bool(const Connect&)> authenticate;
};

namespace action {
struct Send {
    std::string clientId;
    Packet packet;
};
/// Close the client's connection and forget its session.
struct Drop {
    std::string clientId;
    std::string reason;
};
/// Delivery to an in-process subscriber (no wire packet).
struct LocalDeliver {
    std::string subscriberId;
    std::string topic;
    std::string payload;
};
}// namespace action

using Action = std::variant<action::Send, action::Drop, action::LocalDeliver>;

struct Session {
    std::string clientId;
    bool local = false;
    std::map<std::string, std::uint8_t> subscriptions;// filter -> granted qos
    InflightWindow inflight;
    std::map<std::uint16_t, std::int64_t> recentlyReceived;// QoS 1 ids from this publisher
};

/**
 * @brief Single-threaded MQTT 3.1.1-subset broker state machine.
 *
 * Transport-agnostic: callers feed decoded packets and execute the returned
 * actions. Supports QoS 0/1, clean sessions only, no retained messages or wills.
 */
class BrokerCore {
  public:
    explicit BrokerCore(BrokerConfig config = {});

    struct ConnectResult {
        std::string clientId;// assigned when the client sent an empty id
        bool accepted = false;
        std::vector<Action> actions;
    };

    ConnectResult connect(const Connect& connect, std::int64_t nowMs);
    std::vector<Action> handlePacket(const std::string& clientId, const Packet& packet, std::int64_t nowMs);
    std::vector<Action> handlePublish(const std::string& publisherId, const Publish& publish, std::int64_t nowMs);
    /// Connection lost or closed: forget the session.
    void disconnect(const std::string& clientId);

    /// Resends every inflight publish older than the retry timeout; drops sessions past maxRetries.
    std::vector<Action> retransmitTick(std::int64_t nowMs);
    std::optional<std::int64_t> nextRetransmitDeadline() const;

    void subscribeLocal(const std::string& subscriberId, const std::string& filter);
    std::vector<Action> publishLocal(const std::string& topic, std::string payload, std::uint8_t qos, std::int64_t nowMs);

    bool isConnected(const std::string& clientId) const { return sessions.contains(clientId); }
    const Session* session(const std::string& clientId) const;
    std::size_t inflightCount() const;
    const BrokerConfig& config() const { return brokerConfig; }

  private:
    std::vector<Action> forward(const Publish& publish, std::int64_t nowMs);
    void retransmitSession(Session& session, std::int64_t nowMs, std::vector<Action>& out);

    BrokerConfig brokerConfig;
    std::map<std::string, Session> sessions;
    std::uint64_t generatedIds = 0;
};

}// namespace atmosphere::mqtt

#endif// ATMOSPHERE_MQTT_BROKERCORE_HPP_
