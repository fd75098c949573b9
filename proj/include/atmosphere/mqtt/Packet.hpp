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

#ifndef ATMOSPHERE_MQTT_PACKET_HPP_
#define ATMOSPHERE_MQTT_PACKET_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace atmosphere::mqtt {

using Bytes = std::vector<std::uint8_t>;

enum class PacketType : std::uint8_t {
    Connect = 1,
    ConnAck = 2,
    Publish = 3,
    PubAck = 4,
    Subscribe = 8,
    SubAck = 9,
    Unsubscribe = 10,
    UnsubAck = 11,
    PingReq = 12,
    PingResp = 13,
    Disconnect = 14,
};

struct Connect {
    std::string clientId;
    std::uint16_t keepAliveS = 60;
    bool cleanSession = true;
    // Accepted and handed to the broker's auth hook; never enforced by default.
    std::optional<std::string> username;
    std::optional<std::string> password;
    bool operator==(const Connect&) const = default;
};

struct ConnAck {
    bool sessionPresent = false;
    std::uint8_t returnCode = 0;
    bool operator==(const ConnAck&) const = default;
};

struct Publish {
    std::string topic;
    std::string payload;
    std::uint8_t qos = 0;
    std::optional<std::uint16_t> packetId;
    bool dup = false;
    bool operator==(const Publish&) const = default;
};

struct PubAck {
    std::uint16_t packetId = 0;
    bool operator==(const PubAck&) const = default;
};

struct Subscribe {
    std::uint16_t packetId = 0;
    std::vector<std::pair<std::string, std::uint8_t>> filters;
    bool operator==(const Subscribe&) const = default;
};

struct SubAck {
    static constexpr std::uint8_t kFailure = 0x80;
    std::uint16_t packetId = 0;
    std::vector<std::uint8_t> grantedQos;
    bool operator==(const SubAck&) const = default;
};

struct Unsubscribe {
    std::uint16_t packetId = 0;
    std::vector<std::string> filters;
    bool operator==(const Unsubscribe&) const = default;
};

struct UnsubAck {
    std::uint16_t packetId = 0;
    bool operator==(const UnsubAck&) const = default;
};

struct PingReq {
    bool operator==(const PingReq&) const = default;
};
struct PingResp {
    bool operator==(const PingResp&) const = default;
};
struct Disconnect {
    bool operator==(const Disconnect&) const = default;
};

using Packet =
    std::variant<Connect, ConnAck, Publish, PubAck, Subscribe, SubAck, Unsubscribe, UnsubAck, PingReq, PingResp, Disconnect>;

PacketType typeOf(const Packet& packet);
const char* toString(PacketType type);

}// namespace atmosphere::mqtt

#endif// ATMOSPHERE_MQTT_PACKET_HPP_
