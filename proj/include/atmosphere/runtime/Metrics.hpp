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

#ifndef ATMOSPHERE_RUNTIME_METRICS_HPP_
#define ATMOSPHERE_RUNTIME_METRICS_HPP_

#include <atmosphere/mqtt/Packet.hpp>

#include <json.hpp>

#include <atomic>
#include <cstdint>

namespace atmosphere::runtime {

/// Packet counters, incremented when a packet is handed to the transport.
struct RunCounters {
    std::atomic<std::uint64_t> publish{0};
    std::atomic<std::uint64_t> puback{0};
    std::atomic<std::uint64_t> mqttOther{0};
    /// Agent-platform messages, excluding registrations.
    std::atomic<std::uint64_t> acl{0};
    std::atomic<std::uint64_t> control{0};

    void countPacket(mqtt::PacketType type);
    void add(const nlohmann::ordered_json& other);
    nlohmann::ordered_json toJson() const;
};

}// namespace atmosphere::runtime

#endif// ATMOSPHERE_RUNTIME_METRICS_HPP_
