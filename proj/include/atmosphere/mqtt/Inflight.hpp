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

#ifndef ATMOSPHERE_MQTT_INFLIGHT_HPP_
#define ATMOSPHERE_MQTT_INFLIGHT_HPP_

#include <atmosphere/mqtt/Packet.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace atmosphere::mqtt {

struct RetryPolicy {
    std::int64_t retryTimeoutMs = 1000;
    int maxRetries = 5;
};

/// QoS 1 publishes awaiting PUBACK, keyed by packet id.
class InflightWindow {
  public:
    struct Entry {
        Publish publish;
        std::int64_t lastSentAtMs = 0;
        int retryCount = 0;
    };

    struct TickResult {
        std::vector<Publish> resend;// dup=true copies
        bool exhausted = false;     // some entry already hit maxRetries and is still unacked
    };

    /// Assigns the next free packet id (1..65535) and records the publish. Returns nullopt when full.
    std::optional<std::uint16_t> add(Publish publish, std::int64_t nowMs);
    bool acknowledge(std::uint16_t packetId);
    TickResult tick(std::int64_t nowMs, const RetryPolicy& policy);

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
    const std::map<std::uint16_t, Entry>& all() const { return entries; }
    /// Earliest instant at which tick() has work, if any.
    std::optional<std::int64_t> nextDeadline(const RetryPolicy& policy) const;

  private:
    std::map<std::uint16_t, Entry> entries;
    std::uint16_t lastId = 0;
};

}// namespace atmosphere::mqtt

#endif// ATMOSPHERE_MQTT_INFLIGHT_HPP_
