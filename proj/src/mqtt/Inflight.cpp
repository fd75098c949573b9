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

#include <atmosphere/mqtt/Inflight.hpp>

#include <algorithm>

namespace atmosphere::mqtt {

std::optional<std::uint16_t> InflightWindow::add(Publish publish, std::int64_t nowMs) {
    if (entries.size() >= 65535) {
        return std::nullopt;
    }
    do {
        lastId = static_cast<std::uint16_t>(lastId == 65535 ? 1 : lastId + 1);
    } while (entries.contains(lastId));
    publish.qos = 1;
    publish.packetId = lastId;
    publish.dup = false;
    entries.emplace(lastId, Entry{std::move(publish), nowMs, 0});
    return lastId;
}

bool InflightWindow::acknowledge(std::uint16_t packetId) { return entries.erase(packetId) > 0; }

InflightWindow::TickResult InflightWindow::tick(std::int64_t nowMs, const RetryPolicy& policy) {
    TickResult result;
    for (auto& [id, entry] : entries) {
        if (nowMs - entry.lastSentAtMs < policy.retryTimeoutMs) {
            continue;
        }
        if (entry.retryCount >= policy.maxRetries) {
            result.exhausted = true;
            continue;
        }
        ++entry.retryCount;
        entry.lastSentAtMs = nowMs;
        entry.publish.dup = true;
        result.resend.push_back(entry.publish);
    }
    return result;
}

std::optional<std::int64_t> InflightWindow::nextDeadline(const RetryPolicy& policy) const {
    std::optional<std::int64_t> earliest;
    for (const auto& [id, entry] : entries) {
        auto due = entry.lastSentAtMs + policy.retryTimeoutMs;
        earliest = earliest ? std::min(*earliest, due) : due;
    }
    return earliest;
}

}// namespace atmosphere::mqtt
