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

#ifndef ATMOSPHERE_RUNTIME_JOURNAL_HPP_
#define ATMOSPHERE_RUNTIME_JOURNAL_HPP_

#include <json.hpp>

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

namespace atmosphere::runtime {

using Json = nlohmann::ordered_json;

struct LatencyRecord {
    std::string id;
    std::int64_t sentAtUs = 0;
    std::int64_t receivedAtUs = 0;
    double latencyMs() const { return static_cast<double>(receivedAtUs - sentAtUs) / 1000.0; }
};

/// Append-only run records shared by all nodes of a process.
class Journal {
  public:
    void emission(Json line) { append(emissionLines, std::move(line)); }
    void deadLetter(Json line) { append(deadLetterLines, std::move(line)); }
    void alert(Json line) { append(alertLines, std::move(line)); }
    void effect(Json line) { append(effectLines, std::move(line)); }
    void latency(LatencyRecord record) {
        std::lock_guard lock(mutex);
        latencyRecords.push_back(std::move(record));
    }

    std::vector<Json> emissions() const { return copy(emissionLines); }
    std::vector<Json> deadLetters() const { return copy(deadLetterLines); }
    std::vector<Json> alerts() const { return copy(alertLines); }
    std::vector<Json> effects() const { return copy(effectLines); }
    std::vector<LatencyRecord> latencies() const {
        std::lock_guard lock(mutex);
        return latencyRecords;
    }

  private:
    void append(std::vector<Json>& lines, Json line) {
        std::lock_guard lock(mutex);
        lines.push_back(std::move(line));
    }
    std::vector<Json> copy(const std::vector<Json>& lines) const {
        std::lock_guard lock(mutex);
        return lines;
    }

    mutable std::mutex mutex;
    std::vector<Json> emissionLines;
    std::vector<Json> deadLetterLines;
    std::vector<Json> alertLines;
    std::vector<Json> effectLines;
    std::vector<LatencyRecord> latencyRecords;
};

}// namespace atmosphere::runtime

#endif// ATMOSPHERE_RUNTIME_JOURNAL_HPP_
