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

#ifndef ATMOSPHERE_TESTS_SUPPORT_FIXTURES_HPP_
#define ATMOSPHERE_TESTS_SUPPORT_FIXTURES_HPP_

#include <atmosphere/event/Event.hpp>
#include <atmosphere/event/Schema.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace atmosphere::testing {

inline std::string sourcePath(const std::string& relative) { return std::string(ATMOSPHERE_SOURCE_DIR) + "/" + relative; }

inline std::string readFile(const std::string& relative) {
    std::ifstream in(sourcePath(relative));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline event::SchemaRegistry caseStudySchemas() {
    using event::DeclaredType;
    event::SchemaRegistry registry;
    registry.add({"ExternalLight", {{"isOn", DeclaredType::Boolean}, {"floor", DeclaredType::Integer}}});
    registry.add({"Medicine", {{"id", DeclaredType::String}, {"type", DeclaredType::String}, {"place", DeclaredType::String}}});
    registry.add({"Vital", {{"id", DeclaredType::String}, {"room", DeclaredType::Integer}, {"o2", DeclaredType::Number}}});
    return registry;
}

inline event::Event makeEvent(std::string stream, int64_t ts, std::vector<event::Field> fields) {
    event::Event e;
    e.stream = std::move(stream);
    e.timestamp = ts;
    e.source = "test";
    e.fields = std::move(fields);
    return e;
}

constexpr int64_t kHourMs = 3'600'000;

/// Random log over the three case-study streams, 8 ids, 48 h span. Roughly a
/// tenth of the timestamps are snapped onto 10-minute boundaries.
inline std::vector<event::Event> randomLog(uint64_t seed, size_t maxEvents = 10'000) {
    std::mt19937_64 rng(seed);
    const size_t n = std::uniform_int_distribution<size_t>(0, maxEvents)(rng);
    std::uniform_int_distribution<int64_t> when(0, 48 * kHourMs - 1);
    std::vector<int64_t> stamps(n);
    for (auto& t : stamps) {
        t = when(rng);
        if (rng() % 10 == 0) t -= t % 600'000;
    }
    std::sort(stamps.begin(), stamps.end());

    static const char* places[] = {"laboratory", "pharmacy", "hospital"};
    static const char* types[] = {"respiratory", "cardiac"};
    std::vector<event::Event> log;
    log.reserve(n);
    for (int64_t t : stamps) {
        const std::string id = "m" + std::to_string(1 + rng() % 8);
        switch (rng() % 3) {
            case 0:
                log.push_back(makeEvent("ExternalLight", t,
                                        {{"isOn", rng() % 5 < 3}, {"floor", static_cast<int64_t>(1 + rng() % 4)}}));
                break;
            case 1:
                log.push_back(makeEvent("Medicine", t,
                                        {{"id", id}, {"type", types[rng() % 2]}, {"place", places[rng() % 3]}}));
                break;
            default: {
                event::FieldValue o2 = rng() % 20 == 0 ? event::FieldValue::null()
                                                       : event::FieldValue(80.0 + static_cast<double>(rng() % 200) / 10.0);
                log.push_back(makeEvent("Vital", t, {{"id", id}, {"room", static_cast<int64_t>(1 + rng() % 8)}, {"o2", o2}}));
            }
        }
    }
    return log;
}

}// namespace atmosphere::testing

#endif// ATMOSPHERE_TESTS_SUPPORT_FIXTURES_HPP_
