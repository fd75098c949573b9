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


#ifndef ATMOSPHERE_HARNESS_SCENARIOCONFIG_HPP_
#define ATMOSPHERE_HARNESS_SCENARIOCONFIG_HPP_

#include <atmosphere/runtime/Nodes.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace atmosphere::harness {

using Json = nlohmann::ordered_json;

enum class Tier { Edge, Fog, Cloud, User };
const char* toString(Tier tier);

/// One field generator of a simulator.
struct Generator {
    enum class Kind { Constant, Uniform, Choice, Bernoulli, Sequence };
    Kind kind = Kind::Constant;
    Json constant;
    std::int64_t low = 0;
    std::int64_t high = 0;
    std::vector<Json> choices;
    double probability = 0.5;
};

struct SimulatorSpec {
    std::string target;// edge node
    std::string stream;
    /// `mqtt` publishes to the fog, `acl` sends a REQUEST to the gateway service,
    /// `sensor` feeds the edge agents a sample of the `value` field.
    enum class Via { Mqtt, Acl, Sensor };
    Via via = Via::Mqtt;
    std::string sensor;
    double rate = 1.0;// events per second
    std::vector<std::pair<std::string, Generator>> fields;
    std::uint64_t seed = 0;
    /// Load simulators follow the `--rate` override.
    bool load = true;
};

struct TimelineEntry {
    std::int64_t atMs = 0;// offset from the start of the run
    std::string node;
    enum class Action { Sense, Publish, Request, Source, UserPublish };
    Action action = Action::Sense;
    std::string sensor;
    Json value;
    std::string stream;// Publish, Request
    std::string source;// Source: cloud input name
    Json payload;      // fields, raw source JSON or user content
    int repeat = 1;
    std::int64_t everyMs = 0;
};

enum class Transport { Sim, Tcp };

struct RunSpec {
    double durationS = 10;
    std::uint8_t qos = 0;
    runtime::RunMode mode = runtime::RunMode::Full;
    cep::ClockMode clock = cep::ClockMode::EventTime;
    std::uint64_t seed = 1;
    double warmupS = 10;
    Transport transport = Transport::Sim;
    std::int64_t linkLatencyUs = 1000;
    double drainTimeoutS = 10;
    std::int64_t startMs = 0;// event time only
    std::int64_t retryTimeoutMs = 1000;
    int maxRetries = 5;
};

struct NodeSpec {
    std::string id;
    Tier tier = Tier::Edge;
    std::variant<runtime::EdgeNodeConfig, runtime::FogNodeConfig, runtime::CloudNodeConfig, runtime::UserNodeConfig> config;
};

struct ScenarioConfig {
    std::string name;
    std::string path;
    event::SchemaRegistry schemas;// declared plus every derived stream
    std::vector<NodeSpec> nodes;
    std::vector<SimulatorSpec> simulators;
    std::vector<TimelineEntry> timeline;
    RunSpec run;

    const NodeSpec* node(const std::string& id) const;
    std::vector<std::string> idsOf(Tier tier) const;
    /// Every pattern deployed on any fog or cloud node.
    std::vector<pattern::PatternDef> allPatterns() const;
};

/// Throws ConfigError whose message starts with the JSON pointer of the offending value.
ScenarioConfig parseScenario(const Json& document, const std::string& baseDir = ".");
ScenarioConfig loadScenario(const std::string& path);

}// namespace atmosphere::harness

#endif// ATMOSPHERE_HARNESS_SCENARIOCONFIG_HPP_
