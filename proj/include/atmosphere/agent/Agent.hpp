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

#ifndef ATMOSPHERE_AGENT_AGENT_HPP_
#define ATMOSPHERE_AGENT_AGENT_HPP_

#include <atmosphere/agent/Rule.hpp>

#include <string>
#include <variant>
#include <vector>

namespace atmosphere::agent {

inline constexpr const char* kRuleUpdateStream = "RuleUpdate";

struct SensorSample {
    std::string sensor;
    event::FieldValue value;
};

/// An ACL message or broker event surfaced to the agent.
struct MessageStimulus {
    std::string stream;
    Json content;// `_stream` and fields
    std::string sender;
};

struct TimerFire {
    std::string ruleId;
};

using Stimulus = std::variant<SensorSample, MessageStimulus, TimerFire>;

namespace effect {
struct Actuation {
    std::string actuator;
    event::FieldValue value;
};
struct OutMessage {
    AclMessage message;
};
struct FogPublish {
    std::string topic;
    std::string stream;
    Json fields;
};
struct StateChange {
    std::string var;
    event::FieldValue value;
};
struct LogLine {
    std::string text;
    bool error = false;
};
}// namespace effect

using Effect = std::variant<effect::Actuation, effect::OutMessage, effect::FogPublish, effect::StateChange, effect::LogLine>;

/// One-line deterministic rendering used for effect logs.
std::string describe(const Effect& effect);

MessageStimulus stimulusFrom(const AclMessage& message);

/**
 * A rule-driven agent. step() evaluates every rule whose trigger matches in
 * declaration order; state and actuator effects apply immediately so later
 * rules in the same step observe them.
 */
class Agent {
  public:
    explicit Agent(AgentSpec spec);

    std::vector<Effect> step(const Stimulus& stimulus, std::int64_t nowMs);

    const std::string& id() const { return agentSpec.id; }
    const AgentSpec& spec() const { return agentSpec; }
    const ValueMap& state() const { return agentSpec.state; }
    const ValueMap& actuators() const { return agentSpec.actuators; }
    /// (rule id, period) for timer-triggered rules.
    std::vector<std::pair<std::string, std::int64_t>> timers() const;

    /// True when a RuleUpdate addressed as `target` applies to this agent.
    bool addressedBy(const std::string& target) const;

  private:
    std::vector<Effect> applyRuleUpdate(const MessageStimulus& m);
    void runRule(const Rule& rule, const event::FieldValue& value, const ValueMap& fields, std::int64_t nowMs,
                 std::vector<Effect>& out);

    AgentSpec agentSpec;
};

}// namespace atmosphere::agent

#endif// ATMOSPHERE_AGENT_AGENT_HPP_
