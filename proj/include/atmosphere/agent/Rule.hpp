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

#ifndef ATMOSPHERE_AGENT_RULE_HPP_
#define ATMOSPHERE_AGENT_RULE_HPP_

#include <atmosphere/agent/AclMessage.hpp>
#include <atmosphere/agent/Expression.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace atmosphere::agent {

struct Trigger {
    enum class Kind { Sensor, Message, Timer };
    Kind kind = Kind::Sensor;
    std::string name;// sensor name or message stream
    std::int64_t periodMs = 0;
};

namespace action {
struct Broadcast {
    std::string stream;
    Json fields;
};
struct Send {
    std::vector<std::string> receivers;
    Performative performative = Performative::Inform;
    std::string stream;
    Json fields;
};
struct Actuate {
    std::string actuator;
    Json value;
};
/// Topic may be literal or `$fog.in` / `$fog.user`, resolved by the edge node.
struct PublishFog {
    std::string topic;
    std::string stream;
    Json fields;
};
struct SetState {
    std::string var;
    Expression expr;
};
struct Log {
    std::string text;
};
}// namespace action

using Action = std::variant<action::Broadcast, action::Send, action::Actuate, action::PublishFog, action::SetState, action::Log>;

struct Rule {
    std::string id;
    Trigger trigger;
    std::optional<Expression> guard;
    std::vector<Action> actions;
};

struct AgentSpec {
    std::string id;
    ValueMap attributes;
    ValueMap state;
    std::vector<std::string> sensors;
    ValueMap actuators;// name -> initial value
    std::vector<Rule> rules;
};

/// Errors carry a JSON pointer rooted at `pointer`.
Rule parseRule(const Json& json, const std::string& pointer = "");
AgentSpec parseAgentSpec(const Json& json, const std::string& pointer = "");

/// Checks that guards, expressions and interpolations reference declared names.
void validateRule(const Rule& rule, const AgentSpec& spec, const std::string& pointer = "");
void validateAgentSpec(const AgentSpec& spec, const std::string& pointer = "");

/// Converts a JSON scalar; throws ConfigError naming `pointer` otherwise.
event::FieldValue scalarFrom(const Json& json, const std::string& pointer);
Json scalarToJson(const event::FieldValue& value);

}// namespace atmosphere::agent

#endif// ATMOSPHERE_AGENT_RULE_HPP_
