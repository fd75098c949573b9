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

#include <atmosphere/agent/Agent.hpp>

#include <regex>

namespace atmosphere::agent {

using event::FieldValue;

namespace {

std::optional<FieldValue> resolve(const std::string& ref, const Scope& scope) {
    auto from = [&](const ValueMap* map, size_t skip) -> FieldValue {
        if (!map) return {};
        auto it = map->find(ref.substr(skip));
        return it == map->end() ? FieldValue() : it->second;
    };
    if (ref == "value") return scope.value;
    if (ref.rfind("attr.", 0) == 0) return from(scope.attributes, 5);
    if (ref.rfind("state.", 0) == 0) return from(scope.state, 6);
    if (ref.rfind("field.", 0) == 0) return from(scope.fields, 6);
    return std::nullopt;
}

std::string interpolateText(const std::string& text, const Scope& scope) {
    static const std::regex ref(R"(\$(value|attr\.\w+|state\.\w+|field\.\w+))");
    std::string out;
    auto last = text.cbegin();
    for (auto it = std::sregex_iterator(text.begin(), text.end(), ref); it != std::sregex_iterator(); ++it) {
        out.append(last, text.cbegin() + it->position());
        out += event::toDisplayString(*resolve((*it)[1], scope));
        last = text.cbegin() + it->position() + it->length();
    }
    out.append(last, text.cend());
    return out;
}

Json interpolate(const Json& j, const Scope& scope) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (!s.empty() && s[0] == '$') {
            if (auto v = resolve(s.substr(1), scope)) return scalarToJson(*v);
        }
        return interpolateText(s, scope);
    }
    if (j.is_object()) {
        Json out = Json::object();
        for (const auto& [k, v] : j.items()) out[k] = interpolate(v, scope);
        return out;
    }
    if (j.is_array()) {
        Json out = Json::array();
        for (const auto& v : j) out.push_back(interpolate(v, scope));
        return out;
    }
    return j;
}

Json withStream(const std::string& stream, const Json& fields) {
    Json content = Json::object();
    content["_stream"] = stream;
    for (const auto& [k, v] : fields.items()) content[k] = v;
    return content;
}

}// namespace

std::string describe(const Effect& e) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, effect::Actuation>) {
                return "actuate " + x.actuator + "=" + event::toDisplayString(x.value);
            } else if constexpr (std::is_same_v<T, effect::OutMessage>) {
                return "acl " + encodeAcl(x.message);
            } else if constexpr (std::is_same_v<T, effect::FogPublish>) {
                return "publish " + x.topic + " " + x.stream + " " + x.fields.dump();
            } else if constexpr (std::is_same_v<T, effect::StateChange>) {
                return "state " + x.var + "=" + event::toDisplayString(x.value);
            } else {
                return std::string(x.error ? "error " : "log ") + x.text;
            }
        },
        e);
}

MessageStimulus stimulusFrom(const AclMessage& m) { return {m.stream(), m.content, m.sender}; }

Agent::Agent(AgentSpec spec) : agentSpec(std::move(spec)) { validateAgentSpec(agentSpec); }

std::vector<std::pair<std::string, std::int64_t>> Agent::timers() const {
    std::vector<std::pair<std::string, std::int64_t>> out;
    for (const auto& r : agentSpec.rules) {
        if (r.trigger.kind == Trigger::Kind::Timer) out.emplace_back(r.id, r.trigger.periodMs);
    }
    return out;
}

bool Agent::addressedBy(const std::string& target) const {
    if (target == "*" || target == agentSpec.id) return true;
    const auto dot = agentSpec.id.find('.');
    return dot != std::string::npos && agentSpec.id.substr(dot + 1) == target;
}

std::vector<Effect> Agent::applyRuleUpdate(const MessageStimulus& m) {
    auto target = m.content.find("agent");
    if (target == m.content.end() || !target->is_string() || !addressedBy(target->get<std::string>())) return {};
    try {
        auto text = m.content.find("rule");
        if (text == m.content.end() || !text->is_string()) throw ConfigError("RuleUpdate lacks a 'rule' string");
        Json parsed;
        try {
            parsed = Json::parse(text->get<std::string>());
        } catch (const Json::parse_error& e) {
            throw ConfigError(std::string("RuleUpdate rule is not JSON: ") + e.what());
        }
        Rule rule = parseRule(parsed, "/rule");
        validateRule(rule, agentSpec, "/rule");
        bool replaced = false;
        for (auto& r : agentSpec.rules) {
            if (r.id == rule.id) {
                r = rule;
                replaced = true;
            }
        }
        if (!replaced) agentSpec.rules.push_back(rule);
        return {effect::LogLine{"rule " + rule.id + (replaced ? " replaced" : " added"), false}};
    } catch (const AtmosphereError& e) {
        return {effect::LogLine{std::string("rule update rejected: ") + e.what(), true}};
    }
}

std::vector<Effect> Agent::step(const Stimulus& stimulus, std::int64_t nowMs) {
    std::vector<Effect> out;
    if (const auto* m = std::get_if<MessageStimulus>(&stimulus); m && m->stream == kRuleUpdateStream) {
        return applyRuleUpdate(*m);
    }
    FieldValue value;
    ValueMap fields;
    if (const auto* s = std::get_if<SensorSample>(&stimulus)) {
        value = s->value;
    } else if (const auto* m = std::get_if<MessageStimulus>(&stimulus)) {
        for (const auto& [k, v] : m->content.items()) {
            if (!k.empty() && k[0] == '_') continue;
            if (v.is_primitive()) fields[k] = scalarFrom(v, "/" + k);
        }
        if (auto it = fields.find("value"); it != fields.end()) value = it->second;
    }
    const std::vector<Rule> rules = agentSpec.rules;
    for (const auto& rule : rules) {
        bool matches = false;
        switch (rule.trigger.kind) {
            case Trigger::Kind::Sensor: {
                const auto* s = std::get_if<SensorSample>(&stimulus);
                matches = s && s->sensor == rule.trigger.name;
                break;
            }
            case Trigger::Kind::Message: {
                const auto* m = std::get_if<MessageStimulus>(&stimulus);
                matches = m && m->stream == rule.trigger.name;
                break;
            }
            case Trigger::Kind::Timer: {
                const auto* t = std::get_if<TimerFire>(&stimulus);
                matches = t && t->ruleId == rule.id;
                break;
            }
        }
        if (matches) runRule(rule, value, fields, nowMs, out);
    }
    return out;
}

void Agent::runRule(const Rule& rule, const FieldValue& value, const ValueMap& fields, std::int64_t nowMs,
                    std::vector<Effect>& out) {
    auto scope = [&] { return Scope{value, &agentSpec.attributes, &agentSpec.state, &fields}; };
    if (rule.guard) {
        try {
            if (!rule.guard->test(scope())) return;
        } catch (const AtmosphereError& e) {
            out.push_back(effect::LogLine{"rule " + rule.id + " skipped: " + e.what(), true});
            return;
        }
    }
    for (const auto& act : rule.actions) {
        try {
            std::visit(
                [&](const auto& a) {
                    using T = std::decay_t<decltype(a)>;
                    if constexpr (std::is_same_v<T, action::Broadcast>) {
                        AclMessage m;
                        m.sender = agentSpec.id;
                        m.broadcast = true;
                        m.content = withStream(a.stream, interpolate(a.fields, scope()));
                        m.sentAt = nowMs;
                        out.push_back(effect::OutMessage{std::move(m)});
                    } else if constexpr (std::is_same_v<T, action::Send>) {
                        AclMessage m;
                        m.performative = a.performative;
                        m.sender = agentSpec.id;
                        m.receivers = a.receivers;
                        m.content = withStream(a.stream, interpolate(a.fields, scope()));
                        m.sentAt = nowMs;
                        out.push_back(effect::OutMessage{std::move(m)});
                    } else if constexpr (std::is_same_v<T, action::Actuate>) {
                        FieldValue v = scalarFrom(interpolate(a.value, scope()), "/value");
                        agentSpec.actuators[a.actuator] = v;
                        out.push_back(effect::Actuation{a.actuator, std::move(v)});
                    } else if constexpr (std::is_same_v<T, action::PublishFog>) {
                        out.push_back(effect::FogPublish{a.topic, a.stream, interpolate(a.fields, scope())});
                    } else if constexpr (std::is_same_v<T, action::SetState>) {
                        FieldValue v = a.expr.evaluate(scope());
                        agentSpec.state[a.var] = v;
                        out.push_back(effect::StateChange{a.var, std::move(v)});
                    } else {
                        out.push_back(effect::LogLine{interpolateText(a.text, scope()), false});
                    }
                },
                act);
        } catch (const AtmosphereError& e) {
            out.push_back(effect::LogLine{"rule " + rule.id + " action failed: " + e.what(), true});
        }
    }
}

}// namespace atmosphere::agent
