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

#include <atmosphere/agent/Rule.hpp>

#include <algorithm>
#include <regex>

namespace atmosphere::agent {

using event::FieldValue;

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
    throw ConfigError((pointer.empty() ? std::string("/") : pointer) + ": " + message);
}

const Json& member(const Json& j, const char* key, const std::string& pointer) {
    if (!j.is_object()) fail(pointer, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(pointer, std::string("missing '") + key + "'");
    return *it;
}

std::string stringMember(const Json& j, const char* key, const std::string& pointer) {
    const auto& v = member(j, key, pointer);
    if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
    return v.get<std::string>();
}

Json fieldsMember(const Json& j, const std::string& pointer) {
    auto it = j.find("fields");
    if (it == j.end()) return Json::object();
    if (!it->is_object()) fail(pointer + "/fields", "expected an object");
    return *it;
}

Expression expression(const std::string& text, const std::string& pointer) {
    try {
        return Expression::parse(text);
    } catch (const ExpressionError& e) {
        fail(pointer, e.what());
    }
}

ValueMap scalars(const Json& j, const std::string& pointer) {
    ValueMap out;
    if (j.is_null()) return out;
    if (!j.is_object()) fail(pointer, "expected an object");
    for (const auto& [k, v] : j.items()) out[k] = scalarFrom(v, pointer + "/" + k);
    return out;
}

Action parseAction(const Json& j, const std::string& pointer) {
    const std::string type = stringMember(j, "type", pointer);
    if (type == "broadcast") {
        return action::Broadcast{stringMember(j, "stream", pointer), fieldsMember(j, pointer)};
    }
    if (type == "send") {
        action::Send s;
        const auto& receivers = member(j, "receivers", pointer);
        if (!receivers.is_array() || receivers.empty()) fail(pointer + "/receivers", "expected a non-empty list");
        for (const auto& r : receivers) {
            if (!r.is_string()) fail(pointer + "/receivers", "receiver ids must be strings");
            s.receivers.push_back(r.get<std::string>());
        }
        s.stream = stringMember(j, "stream", pointer);
        s.fields = fieldsMember(j, pointer);
        if (auto it = j.find("performative"); it != j.end()) {
            if (*it == "REQUEST") {
                s.performative = Performative::Request;
            } else if (*it != "INFORM") {
                fail(pointer + "/performative", "expected INFORM or REQUEST");
            }
        }
        return s;
    }
    if (type == "actuate") {
        return action::Actuate{stringMember(j, "actuator", pointer), member(j, "value", pointer)};
    }
    if (type == "publishFog") {
        std::string topic = "$fog.in";
        if (j.contains("topic")) topic = stringMember(j, "topic", pointer);
        return action::PublishFog{topic, stringMember(j, "stream", pointer), fieldsMember(j, pointer)};
    }
    if (type == "setState") {
        return action::SetState{stringMember(j, "var", pointer), expression(stringMember(j, "expr", pointer), pointer + "/expr")};
    }
    if (type == "log") {
        return action::Log{stringMember(j, "text", pointer)};
    }
    fail(pointer + "/type", "unknown action type '" + type + "'");
}

void collectReferences(const Json& j, std::vector<std::string>& out) {
    static const std::regex ref(R"(\$(value|attr\.\w+|state\.\w+|field\.\w+))");
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        for (auto it = std::sregex_iterator(s.begin(), s.end(), ref); it != std::sregex_iterator(); ++it) {
            out.push_back((*it)[1]);
        }
    } else if (j.is_structured()) {
        for (const auto& v : j) collectReferences(v, out);
    }
}

}// namespace

FieldValue scalarFrom(const Json& j, const std::string& pointer) {
    if (j.is_null()) return {};
    if (j.is_boolean()) return FieldValue(j.get<bool>());
    if (j.is_number_integer()) {
        if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
            fail(pointer, "integer out of range");
        }
        return FieldValue(j.get<std::int64_t>());
    }
    if (j.is_number()) return FieldValue(j.get<double>());
    if (j.is_string()) return FieldValue(j.get<std::string>());
    fail(pointer, "expected a scalar value");
}

Json scalarToJson(const FieldValue& v) {
    switch (v.type()) {
        case event::FieldType::Null: return nullptr;
        case event::FieldType::Number: return v.asNumber();
        case event::FieldType::Integer: return v.asInteger();
        case event::FieldType::String: return v.asString();
        case event::FieldType::Boolean: return v.asBoolean();
    }
    return nullptr;
}

Rule parseRule(const Json& j, const std::string& pointer) {
    Rule r;
    r.id = stringMember(j, "id", pointer);
    const auto& trigger = member(j, "trigger", pointer);
    const std::string tp = pointer + "/trigger";
    if (!trigger.is_object() || trigger.size() != 1) fail(tp, "expected exactly one of sensor, message, timer");
    if (trigger.contains("sensor")) {
        r.trigger = {Trigger::Kind::Sensor, stringMember(trigger, "sensor", tp), 0};
    } else if (trigger.contains("message")) {
        r.trigger = {Trigger::Kind::Message, stringMember(trigger, "message", tp), 0};
    } else if (trigger.contains("timer")) {
        const auto& period = trigger["timer"];
        if (!period.is_number_integer() || period.get<std::int64_t>() <= 0) fail(tp + "/timer", "expected a positive period in ms");
        r.trigger = {Trigger::Kind::Timer, "", period.get<std::int64_t>()};
    } else {
        fail(tp, "expected exactly one of sensor, message, timer");
    }
    if (auto it = j.find("guard"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) fail(pointer + "/guard", "expected an expression string");
        r.guard = expression(it->get<std::string>(), pointer + "/guard");
    }
    const auto& actions = member(j, "actions", pointer);
    if (!actions.is_array() || actions.empty()) fail(pointer + "/actions", "expected a non-empty list");
    for (size_t i = 0; i < actions.size(); ++i) {
        r.actions.push_back(parseAction(actions[i], pointer + "/actions/" + std::to_string(i)));
    }
    return r;
}

AgentSpec parseAgentSpec(const Json& j, const std::string& pointer) {
    AgentSpec s;
    s.id = stringMember(j, "id", pointer);
    if (auto it = j.find("attributes"); it != j.end()) s.attributes = scalars(*it, pointer + "/attributes");
    if (auto it = j.find("state"); it != j.end()) s.state = scalars(*it, pointer + "/state");
    if (auto it = j.find("actuators"); it != j.end()) s.actuators = scalars(*it, pointer + "/actuators");
    if (auto it = j.find("sensors"); it != j.end()) {
        if (!it->is_array()) fail(pointer + "/sensors", "expected a list");
        for (const auto& v : *it) {
            if (!v.is_string()) fail(pointer + "/sensors", "sensor names must be strings");
            s.sensors.push_back(v.get<std::string>());
        }
    }
    if (auto it = j.find("rules"); it != j.end()) {
        if (!it->is_array()) fail(pointer + "/rules", "expected a list");
        for (size_t i = 0; i < it->size(); ++i) s.rules.push_back(parseRule((*it)[i], pointer + "/rules/" + std::to_string(i)));
    }
    validateAgentSpec(s, pointer);
    return s;
}

void validateRule(const Rule& r, const AgentSpec& spec, const std::string& pointer) {
    auto check = [&](const std::string& ref, const std::string& where) {
        if (ref.rfind("attr.", 0) == 0 && !spec.attributes.contains(ref.substr(5))) {
            fail(where, "unknown attribute '" + ref.substr(5) + "'");
        }
        if (ref.rfind("state.", 0) == 0 && !spec.state.contains(ref.substr(6))) {
            fail(where, "unknown state variable '" + ref.substr(6) + "'");
        }
    };
    if (r.trigger.kind == Trigger::Kind::Sensor
        && std::find(spec.sensors.begin(), spec.sensors.end(), r.trigger.name) == spec.sensors.end()) {
        fail(pointer + "/trigger", "unknown sensor '" + r.trigger.name + "'");
    }
    if (r.guard) {
        for (const auto& v : r.guard->variables()) check(v, pointer + "/guard");
    }
    for (size_t i = 0; i < r.actions.size(); ++i) {
        const std::string ap = pointer + "/actions/" + std::to_string(i);
        std::vector<std::string> refs;
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, action::Actuate>) {
                    if (!spec.actuators.contains(a.actuator)) fail(ap, "unknown actuator '" + a.actuator + "'");
                    collectReferences(a.value, refs);
                } else if constexpr (std::is_same_v<T, action::SetState>) {
                    if (!spec.state.contains(a.var)) fail(ap, "unknown state variable '" + a.var + "'");
                    refs = a.expr.variables();
                } else if constexpr (std::is_same_v<T, action::Log>) {
                    collectReferences(Json(a.text), refs);
                } else {
                    collectReferences(a.fields, refs);
                }
            },
            r.actions[i]);
        for (const auto& ref : refs) check(ref, ap);
    }
}

void validateAgentSpec(const AgentSpec& spec, const std::string& pointer) {
    std::vector<std::string> ids;
    for (size_t i = 0; i < spec.rules.size(); ++i) {
        const std::string rp = pointer + "/rules/" + std::to_string(i);
        if (std::find(ids.begin(), ids.end(), spec.rules[i].id) != ids.end()) {
            fail(rp + "/id", "duplicate rule id '" + spec.rules[i].id + "'");
        }
        ids.push_back(spec.rules[i].id);
        validateRule(spec.rules[i], spec, rp);
    }
}

}// namespace atmosphere::agent
