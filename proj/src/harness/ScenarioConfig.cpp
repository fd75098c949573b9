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


#include <atmosphere/cep/Engine.hpp>
#include <atmosphere/cep/SchemaInference.hpp>
#include <atmosphere/harness/ScenarioConfig.hpp>
#include <atmosphere/pattern/Parser.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace atmosphere::harness {

namespace fs = std::filesystem;
using runtime::CloudNodeConfig;
using runtime::EdgeNodeConfig;
using runtime::FogNodeConfig;
using runtime::UserNodeConfig;

const char* toString(Tier tier) {
    switch (tier) {
        case Tier::Edge: return "edge";
        case Tier::Fog: return "fog";
        case Tier::Cloud: return "cloud";
        case Tier::User: return "user";
    }
    return "?";
}

const NodeSpec* ScenarioConfig::node(const std::string& id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

std::vector<std::string> ScenarioConfig::idsOf(Tier tier) const {
    std::vector<std::string> ids;
    for (const auto& n : nodes) {
        if (n.tier == tier) ids.push_back(n.id);
    }
    return ids;
}

std::vector<pattern::PatternDef> ScenarioConfig::allPatterns() const {
    std::vector<pattern::PatternDef> all;
    for (const auto& n : nodes) {
        if (const auto* f = std::get_if<FogNodeConfig>(&n.config)) all.insert(all.end(), f->patterns.begin(), f->patterns.end());
        if (const auto* c = std::get_if<CloudNodeConfig>(&n.config)) all.insert(all.end(), c->patterns.begin(), c->patterns.end());
    }
    return all;
}

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
    throw ConfigError((pointer.empty() ? "/" : pointer) + ": " + message);
}

const Json& member(const Json& j, const char* key, const std::string& pointer) {
    if (!j.is_object()) fail(pointer, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(pointer, std::string("missing '") + key + "'");
    return *it;
}

std::string text(const Json& j, const char* key, const std::string& pointer) {
    const auto& v = member(j, key, pointer);
    if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
    return v.get<std::string>();
}

std::string textOr(const Json& j, const char* key, const std::string& pointer, std::string fallback) {
    if (!j.contains(key)) return fallback;
    return text(j, key, pointer);
}

double numberOr(const Json& j, const char* key, const std::string& pointer, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) fail(pointer + "/" + key, "expected a number");
    return it->get<double>();
}

std::int64_t integerOr(const Json& j, const char* key, const std::string& pointer, std::int64_t fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) fail(pointer + "/" + key, "expected an integer");
    return it->get<std::int64_t>();
}

bool flagOr(const Json& j, const char* key, const std::string& pointer, bool fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) fail(pointer + "/" + key, "expected a boolean");
    return it->get<bool>();
}

std::vector<std::string> names(const Json& j, const char* key, const std::string& pointer) {
    std::vector<std::string> out;
    auto it = j.find(key);
    if (it == j.end()) return out;
    if (!it->is_array()) fail(pointer + "/" + key, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_string()) fail(pointer + "/" + key + "/" + std::to_string(i), "expected a string");
        out.push_back((*it)[i].get<std::string>());
    }
    return out;
}

std::string readFile(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<pattern::PatternDef> loadPatterns(const Json& node, const std::string& pointer, const fs::path& baseDir) {
    std::vector<pattern::PatternDef> out;
    const auto files = names(node, "patterns", pointer);
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto at = pointer + "/patterns/" + std::to_string(i);
        const auto path = baseDir / files[i];
        std::string source;
        try {
            source = readFile(path);
        } catch (const ConfigError&) {
            fail(at, "cannot read pattern file '" + path.string() + "'");
        }
        try {
            auto parsed = pattern::parsePatternFile(source);
            out.insert(out.end(), parsed.begin(), parsed.end());
        } catch (const pattern::PatternError& e) {
            fail(at, "pattern file '" + path.string() + "' line " + std::to_string(e.line()) + ": " + e.what());
        }
    }
    return out;
}

void checkTargets(const std::vector<pattern::PatternDef>& patterns, const std::string& pointer,
                  const std::function<std::optional<std::string>(const std::string&)>& missing) {
    for (const auto& p : patterns) {
        const auto target = p.target();
        if (!target) continue;
        const auto known = std::find_if(std::begin(pattern::kTargetAudiences), std::end(pattern::kTargetAudiences),
                                        [&](const char* t) { return *target == t; });
        if (known == std::end(pattern::kTargetAudiences)) {
            fail(pointer + "/patterns", "pattern '" + p.name + "' has unknown target '" + *target + "'");
        }
        if (auto why = missing(*target)) fail(pointer + "/patterns", "pattern '" + p.name + "' targets " + *target + ": " + *why);
    }
}

agent::AgentSpec agentOf(const Json& entry, const std::string& pointer, const Json& templates, const std::string& edgeId,
                         const Json& nodeAttributes) {
    Json spec = Json::object();
    if (entry.contains("template")) {
        const auto name = text(entry, "template", pointer);
        if (!templates.contains(name)) fail(pointer + "/template", "unknown agent template '" + name + "'");
        spec = templates[name];
    }
    Json attributes = spec.value("attributes", Json::object());
    for (const auto& [k, v] : nodeAttributes.items()) attributes[k] = v;
    for (const auto& [k, v] : entry.items()) {
        if (k == "name" || k == "template") continue;
        if (k == "attributes") {
            if (!v.is_object()) fail(pointer + "/attributes", "expected an object");
            for (const auto& [ak, av] : v.items()) attributes[ak] = av;
            continue;
        }
        spec[k] = v;
    }
    spec["attributes"] = attributes;
    spec["id"] = edgeId + "." + text(entry, "name", pointer);
    try {
        auto parsed = agent::parseAgentSpec(spec, pointer);
        agent::validateAgentSpec(parsed, pointer);
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const AtmosphereError& e) {
        fail(pointer, e.what());
    }
}

Generator generatorOf(const Json& j, const std::string& pointer) {
    Generator g;
    if (!j.is_object() || j.size() != 1) fail(pointer, "expected an object with exactly one generator kind");
    const auto& [kind, arg] = *j.items().begin();
    if (kind == "constant") {
        g.kind = Generator::Kind::Constant;
        g.constant = arg;
    } else if (kind == "uniform") {
        g.kind = Generator::Kind::Uniform;
        if (!arg.is_array() || arg.size() != 2 || !arg[0].is_number_integer() || !arg[1].is_number_integer()) {
            fail(pointer + "/uniform", "expected [low, high] integers");
        }
        g.low = arg[0].get<std::int64_t>();
        g.high = arg[1].get<std::int64_t>();
        if (g.low > g.high) fail(pointer + "/uniform", "low exceeds high");
    } else if (kind == "choice") {
        g.kind = Generator::Kind::Choice;
        if (!arg.is_array() || arg.empty()) fail(pointer + "/choice", "expected a non-empty array");
        g.choices.assign(arg.begin(), arg.end());
    } else if (kind == "bernoulli") {
        g.kind = Generator::Kind::Bernoulli;
        if (!arg.is_number() || arg.get<double>() < 0 || arg.get<double>() > 1) fail(pointer + "/bernoulli", "expected a probability");
        g.probability = arg.get<double>();
    } else if (kind == "sequence") {
        g.kind = Generator::Kind::Sequence;
    } else {
        fail(pointer, "unknown generator '" + kind + "'");
    }
    return g;
}

NodeSpec edgeOf(const Json& j, const std::string& pointer, const Json& templates) {
    EdgeNodeConfig c;
    c.id = text(j, "id", pointer);
    c.fog = text(j, "fog", pointer);
    c.device = flagOr(j, "device", pointer, false);
    c.humidity = flagOr(j, "humidity", pointer, false);
    const Json attributes = j.value("attributes", Json::object());
    if (!attributes.is_object()) fail(pointer + "/attributes", "expected an object");
    if (auto it = j.find("agents"); it != j.end()) {
        if (!it->is_array()) fail(pointer + "/agents", "expected an array");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto at = pointer + "/agents/" + std::to_string(i);
            auto spec = agentOf((*it)[i], at, templates, c.id, attributes);
            if (!seen.insert(spec.id).second) fail(at + "/name", "duplicate agent '" + spec.id + "'");
            c.agents.push_back(std::move(spec));
        }
    }
    return {c.id, Tier::Edge, c};
}

NodeSpec fogOf(const Json& j, const std::string& pointer, const fs::path& baseDir) {
    FogNodeConfig c;
    c.id = text(j, "id", pointer);
    c.patterns = loadPatterns(j, pointer, baseDir);
    c.peers = names(j, "peers", pointer);
    c.clouds = names(j, "clouds", pointer);
    c.watermarkLagMs = integerOr(j, "watermarkLagMs", pointer, c.watermarkLagMs);
    return {c.id, Tier::Fog, c};
}

NodeSpec cloudOf(const Json& j, const std::string& pointer, const fs::path& baseDir) {
    CloudNodeConfig c;
    c.id = text(j, "id", pointer);
    c.patterns = loadPatterns(j, pointer, baseDir);
    c.fogs = names(j, "fogs", pointer);
    c.watermarkLagMs = integerOr(j, "watermarkLagMs", pointer, c.watermarkLagMs);
    if (auto it = j.find("transformers"); it != j.end()) {
        if (!it->is_object()) fail(pointer + "/transformers", "expected an object");
        for (const auto& [id, t] : it->items()) {
            const auto at = pointer + "/transformers/" + id;
            runtime::TransformerSpec spec;
            spec.id = id;
            spec.identity = flagOr(t, "identity", at, false);
            if (!spec.identity) {
                spec.stream = text(t, "stream", at);
                const auto& fields = member(t, "fields", at);
                if (!fields.is_array()) fail(at + "/fields", "expected an array");
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    const auto fp = at + "/fields/" + std::to_string(i);
                    runtime::FieldMapping m;
                    m.field = text(fields[i], "field", fp);
                    m.source = textOr(fields[i], "source", fp, m.field);
                    if (fields[i].contains("default")) m.fallback = fields[i]["default"];
                    spec.fields.push_back(std::move(m));
                }
            }
            c.transformers[id] = std::move(spec);
        }
    }
    if (auto it = j.find("sources"); it != j.end()) {
        if (!it->is_array()) fail(pointer + "/sources", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto at = pointer + "/sources/" + std::to_string(i);
            runtime::CloudSource s{text((*it)[i], "name", at), text((*it)[i], "transformer", at)};
            if (!c.transformers.count(s.transformer)) fail(at + "/transformer", "unknown transformer '" + s.transformer + "'");
            c.sources.push_back(std::move(s));
        }
    }
    if (auto it = j.find("sinks"); it != j.end()) {
        if (!it->is_object()) fail(pointer + "/sinks", "expected an object");
        for (const auto& [target, s] : it->items()) {
            const auto at = pointer + "/sinks/" + target;
            runtime::SinkSpec sink;
            if (flagOr(s, "notification", at, false)) {
                sink.kind = runtime::SinkSpec::Kind::Notification;
            } else {
                sink.topic = text(s, "topic", at);
            }
            c.sinks[target] = sink;
        }
    }
    return {c.id, Tier::Cloud, c};
}

NodeSpec userOf(const Json& j, const std::string& pointer) {
    UserNodeConfig c{text(j, "id", pointer), text(j, "fog", pointer)};
    return {c.id, Tier::User, c};
}

RunSpec runOf(const Json& j, const std::string& pointer) {
    RunSpec r;
    if (j.is_null()) return r;
    if (!j.is_object()) fail(pointer, "expected an object");
    r.durationS = numberOr(j, "duration", pointer, r.durationS);
    if (r.durationS <= 0) fail(pointer + "/duration", "must be positive");
    const auto qos = integerOr(j, "qos", pointer, 0);
    if (qos != 0 && qos != 1) fail(pointer + "/qos", "must be 0 or 1");
    r.qos = static_cast<std::uint8_t>(qos);
    const auto mode = textOr(j, "mode", pointer, "full");
    if (mode == "full") {
        r.mode = runtime::RunMode::Full;
    } else if (mode == "cep-only") {
        r.mode = runtime::RunMode::CepOnly;
    } else if (mode == "agents-only") {
        r.mode = runtime::RunMode::AgentsOnly;
    } else {
        fail(pointer + "/mode", "unknown mode '" + mode + "'");
    }
    const auto clock = textOr(j, "clock", pointer, "event_time");
    if (clock == "event_time" || clock == "event") {
        r.clock = cep::ClockMode::EventTime;
    } else if (clock == "processing_time" || clock == "processing") {
        r.clock = cep::ClockMode::ProcessingTime;
    } else {
        fail(pointer + "/clock", "unknown clock '" + clock + "'");
    }
    r.seed = static_cast<std::uint64_t>(integerOr(j, "seed", pointer, 1));
    r.warmupS = numberOr(j, "warmup", pointer, r.warmupS);
    const auto transport = textOr(j, "transport", pointer, "sim");
    if (transport == "sim") {
        r.transport = Transport::Sim;
    } else if (transport == "tcp") {
        r.transport = Transport::Tcp;
    } else {
        fail(pointer + "/transport", "unknown transport '" + transport + "'");
    }
    r.linkLatencyUs = integerOr(j, "linkLatencyUs", pointer, r.linkLatencyUs);
    r.drainTimeoutS = numberOr(j, "drainTimeout", pointer, r.drainTimeoutS);
    r.startMs = integerOr(j, "startMs", pointer, r.startMs);
    r.retryTimeoutMs = integerOr(j, "retryTimeoutMs", pointer, r.retryTimeoutMs);
    r.maxRetries = static_cast<int>(integerOr(j, "maxRetries", pointer, r.maxRetries));
    return r;
}

TimelineEntry timelineOf(const Json& j, const std::string& pointer) {
    TimelineEntry t;
    t.atMs = integerOr(j, "at", pointer, 0);
    t.node = text(j, "node", pointer);
    t.repeat = static_cast<int>(integerOr(j, "repeat", pointer, 1));
    t.everyMs = integerOr(j, "every", pointer, 0);
    if (t.atMs < 0) fail(pointer + "/at", "must not be negative");
    if (t.repeat < 1) fail(pointer + "/repeat", "must be at least 1");
    int actions = 0;
    if (auto it = j.find("sense"); it != j.end()) {
        ++actions;
        t.action = TimelineEntry::Action::Sense;
        t.sensor = text(*it, "sensor", pointer + "/sense");
        t.value = member(*it, "value", pointer + "/sense");
    }
    for (const char* key : {"publish", "request"}) {
        if (auto it = j.find(key); it != j.end()) {
            ++actions;
            t.action = std::string(key) == "publish" ? TimelineEntry::Action::Publish : TimelineEntry::Action::Request;
            t.stream = text(*it, "stream", pointer + "/" + key);
            t.payload = it->value("fields", Json::object());
        }
    }
    if (auto it = j.find("source"); it != j.end()) {
        ++actions;
        t.action = TimelineEntry::Action::Source;
        t.source = text(*it, "name", pointer + "/source");
        t.payload = member(*it, "payload", pointer + "/source");
    }
    if (auto it = j.find("user"); it != j.end()) {
        ++actions;
        t.action = TimelineEntry::Action::UserPublish;
        if (!it->is_object()) fail(pointer + "/user", "expected an object");
        t.payload = *it;
    }
    if (actions != 1) fail(pointer, "expected exactly one of sense, publish, request, source, user");
    return t;
}

void checkStreamCovered(const SimulatorSpec& s, const event::SchemaRegistry& schemas, const std::string& pointer) {
    std::set<std::string> generated;
    for (const auto& [name, g] : s.fields) generated.insert(name);
    if (s.via == SimulatorSpec::Via::Sensor) {
        if (!generated.count("value")) fail(pointer + "/fields", "sensor simulators need a 'value' generator");
        return;
    }
    const auto* schema = schemas.find(s.stream);
    if (!schema) fail(pointer + "/stream", "unknown stream '" + s.stream + "'");
    for (const auto& [field, type] : schema->fields) {
        if (!generated.count(field)) fail(pointer + "/fields", "no generator for field '" + field + "'");
    }
    for (const auto& name : generated) {
        if (!schema->typeOf(name)) fail(pointer + "/fields/" + name, "field not in stream '" + s.stream + "'");
    }
}

}// namespace

ScenarioConfig parseScenario(const Json& doc, const std::string& baseDir) {
    ScenarioConfig config;
    if (!doc.is_object()) fail("", "expected an object");
    config.name = textOr(doc, "name", "", "scenario");
    const fs::path base(baseDir);

    if (auto it = doc.find("schemas"); it != doc.end()) {
        if (!it->is_object()) fail("/schemas", "expected an object");
        for (const auto& [stream, fields] : it->items()) {
            const auto at = "/schemas/" + stream;
            if (!fields.is_object()) fail(at, "expected an object of field types");
            event::EventSchema schema{stream, {}};
            for (const auto& [field, type] : fields.items()) {
                auto parsed = type.is_string() ? event::parseDeclaredType(type.get<std::string>()) : std::nullopt;
                if (!parsed) fail(at + "/" + field, "unknown type");
                schema.fields.emplace_back(field, *parsed);
            }
            config.schemas.add(std::move(schema));
        }
    }
    const Json templates = doc.value("agentTemplates", Json::object());
    if (!templates.is_object()) fail("/agentTemplates", "expected an object");

    const auto& nodes = member(doc, "nodes", "");
    if (!nodes.is_array()) fail("/nodes", "expected an array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto at = "/nodes/" + std::to_string(i);
        const auto& j = nodes[i];
        const auto tier = text(j, "tier", at);
        NodeSpec spec;
        if (tier == "edge") {
            spec = edgeOf(j, at, templates);
        } else if (tier == "fog") {
            spec = fogOf(j, at, base);
        } else if (tier == "cloud") {
            spec = cloudOf(j, at, base);
        } else if (tier == "user") {
            spec = userOf(j, at);
        } else {
            fail(at + "/tier", "unknown tier '" + tier + "'");
        }
        if (spec.id.empty() || spec.id.find_first_of("/+#:") != std::string::npos) fail(at + "/id", "invalid node id");
        if (!ids.insert(spec.id).second) fail(at + "/id", "duplicate node id '" + spec.id + "'");
        config.nodes.push_back(std::move(spec));
    }

    auto tierOf = [&](const std::string& id) -> std::optional<Tier> {
        if (const auto* n = config.node(id)) return n->tier;
        return std::nullopt;
    };
    auto expect = [&](const std::string& at, const std::string& id, Tier tier) {
        const auto t = tierOf(id);
        if (!t) fail(at, "unknown node '" + id + "'");
        if (*t != tier) fail(at, "node '" + id + "' is not a " + toString(tier) + " node");
    };
    for (std::size_t i = 0; i < config.nodes.size(); ++i) {
        const auto at = "/nodes/" + std::to_string(i);
        const auto& n = config.nodes[i];
        if (const auto* e = std::get_if<EdgeNodeConfig>(&n.config)) expect(at + "/fog", e->fog, Tier::Fog);
        if (const auto* u = std::get_if<UserNodeConfig>(&n.config)) expect(at + "/fog", u->fog, Tier::Fog);
        if (const auto* f = std::get_if<FogNodeConfig>(&n.config)) {
            for (std::size_t k = 0; k < f->peers.size(); ++k) expect(at + "/peers/" + std::to_string(k), f->peers[k], Tier::Fog);
            for (std::size_t k = 0; k < f->clouds.size(); ++k) expect(at + "/clouds/" + std::to_string(k), f->clouds[k], Tier::Cloud);
            checkTargets(f->patterns, at, [f](const std::string& target) -> std::optional<std::string> {
                if (target == "fog" && f->peers.empty()) return "no peer fogs";
                if (target == "cloud" && f->clouds.empty()) return "no clouds";
                return std::nullopt;
            });
        }
        if (const auto* c = std::get_if<CloudNodeConfig>(&n.config)) {
            for (std::size_t k = 0; k < c->fogs.size(); ++k) expect(at + "/fogs/" + std::to_string(k), c->fogs[k], Tier::Fog);
            checkTargets(c->patterns, at, [c](const std::string& target) -> std::optional<std::string> {
                if (!c->sinks.count(target)) return "no sink for this target";
                return std::nullopt;
            });
        }
    }

    const auto all = config.allPatterns();
    cep::registerDerivedSchemas(all, config.schemas);
    for (std::size_t i = 0; i < config.nodes.size(); ++i) {
        const auto& n = config.nodes[i];
        const std::vector<pattern::PatternDef>* patterns = nullptr;
        if (const auto* f = std::get_if<FogNodeConfig>(&n.config)) patterns = &f->patterns;
        if (const auto* c = std::get_if<CloudNodeConfig>(&n.config)) patterns = &c->patterns;
        if (!patterns) continue;
        const auto at = "/nodes/" + std::to_string(i) + "/patterns";
        for (const auto& p : *patterns) {
            try {
                cep::inferOutputSchema(p, config.schemas);
            } catch (const AtmosphereError& e) {
                fail(at, "pattern '" + p.name + "': " + e.what());
            }
        }
        const auto cycle = cep::findCycle(*patterns);
        if (!cycle.empty()) fail(at, "pattern cycle through '" + cycle.front() + "'");
        std::set<std::string> seen;
        for (const auto& p : *patterns) {
            if (!seen.insert(p.name).second) fail(at, "duplicate pattern name '" + p.name + "'");
        }
        if (const auto* c = std::get_if<CloudNodeConfig>(&n.config)) {
            for (const auto& [id, t] : c->transformers) {
                if (!t.identity && !config.schemas.contains(t.stream)) {
                    fail("/nodes/" + std::to_string(i) + "/transformers/" + id + "/stream", "unknown stream '" + t.stream + "'");
                }
            }
        }
    }

    if (auto it = doc.find("simulators"); it != doc.end()) {
        if (!it->is_array()) fail("/simulators", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto at = "/simulators/" + std::to_string(i);
            const auto& j = (*it)[i];
            SimulatorSpec s;
            s.target = text(j, "target", at);
            expect(at + "/target", s.target, Tier::Edge);
            const auto via = textOr(j, "via", at, "mqtt");
            if (via == "mqtt") {
                s.via = SimulatorSpec::Via::Mqtt;
            } else if (via == "acl") {
                s.via = SimulatorSpec::Via::Acl;
            } else if (via == "sensor") {
                s.via = SimulatorSpec::Via::Sensor;
                s.sensor = text(j, "sensor", at);
            } else {
                fail(at + "/via", "unknown transport '" + via + "'");
            }
            s.stream = s.via == SimulatorSpec::Via::Sensor ? textOr(j, "stream", at, "") : text(j, "stream", at);
            s.rate = numberOr(j, "rate", at, s.rate);
            if (!(s.rate > 0)) fail(at + "/rate", "must be positive");
            s.seed = static_cast<std::uint64_t>(integerOr(j, "seed", at, static_cast<std::int64_t>(i + 1)));
            s.load = flagOr(j, "load", at, true);
            const auto& fields = member(j, "fields", at);
            if (!fields.is_object()) fail(at + "/fields", "expected an object");
            for (const auto& [name, g] : fields.items()) s.fields.emplace_back(name, generatorOf(g, at + "/fields/" + name));
            checkStreamCovered(s, config.schemas, at);
            config.simulators.push_back(std::move(s));
        }
    }

    if (auto it = doc.find("timeline"); it != doc.end()) {
        if (!it->is_array()) fail("/timeline", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto at = "/timeline/" + std::to_string(i);
            auto t = timelineOf((*it)[i], at);
            const auto tier = tierOf(t.node);
            if (!tier) fail(at + "/node", "unknown node '" + t.node + "'");
            const bool ok = (t.action == TimelineEntry::Action::Source && *tier == Tier::Cloud) ||
                            (t.action == TimelineEntry::Action::UserPublish && *tier == Tier::User) ||
                            (*tier == Tier::Edge && t.action != TimelineEntry::Action::Source &&
                             t.action != TimelineEntry::Action::UserPublish);
            if (!ok) fail(at, "action not available on " + std::string(toString(*tier)) + " node '" + t.node + "'");
            if (t.action == TimelineEntry::Action::Source) {
                const auto& c = std::get<CloudNodeConfig>(config.node(t.node)->config);
                const bool known = std::any_of(c.sources.begin(), c.sources.end(), [&](const auto& s) { return s.name == t.source; });
                if (!known) fail(at + "/source/name", "unknown source '" + t.source + "'");
            }
            config.timeline.push_back(std::move(t));
        }
        std::stable_sort(config.timeline.begin(), config.timeline.end(),
                         [](const TimelineEntry& a, const TimelineEntry& b) { return a.atMs < b.atMs; });
    }

    config.run = runOf(doc.value("run", Json()), "/run");
    return config;
}

ScenarioConfig loadScenario(const std::string& path) {
    std::string source;
    try {
        source = readFile(path);
    } catch (const ConfigError&) {
        throw ConfigError("cannot read scenario '" + path + "'");
    }
    Json doc;
    try {
        doc = Json::parse(source);
    } catch (const Json::parse_error& e) {
        throw ConfigError("scenario '" + path + "': " + e.what());
    }
    auto config = parseScenario(doc, fs::path(path).parent_path().string());
    config.path = path;
    return config;
}

}// namespace atmosphere::harness
