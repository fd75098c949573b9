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

#include <atmosphere/event/EventCodec.hpp>
#include <atmosphere/runtime/Nodes.hpp>

#include <spdlog/spdlog.h>

namespace atmosphere::runtime {

using agent::AclMessage;

namespace {
constexpr const char* kSeqField = "seq";
constexpr std::int64_t kHumidityPeriodUs = 1'000'000;

std::string seqKey(const Json& seq) { return seq.is_string() ? seq.get<std::string>() : seq.dump(); }
}

EdgeNode::EdgeNode(NodeContext& context, EdgeNodeConfig config)
    : context(context), config(std::move(config)), fog(this->config.fog) {
    for (const auto& spec : this->config.agents) hosted.push_back(std::make_unique<agent::Agent>(spec));
}

EdgeNode::~EdgeNode() { stop(); }

void EdgeNode::start() {
    if (context.mode != RunMode::AgentsOnly) {
        MqttClientOptions options;
        options.nodeId = config.id;
        options.endpoint = mqttEndpoint(config.fog);
        options.clientId = config.id;
        options.retry = context.retry;
        mqttClient = std::make_unique<MqttClient>(context.loop, context.network, context.counters, options);
        mqttClient->onMessage([this](const std::string& topic, const std::string& payload) { onBroker(topic, payload); });
        mqttClient->subscribe(fog.outEdge, context.qos);
        mqttClient->subscribe(fog.user, context.qos);
        mqttClient->start([this](const std::string& error) { mqttReady = error.empty(); });
    }
    if (context.mode != RunMode::CepOnly) {
        gatewayClient = std::make_unique<GatewayClient>(context.loop, context.network, context.counters, config.id,
                                                        gatewayEndpoint(config.fog));
        gatewayClient->onMessage([this](AclMessage m) { onAcl(std::move(m)); });
        if (config.device || config.humidity) gatewayClient->registerAgent(config.id, config.id);
        for (const auto& a : hosted) gatewayClient->registerAgent(a->id(), config.id);
        gatewayClient->start([this](const std::string& error) { gatewayReady = error.empty(); });
    }
    for (const auto& a : hosted) {
        for (const auto& [ruleId, periodMs] : a->timers()) {
            auto* target = a.get();
            auto tick = std::make_shared<std::function<void()>>();
            *tick = [this, target, ruleId = ruleId, periodMs = periodMs, weak = std::weak_ptr(tick)] {
                execute(*target, target->step(agent::TimerFire{ruleId}, context.loop.nowMs()));
                if (auto self = weak.lock()) timers.push_back(context.loop.schedule(periodMs * 1000, *self));
            };
            timerTasks.push_back(tick);
            timers.push_back(context.loop.schedule(periodMs * 1000, *tick));
        }
    }
    if (config.humidity && context.mode == RunMode::Full) {
        auto tick = std::make_shared<std::function<void()>>();
        *tick = [this, weak = std::weak_ptr(tick)] {
            sendHumidity();
            if (auto self = weak.lock()) timers.push_back(context.loop.schedule(kHumidityPeriodUs, *self));
        };
        timerTasks.push_back(tick);
        timers.push_back(context.loop.schedule(kHumidityPeriodUs, *tick));
    }
}

void EdgeNode::stop() {
    for (auto id : timers) context.loop.cancel(id);
    timers.clear();
    timerTasks.clear();
    if (mqttClient) mqttClient->disconnect();
    if (gatewayClient) gatewayClient->close();
}

bool EdgeNode::ready() const {
    const bool mqttOk = context.mode == RunMode::AgentsOnly || mqttReady;
    const bool gatewayOk = context.mode == RunMode::CepOnly || gatewayReady;
    return mqttOk && gatewayOk;
}

agent::Agent* EdgeNode::agent(const std::string& id) {
    for (auto& a : hosted) {
        if (a->id() == id) return a.get();
    }
    return nullptr;
}

void EdgeNode::sense(const std::string& sensor, const event::FieldValue& value) {
    for (auto& a : hosted) {
        const auto& sensors = a->spec().sensors;
        if (std::find(sensors.begin(), sensors.end(), sensor) == sensors.end()) continue;
        execute(*a, a->step(agent::SensorSample{sensor, value}, context.loop.nowMs()));
    }
}

void EdgeNode::deliver(const std::string& agentId, const agent::Stimulus& stimulus) {
    if (auto* a = agent(agentId)) execute(*a, a->step(stimulus, context.loop.nowMs()));
}

std::string EdgeNode::encode(const std::string& stream, const Json& fields, const std::string& source) {
    Json object = Json::object();
    object["_stream"] = stream;
    object["_ts"] = context.loop.nowMs();
    object["_src"] = source;
    for (const auto& [k, v] : fields.items()) object[k] = v;
    if (!context.schemas.contains(stream)) return object.dump();
    return event::encodeEvent(event::fromJson(object, context.schemas), context.schemas);
}

void EdgeNode::track(const Json& fields) {
    auto it = fields.find(kSeqField);
    if (it == fields.end()) return;
    outstanding[seqKey(*it)] = context.loop.nowUs();
    ++started;
}

bool EdgeNode::complete(const Json& content) {
    auto it = content.find(kSeqField);
    if (it == content.end()) return false;
    auto pending = outstanding.find(seqKey(*it));
    if (pending == outstanding.end()) return false;
    context.journal.latency({pending->first, pending->second, context.loop.nowUs()});
    outstanding.erase(pending);
    ++finished;
    return true;
}

std::vector<std::string> EdgeNode::pendingIds() const {
    std::vector<std::string> ids;
    for (const auto& [id, at] : outstanding) ids.push_back(id);
    return ids;
}

void EdgeNode::publish(const std::string& stream, const Json& fields) {
    if (!mqttClient) return;
    std::string payload;
    try {
        payload = encode(stream, fields, config.id);
    } catch (const AtmosphereError& e) {
        context.journal.deadLetter({{"t", context.loop.nowMs()}, {"node", config.id}, {"reason", e.what()}});
        return;
    }
    track(fields);
    mqttClient->publish(fog.in, std::move(payload), context.qos);
}

void EdgeNode::request(const std::string& stream, const Json& fields) {
    if (!gatewayClient) return;
    AclMessage m;
    m.performative = agent::Performative::Request;
    m.sender = config.id;
    m.receivers = {agent::kGatewayAgent};
    m.content = Json::object();
    m.content["_stream"] = stream;
    for (const auto& [k, v] : fields.items()) m.content[k] = v;
    m.sentAt = context.loop.nowMs();
    track(fields);
    gatewayClient->send(m);
}

void EdgeNode::sendHumidity() {
    if (!gatewayClient) return;
    AclMessage m;
    m.sender = config.id;
    m.receivers = {agent::kGatewayAgent};
    m.content = Json::object();
    m.content["_stream"] = "Humidity";
    m.content["value"] = 40 + static_cast<int>((context.loop.nowMs() / 1000) % 20);
    m.sentAt = context.loop.nowMs();
    gatewayClient->send(m);
}

void EdgeNode::onBroker(const std::string&, const std::string& payload) {
    Json content;
    try {
        content = Json::parse(payload);
    } catch (const Json::parse_error& e) {
        context.journal.deadLetter({{"t", context.loop.nowMs()}, {"node", config.id}, {"reason", e.what()}, {"payload", payload}});
        return;
    }
    if (!content.is_object()) return;
    complete(content);
    if (hosted.empty()) return;
    agent::MessageStimulus stimulus{content.value("_stream", std::string()), content, content.value("_src", std::string())};
    for (auto& a : hosted) execute(*a, a->step(stimulus, context.loop.nowMs()));
}

void EdgeNode::onAcl(AclMessage message) {
    if (message.deliveredTo == config.id) {
        if (complete(message.content)) return;
        context.journal.effect({{"t", context.loop.nowMs()},
                                {"node", config.id},
                                {"agent", config.id},
                                {"effect", "received " + agent::encodeAcl(message)}});
        return;
    }
    if (auto* a = agent(message.deliveredTo)) execute(*a, a->step(agent::stimulusFrom(message), context.loop.nowMs()));
}

void EdgeNode::execute(agent::Agent& a, const std::vector<agent::Effect>& effects) {
    for (const auto& e : effects) {
        context.journal.effect(
            {{"t", context.loop.nowMs()}, {"node", config.id}, {"agent", a.id()}, {"effect", agent::describe(e)}});
        if (const auto* out = std::get_if<agent::effect::OutMessage>(&e)) {
            if (gatewayClient) gatewayClient->send(out->message);
        } else if (const auto* pub = std::get_if<agent::effect::FogPublish>(&e)) {
            if (!mqttClient) continue;
            std::string topic = pub->topic;
            if (topic == "$fog.in") {
                topic = fog.in;
            } else if (topic == "$fog.user") {
                topic = fog.user;
            }
            try {
                mqttClient->publish(topic, encode(pub->stream, pub->fields, a.id()), context.qos);
            } catch (const AtmosphereError& err) {
                context.journal.deadLetter({{"t", context.loop.nowMs()}, {"node", config.id}, {"agent", a.id()}, {"reason", err.what()}});
            }
        }
    }
}

}// namespace atmosphere::runtime
