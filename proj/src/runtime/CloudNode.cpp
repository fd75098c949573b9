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

namespace {

const Json* lookup(const Json& raw, const std::string& path) {
    const Json* at = &raw;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!at->is_object()) return nullptr;
        auto it = at->find(key);
        if (it == at->end()) return nullptr;
        at = &*it;
        if (dot == std::string::npos) return at;
        start = dot + 1;
    }
}

}// namespace

event::Event transform(const TransformerSpec& spec, const Json& raw, const event::SchemaRegistry& schemas,
                       std::int64_t nowMs, const std::string& source) {
    if (spec.identity) {
        try {
            return event::fromJson(raw, schemas);
        } catch (const AtmosphereError& e) {
            throw ConfigError("transformer '" + spec.id + "': " + e.what());
        }
    }
    event::Event e;
    e.stream = spec.stream;
    e.source = source;
    e.timestamp = nowMs;
    if (const auto* ts = lookup(raw, "_ts"); ts && ts->is_number_integer()) e.timestamp = ts->get<std::int64_t>();
    for (const auto& m : spec.fields) {
        const Json* value = lookup(raw, m.source);
        if (!value) {
            if (!m.fallback) throw ConfigError("transformer '" + spec.id + "': missing source path '" + m.source + "'");
            value = &*m.fallback;
        }
        try {
            e.fields.emplace_back(m.field, event::fromJson(*value));
        } catch (const AtmosphereError& err) {
            throw ConfigError("transformer '" + spec.id + "': field '" + m.field + "': " + err.what());
        }
    }
    try {
        const auto* schema = schemas.find(e.stream);
        if (!schema) throw UnknownStreamError(e.stream);
        event::validate(e, schemas);
        return event::canonicalize(e, *schema);
    } catch (const AtmosphereError& err) {
        throw ConfigError("transformer '" + spec.id + "': " + err.what());
    }
}

CloudNode::CloudNode(NodeContext& context, CloudNodeConfig config) : context(context), config(std::move(config)) {}

CloudNode::~CloudNode() { stop(); }

void CloudNode::start() {
    mqtt::BrokerConfig brokerConfig;
    brokerConfig.retry = context.retry;
    mqttBroker = std::make_unique<BrokerServer>(context.loop, context.network, mqttEndpoint(config.id), context.counters,
                                                brokerConfig);
    mqttBroker->start();
    cep::EngineOptions options;
    options.mode = context.clock;
    options.startMs = context.startMs;
    options.sourceId = config.id;
    options.now = [&loop = context.loop] { return loop.nowMs(); };
    cepEngine = std::make_unique<cep::Engine>(context.schemas, options);
    cepEngine->deployAll(config.patterns);
    for (const auto& source : config.sources) {
        mqttBroker->subscribeLocal("source:" + source.name, cloudSourceTopic(config.id, source.name),
                                   [this, source](const std::string&, const std::string& payload) { onSource(source, payload); });
    }
    for (const auto& fog : config.fogs) {
        MqttClientOptions o;
        o.nodeId = config.id;
        o.endpoint = mqttEndpoint(fog);
        o.clientId = config.id + "-bridge-" + fog;
        o.retry = context.retry;
        auto client = std::make_unique<MqttClient>(context.loop, context.network, context.counters, o);
        client->start();
        auto* raw = client.get();
        const auto topic = FogTopics(fog).in;
        mqttBroker->subscribeLocal("bridge:" + fog, cloudOutFogTopic(config.id),
                                   [this, raw, topic](const std::string&, const std::string& payload) {
                                       raw->publish(topic, payload, context.qos);
                                   });
        bridges.push_back(std::move(client));
    }
    armBoundary();
}

void CloudNode::stop() {
    if (boundaryTimer) context.loop.cancel(*boundaryTimer);
    boundaryTimer.reset();
    bridges.clear();
    if (mqttBroker) mqttBroker->stop();
}

bool CloudNode::ready() const {
    for (const auto& b : bridges) {
        if (!b->connected()) return false;
    }
    return mqttBroker != nullptr;
}

void CloudNode::onSource(const CloudSource& source, const std::string& payload) {
    auto deadLetter = [&](const std::string& reason) {
        ++deadLetterCount;
        context.journal.deadLetter({{"t", context.loop.nowMs()},
                                    {"node", config.id},
                                    {"transformer", source.transformer},
                                    {"reason", reason},
                                    {"payload", payload}});
    };
    try {
        const auto raw = Json::parse(payload);
        const auto& spec = config.transformers.at(source.transformer);
        auto e = transform(spec, raw, cepEngine->schemas(), context.loop.nowMs(), source.name);
        route(cepEngine->ingest(e));
    } catch (const Json::parse_error& e) {
        deadLetter(std::string("malformed JSON: ") + e.what());
    } catch (const AtmosphereError& e) {
        deadLetter(e.what());
    }
    armBoundary();
}

void CloudNode::route(std::vector<cep::Emission> emissions) {
    for (auto& em : emissions) {
        const auto target = em.target.value_or("");
        const auto payload = event::encodeEvent(em.event, cepEngine->schemas());
        auto sink = config.sinks.find(target);
        Json line{{"t", context.loop.nowMs()}, {"node", config.id}, {"pattern", em.producedBy}, {"target", target}};
        if (sink == config.sinks.end()) {
            line["topic"] = "";
        } else if (sink->second.kind == SinkSpec::Kind::Topic) {
            line["topic"] = sink->second.topic;
        } else {
            line["sink"] = "notification";
        }
        line["payload"] = payload;
        context.journal.emission(line);
        if (sink == config.sinks.end()) continue;
        if (sink->second.kind == SinkSpec::Kind::Topic) {
            mqttBroker->publishLocal(sink->second.topic, payload, context.qos);
        } else {
            context.journal.alert({{"t", context.loop.nowMs()},
                                   {"node", config.id},
                                   {"kind", "notification"},
                                   {"stream", em.event.stream},
                                   {"payload", payload}});
        }
    }
}

void CloudNode::armBoundary() {
    auto next = cepEngine->nextBoundary();
    const std::int64_t lag = context.clock == cep::ClockMode::EventTime ? config.watermarkLagMs : 0;
    if (!next) {
        if (boundaryTimer) context.loop.cancel(*boundaryTimer);
        boundaryTimer.reset();
        return;
    }
    const auto due = *next + lag;
    if (boundaryTimer && boundaryAtMs == due) return;
    if (boundaryTimer) context.loop.cancel(*boundaryTimer);
    boundaryAtMs = due;
    boundaryTimer = context.loop.schedule((due - context.loop.nowMs()) * 1000, [this, lag] {
        boundaryTimer.reset();
        const auto now = context.loop.nowMs();
        while (auto next = cepEngine->nextBoundary()) {
            if (*next + lag > now) break;
            const auto to = context.clock == cep::ClockMode::EventTime ? *next : std::max(now, cepEngine->now());
            route(cepEngine->advanceClock(to));
            if (context.clock == cep::ClockMode::ProcessingTime) break;
        }
        armBoundary();
    });
}

}// namespace atmosphere::runtime
