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

const char* toString(RunMode mode) {
    switch (mode) {
        case RunMode::Full: return "full";
        case RunMode::CepOnly: return "cep-only";
        case RunMode::AgentsOnly: return "agents-only";
    }
    return "?";
}

FogTopics::FogTopics(const std::string& fog)
    : in(fog + "/in"), outEdge(fog + "/out/edge"), outCloud(fog + "/out/cloud"), outFog(fog + "/out/fog"), user(fog + "/user") {}

std::string cloudSourceTopic(const std::string& cloud, const std::string& source) { return cloud + "/in/" + source; }
std::string cloudOutFogTopic(const std::string& cloud) { return cloud + "/out/fog"; }
std::string mqttEndpoint(const std::string& node) { return node + ":mqtt"; }
std::string gatewayEndpoint(const std::string& node) { return node + ":gateway"; }

FogNode::FogNode(NodeContext& context, FogNodeConfig config)
    : context(context), config(std::move(config)), names(this->config.id) {}

FogNode::~FogNode() { stop(); }

void FogNode::start() {
    mqtt::BrokerConfig brokerConfig;
    brokerConfig.retry = context.retry;
    mqttBroker = std::make_unique<BrokerServer>(context.loop, context.network, mqttEndpoint(config.id), context.counters,
                                                brokerConfig);
    mqttBroker->start();
    if (context.mode != RunMode::CepOnly) {
        agentGateway = std::make_unique<GatewayServer>(context.loop, context.network, gatewayEndpoint(config.id),
                                                       context.counters);
        agentGateway->start();
    }
    if (context.mode != RunMode::AgentsOnly) {
        cep::EngineOptions options;
        options.mode = context.clock;
        options.startMs = context.startMs;
        options.sourceId = config.id;
        options.now = [&loop = context.loop] { return loop.nowMs(); };
        cepEngine = std::make_unique<cep::Engine>(context.schemas, options);
        cepEngine->deployAll(config.patterns);
        mqttBroker->subscribeLocal("cep", names.in, [this](const std::string&, const std::string& payload) { onInput(payload); });
        armBoundary();
    }
    auto bridge = [&](const std::string& to, const std::string& from, const std::string& toTopic) {
        MqttClientOptions options;
        options.nodeId = config.id;
        options.endpoint = mqttEndpoint(to);
        options.clientId = config.id + "-bridge-" + to;
        options.retry = context.retry;
        auto client = std::make_unique<MqttClient>(context.loop, context.network, context.counters, options);
        client->start();
        auto* raw = client.get();
        mqttBroker->subscribeLocal("bridge:" + to, from, [this, raw, toTopic](const std::string&, const std::string& payload) {
            raw->publish(toTopic, payload, context.qos);
        });
        bridges.push_back(std::move(client));
    };
    for (const auto& peer : config.peers) bridge(peer, names.outFog, FogTopics(peer).in);
    for (const auto& cloud : config.clouds) bridge(cloud, names.outCloud, cloudSourceTopic(cloud, config.id));
}

void FogNode::stop() {
    if (boundaryTimer) context.loop.cancel(*boundaryTimer);
    boundaryTimer.reset();
    bridges.clear();
    if (agentGateway) agentGateway->stop();
    if (mqttBroker) mqttBroker->stop();
}

bool FogNode::ready() const {
    for (const auto& b : bridges) {
        if (!b->connected()) return false;
    }
    return mqttBroker != nullptr;
}

void FogNode::onInput(const std::string& payload) {
    auto deadLetter = [&](const std::string& reason) {
        ++deadLetterCount;
        context.journal.deadLetter(
            {{"t", context.loop.nowMs()}, {"node", config.id}, {"reason", reason}, {"payload", payload}});
    };
    event::Event e;
    try {
        e = event::decodeEvent(payload, cepEngine->schemas());
    } catch (const AtmosphereError& err) {
        deadLetter(err.what());
        return;
    }
    try {
        route(cepEngine->ingest(e));
    } catch (const cep::TimeRegressionError& err) {
        deadLetter(std::string("late event: ") + err.what());
    } catch (const AtmosphereError& err) {
        deadLetter(err.what());
    }
    armBoundary();
}

void FogNode::route(std::vector<cep::Emission> emissions) {
    for (auto& em : emissions) {
        const auto target = em.target.value_or("");
        std::string topic;
        if (target == "edge") {
            topic = names.outEdge;
        } else if (target == "cloud") {
            topic = names.outCloud;
        } else if (target == "fog") {
            topic = names.outFog;
        } else if (target == "user") {
            topic = names.user;
        }
        const auto payload = event::encodeEvent(em.event, cepEngine->schemas());
        context.journal.emission({{"t", context.loop.nowMs()},
                                  {"node", config.id},
                                  {"pattern", em.producedBy},
                                  {"target", target},
                                  {"topic", topic},
                                  {"payload", payload}});
        if (topic.empty()) continue;
        ++routedCount;
        mqttBroker->publishLocal(topic, payload, context.qos);
    }
}

void FogNode::armBoundary() {
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
