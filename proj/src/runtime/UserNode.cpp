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

#include <atmosphere/runtime/Nodes.hpp>

namespace atmosphere::runtime {

UserNode::UserNode(NodeContext& context, UserNodeConfig config)
    : context(context), config(std::move(config)), fog(this->config.fog) {}

UserNode::~UserNode() { stop(); }

void UserNode::start() {
    MqttClientOptions options;
    options.nodeId = config.id;
    options.endpoint = mqttEndpoint(config.fog);
    options.clientId = config.id;
    options.retry = context.retry;
    mqttClient = std::make_unique<MqttClient>(context.loop, context.network, context.counters, options);
    mqttClient->onMessage([this](const std::string& topic, const std::string& payload) {
        Json content = Json::parse(payload, nullptr, false);
        if (content.is_object() && content.value("_src", std::string()) == config.id) return;
        ++receivedCount;
        context.journal.alert({{"t", context.loop.nowMs()}, {"node", config.id}, {"topic", topic}, {"payload", payload}});
    });
    mqttClient->subscribe(fog.user, context.qos);
    mqttClient->start([this](const std::string& error) { mqttReady = error.empty(); });
}

void UserNode::stop() {
    if (mqttClient) mqttClient->disconnect();
}

void UserNode::publish(const Json& content) {
    Json object = Json::object();
    object["_stream"] = content.value("_stream", std::string("UserMessage"));
    object["_ts"] = context.loop.nowMs();
    object["_src"] = config.id;
    for (const auto& [k, v] : content.items()) {
        if (k != "_stream") object[k] = v;
    }
    mqttClient->publish(fog.user, object.dump(), context.qos);
}

}// namespace atmosphere::runtime
