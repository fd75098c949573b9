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

#ifndef ATMOSPHERE_RUNTIME_NODES_HPP_
#define ATMOSPHERE_RUNTIME_NODES_HPP_

#include <atmosphere/agent/Agent.hpp>
#include <atmosphere/cep/Engine.hpp>
#include <atmosphere/event/Schema.hpp>
#include <atmosphere/pattern/PatternDef.hpp>
#include <atmosphere/runtime/Gateway.hpp>
#include <atmosphere/runtime/Journal.hpp>
#include <atmosphere/runtime/Mqtt.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace atmosphere::runtime {

enum class RunMode { Full, CepOnly, AgentsOnly };
const char* toString(RunMode mode);

struct FogTopics {
    explicit FogTopics(const std::string& fog);
    std::string in, outEdge, outCloud, outFog, user;
};

std::string cloudSourceTopic(const std::string& cloud, const std::string& source);
std::string cloudOutFogTopic(const std::string& cloud);
std::string mqttEndpoint(const std::string& node);
std::string gatewayEndpoint(const std::string& node);

/// What every node of one process shares.
struct NodeContext {
    EventLoop& loop;
    Network& network;
    RunCounters& counters;
    Journal& journal;
    event::SchemaRegistry schemas;
    cep::ClockMode clock = cep::ClockMode::EventTime;
    RunMode mode = RunMode::Full;
    std::uint8_t qos = 0;
    std::int64_t startMs = 0;
    mqtt::RetryPolicy retry;
};

struct FogNodeConfig {
    std::string id;
    std::vector<pattern::PatternDef> patterns;
    /// Peer fogs receiving this fog's `out/fog` stream on their input topic.
    std::vector<std::string> peers;
    /// Clouds receiving this fog's `out/cloud` stream on `<cloud>/in/<fog>`.
    std::vector<std::string> clouds;
    /// Event time only: how long after a batch boundary the boundary is fired.
    std::int64_t watermarkLagMs = 1000;
};

/// Broker, agent gateway and CEP engine of one fog node.
class FogNode {
  public:
    FogNode(NodeContext& context, FogNodeConfig config);
    ~FogNode();

    void start();
    void stop();
    bool ready() const;

    const std::string& id() const { return config.id; }
    const FogTopics& topics() const { return names; }
    BrokerServer& broker() { return *mqttBroker; }
    GatewayServer* gateway() { return agentGateway.get(); }
    const cep::Engine* engine() const { return cepEngine.get(); }
    std::uint64_t routed() const { return routedCount; }
    std::uint64_t deadLettered() const { return deadLetterCount; }

  private:
    void onInput(const std::string& payload);
    void route(std::vector<cep::Emission> emissions);
    void armBoundary();

    NodeContext& context;
    FogNodeConfig config;
    FogTopics names;
    std::unique_ptr<BrokerServer> mqttBroker;
    std::unique_ptr<GatewayServer> agentGateway;
    std::unique_ptr<cep::Engine> cepEngine;
    std::vector<std::unique_ptr<MqttClient>> bridges;
    std::optional<TimerId> boundaryTimer;
    std::int64_t boundaryAtMs = 0;
    std::uint64_t routedCount = 0;
    std::uint64_t deadLetterCount = 0;
};

struct FieldMapping {
    std::string source;// dotted path into the raw JSON
    std::string field;
    std::optional<Json> fallback;
};

struct TransformerSpec {
    std::string id;
    std::string stream;
    std::vector<FieldMapping> fields;
    /// Identity transformers accept already-encoded events.
    bool identity = false;
};

/// Maps raw JSON to a canonical event; throws ConfigError naming the transformer on failure.
event::Event transform(const TransformerSpec& spec, const Json& raw, const event::SchemaRegistry& schemas,
                       std::int64_t nowMs, const std::string& source);

struct SinkSpec {
    enum class Kind { Topic, Notification };
    Kind kind = Kind::Topic;
    std::string topic;
};

struct CloudSource {
    std::string name;// topic is `<cloud>/in/<name>`
    std::string transformer;
};

struct CloudNodeConfig {
    std::string id;
    std::vector<CloudSource> sources;
    std::map<std::string, TransformerSpec> transformers;
    std::vector<pattern::PatternDef> patterns;
    std::map<std::string, SinkSpec> sinks;// target tag -> sink
    /// Fogs receiving `<cloud>/out/fog` on their input topic.
    std::vector<std::string> fogs;
    std::int64_t watermarkLagMs = 1000;
};

class CloudNode {
  public:
    CloudNode(NodeContext& context, CloudNodeConfig config);
    ~CloudNode();

    void start();
    void stop();
    bool ready() const;

    const std::string& id() const { return config.id; }
    BrokerServer& broker() { return *mqttBroker; }
    const cep::Engine* engine() const { return cepEngine.get(); }
    std::uint64_t deadLettered() const { return deadLetterCount; }

  private:
    void onSource(const CloudSource& source, const std::string& payload);
    void route(std::vector<cep::Emission> emissions);
    void armBoundary();

    NodeContext& context;
    CloudNodeConfig config;
    std::unique_ptr<BrokerServer> mqttBroker;
    std::unique_ptr<cep::Engine> cepEngine;
    std::vector<std::unique_ptr<MqttClient>> bridges;
    std::optional<TimerId> boundaryTimer;
    std::int64_t boundaryAtMs = 0;
    std::uint64_t deadLetterCount = 0;
};

struct EdgeNodeConfig {
    std::string id;
    std::string fog;
    std::vector<agent::AgentSpec> agents;
    /// Registers the node's own id at the gateway so it can originate ACL traffic.
    bool device = false;
    /// Full mode only: one INFORM to the gateway service per second.
    bool humidity = false;
};

/**
 * Agents of one edge device with a shared broker session and gateway
 * connection. The node itself is registered as an agent under its own id;
 * it originates bench traffic and tracks round trips by their `seq` field.
 */
class EdgeNode {
  public:
    EdgeNode(NodeContext& context, EdgeNodeConfig config);
    ~EdgeNode();

    void start();
    void stop();
    bool ready() const;

    void sense(const std::string& sensor, const event::FieldValue& value);
    /// Publishes an event on the fog input topic.
    void publish(const std::string& stream, const Json& fields);
    /// Sends the event as a REQUEST to the gateway service.
    void request(const std::string& stream, const Json& fields);
    void deliver(const std::string& agentId, const agent::Stimulus& stimulus);

    const std::string& id() const { return config.id; }
    agent::Agent* agent(const std::string& id);
    const std::vector<std::unique_ptr<agent::Agent>>& agents() const { return hosted; }
    std::uint64_t initiated() const { return started; }
    std::uint64_t completed() const { return finished; }
    std::size_t pendingRoundTrips() const { return outstanding.size(); }
    std::vector<std::string> pendingIds() const;
    std::size_t inflight() const { return mqttClient ? mqttClient->inflight() : 0; }
    std::uint64_t abandoned() const { return mqttClient ? mqttClient->abandoned() : 0; }

  private:
    void onBroker(const std::string& topic, const std::string& payload);
    void onAcl(agent::AclMessage message);
    void track(const Json& fields);
    bool complete(const Json& content);
    void execute(agent::Agent& agent, const std::vector<agent::Effect>& effects);
    std::string encode(const std::string& stream, const Json& fields, const std::string& source);
    void sendHumidity();

    NodeContext& context;
    EdgeNodeConfig config;
    FogTopics fog;
    std::vector<std::unique_ptr<agent::Agent>> hosted;
    std::unique_ptr<MqttClient> mqttClient;
    std::unique_ptr<GatewayClient> gatewayClient;
    std::vector<TimerId> timers;
    std::vector<std::shared_ptr<std::function<void()>>> timerTasks;
    std::map<std::string, std::int64_t> outstanding;// seq -> sent at (us)
    std::uint64_t started = 0;
    std::uint64_t finished = 0;
    bool mqttReady = false;
    bool gatewayReady = false;
};

struct UserNodeConfig {
    std::string id;
    std::string fog;
};

/// Subscribes to the fog's user topic and can publish rule updates on it.
class UserNode {
  public:
    UserNode(NodeContext& context, UserNodeConfig config);
    ~UserNode();

    void start();
    void stop();
    bool ready() const { return mqttReady; }

    void publish(const Json& content);
    const std::string& id() const { return config.id; }
    std::uint64_t received() const { return receivedCount; }

  private:
    NodeContext& context;
    UserNodeConfig config;
    FogTopics fog;
    std::unique_ptr<MqttClient> mqttClient;
    std::uint64_t receivedCount = 0;
    bool mqttReady = false;
};

}// namespace atmosphere::runtime

#endif// ATMOSPHERE_RUNTIME_NODES_HPP_
