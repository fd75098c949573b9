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
#include <atmosphere/agent/GatewayRegistry.hpp>

#include <gtest/gtest.h>

namespace atmosphere::agent {
namespace {

using event::FieldValue;

AgentSpec lightAgent() {
    return parseAgentSpec(Json::parse(R"({
        "id": "room1.light", "attributes": {"floor": 3}, "actuators": {"external_light": false},
        "rules": [{"id": "low-o2", "trigger": {"message": "O2Level"}, "guard": "value <= 90",
                   "actions": [{"type": "actuate", "actuator": "external_light", "value": true},
                               {"type": "publishFog", "topic": "f1/in", "stream": "ExternalLight",
                                "fields": {"isOn": true, "floor": "$attr.floor"}}]}]})"));
}

AgentSpec sensorAgent(const std::string& id = "room1.o2") {
    auto j = Json::parse(R"({"sensors": ["o2"],
        "rules": [{"id": "share", "trigger": {"sensor": "o2"},
                   "actions": [{"type": "broadcast", "stream": "O2Level", "fields": {"value": "$value"}}]}]})");
    j["id"] = id;
    return parseAgentSpec(j);
}

MessageStimulus o2(double v) {
    Json content = Json::object();
    content["_stream"] = "O2Level";
    content["value"] = v;
    return {"O2Level", content, "room1.o2"};
}

TEST(AgentTest, LowOxygenActuatesAndPublishesWithFloor) {
    Agent agent(lightAgent());
    auto effects = agent.step(o2(85), 1000);
    ASSERT_EQ(effects.size(), 2u);
    const auto& act = std::get<effect::Actuation>(effects[0]);
    EXPECT_EQ(act.actuator, "external_light");
    EXPECT_EQ(act.value, FieldValue(true));
    const auto& pub = std::get<effect::FogPublish>(effects[1]);
    EXPECT_EQ(pub.topic, "f1/in");
    EXPECT_EQ(pub.stream, "ExternalLight");
    EXPECT_EQ(pub.fields, Json::parse(R"({"isOn": true, "floor": 3})"));
    EXPECT_EQ(agent.actuators().at("external_light"), FieldValue(true));
}

TEST(AgentTest, GuardBoundary) {
    Agent agent(lightAgent());
    EXPECT_TRUE(agent.step(o2(95), 0).empty());
    EXPECT_TRUE(agent.step(o2(90.0001), 0).empty());
    EXPECT_EQ(agent.step(o2(90), 0).size(), 2u);
}

TEST(AgentTest, SensorSampleBroadcasts) {
    Agent agent(sensorAgent());
    auto effects = agent.step(SensorSample{"o2", FieldValue(std::int64_t{92})}, 5);
    ASSERT_EQ(effects.size(), 1u);
    const auto& m = std::get<effect::OutMessage>(effects[0]).message;
    EXPECT_TRUE(m.broadcast);
    EXPECT_EQ(m.sender, "room1.o2");
    EXPECT_EQ(m.stream(), "O2Level");
    EXPECT_EQ(m.content["value"], 92);
    EXPECT_EQ(m.sentAt, 5);
}

TEST(AgentTest, UndeclaredStimulusIgnored) {
    Agent agent(sensorAgent());
    EXPECT_TRUE(agent.step(SensorSample{"humidity", FieldValue(1.0)}, 0).empty());
    EXPECT_TRUE(agent.step(TimerFire{"nope"}, 0).empty());
}

TEST(AgentTest, GuardTypeErrorSkipsRule) {
    auto spec = lightAgent();
    Agent agent(spec);
    Json content = Json::object();
    content["_stream"] = "O2Level";
    content["value"] = "high";
    auto effects = agent.step(MessageStimulus{"O2Level", content, "x"}, 0);
    ASSERT_EQ(effects.size(), 1u);
    EXPECT_TRUE(std::get<effect::LogLine>(effects[0]).error);
    EXPECT_EQ(agent.step(o2(80), 0).size(), 2u);
}

TEST(AgentTest, EffectsFollowRuleOrder) {
    auto spec = parseAgentSpec(Json::parse(R"({"id": "a", "sensors": ["s"], "state": {"n": 0},
        "rules": [{"id": "r1", "trigger": {"sensor": "s"}, "actions": [{"type": "setState", "var": "n", "expr": "state.n + 1"}]},
                  {"id": "r2", "trigger": {"sensor": "s"}, "actions": [{"type": "log", "text": "n=$state.n v=$value"}]},
                  {"id": "r3", "trigger": {"sensor": "s"}, "guard": "state.n > 1", "actions": [{"type": "log", "text": "again"}]}]})"));
    Agent agent(spec);
    auto first = agent.step(SensorSample{"s", FieldValue(std::int64_t{7})}, 0);
    ASSERT_EQ(first.size(), 2u);
    EXPECT_EQ(describe(first[0]), "state n=1");
    EXPECT_EQ(describe(first[1]), "log n=1 v=7");
    auto second = agent.step(SensorSample{"s", FieldValue(std::int64_t{8})}, 0);
    ASSERT_EQ(second.size(), 3u);
    EXPECT_EQ(describe(second[2]), "log again");
}

TEST(AgentTest, DeterministicReplay) {
    std::vector<std::string> a, b;
    for (auto* log : {&a, &b}) {
        Agent light(lightAgent());
        for (double v : {95.0, 85.0, 90.0, 91.0, 12.5}) {
            for (const auto& e : light.step(o2(v), 0)) log->push_back(describe(e));
        }
    }
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.size(), 6u);
}

TEST(AgentTest, RuleUpdateReplacesRule) {
    Agent agent(lightAgent());
    Json content = Json::object();
    content["_stream"] = kRuleUpdateStream;
    content["agent"] = "light";
    content["rule"] = R"({"id": "low-o2", "trigger": {"message": "O2Level"}, "guard": "value <= 80",
                          "actions": [{"type": "actuate", "actuator": "external_light", "value": true}]})";
    auto effects = agent.step(MessageStimulus{kRuleUpdateStream, content, "u"}, 0);
    ASSERT_EQ(effects.size(), 1u);
    EXPECT_FALSE(std::get<effect::LogLine>(effects[0]).error);
    EXPECT_TRUE(agent.step(o2(85), 0).empty());
    EXPECT_EQ(agent.step(o2(75), 0).size(), 1u);
    ASSERT_EQ(agent.spec().rules.size(), 1u);
}

TEST(AgentTest, RuleUpdateRejectsUnknownActuator) {
    Agent agent(lightAgent());
    Json content = Json::object();
    content["_stream"] = kRuleUpdateStream;
    content["agent"] = "*";
    content["rule"] = R"({"id": "x", "trigger": {"message": "O2Level"},
                          "actions": [{"type": "actuate", "actuator": "siren", "value": true}]})";
    auto effects = agent.step(MessageStimulus{kRuleUpdateStream, content, "u"}, 0);
    ASSERT_EQ(effects.size(), 1u);
    EXPECT_TRUE(std::get<effect::LogLine>(effects[0]).error);
    EXPECT_EQ(agent.spec().rules.size(), 1u);
}

TEST(AgentTest, SpecValidation) {
    EXPECT_THROW(parseAgentSpec(Json::parse(R"({"id": "a", "rules": [{"id": "r", "trigger": {"sensor": "o2"},
        "actions": [{"type": "log", "text": "x"}]}]})")),
                 ConfigError);
    EXPECT_THROW(parseAgentSpec(Json::parse(R"({"id": "a", "sensors": ["o2"], "rules": [{"id": "r", "trigger": {"sensor": "o2"},
        "guard": "state.missing > 1", "actions": [{"type": "log", "text": "x"}]}]})")),
                 ConfigError);
    EXPECT_THROW(parseAgentSpec(Json::parse(R"({"id": "a", "sensors": ["o2"], "rules": [{"id": "r", "trigger": {"sensor": "o2"},
        "actions": []}]})")),
                 ConfigError);
}

TEST(GatewayRegistryTest, BroadcastSkipsSender) {
    GatewayRegistry reg;
    for (int i = 1; i <= 6; ++i) reg.registerAgent("e" + std::to_string(i));
    AclMessage m;
    m.sender = "e2";
    m.broadcast = true;
    m.content = Json::parse(R"({"_stream": "O2Level", "value": 92})");
    EXPECT_EQ(reg.dispatch(m), (std::vector<std::string>{"e1", "e3", "e4", "e5", "e6"}));
    EXPECT_EQ(reg.queueSize("e2"), 0u);
    for (auto id : {"e1", "e3", "e4", "e5", "e6"}) EXPECT_EQ(reg.queueSize(id), 1u);
}

TEST(GatewayRegistryTest, BroadcastStaysInGroup) {
    GatewayRegistry reg;
    reg.registerAgent("a1", "room1");
    reg.registerAgent("a2", "room1");
    reg.registerAgent("b1", "room2");
    AclMessage m;
    m.sender = "a1";
    m.broadcast = true;
    EXPECT_EQ(reg.dispatch(m), std::vector<std::string>{"a2"});
}

TEST(GatewayRegistryTest, NamedAndUnknownReceivers) {
    GatewayRegistry reg;
    for (auto id : {"e1", "e4", "e5"}) reg.registerAgent(id);
    AclMessage m;
    m.sender = "e1";
    m.receivers = {"e4"};
    reg.dispatch(m);
    EXPECT_EQ(reg.queueSize("e4"), 1u);
    EXPECT_EQ(reg.queueSize("e5"), 0u);

    m.receivers = {"ghost", "e5"};
    reg.dispatch(m);
    EXPECT_EQ(reg.queueSize("e5"), 1u);
    auto notices = reg.drain("e1");
    ASSERT_EQ(notices.size(), 1u);
    EXPECT_EQ(notices[0].sender, kAmsAgent);
    EXPECT_EQ(notices[0].content["receiver"], "ghost");

    m.sender = "stranger";
    EXPECT_THROW(reg.dispatch(m), UnregisteredSenderError);
}

TEST(GatewayRegistryTest, FifoPerPair) {
    GatewayRegistry reg;
    reg.registerAgent("s");
    reg.registerAgent("r");
    for (int i = 0; i < 50; ++i) {
        AclMessage m;
        m.sender = "s";
        m.receivers = {"r"};
        m.sentAt = i;
        reg.dispatch(m);
    }
    auto got = reg.drain("r");
    ASSERT_EQ(got.size(), 50u);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(got[i].sentAt, i);
    EXPECT_EQ(reg.queueSize("r"), 0u);
}

TEST(AclTest, FramingRoundTrip) {
    AclFramer framer;
    std::string wire;
    std::vector<AclMessage> sent;
    for (int i = 0; i < 20; ++i) {
        AclMessage m;
        m.performative = i % 2 ? Performative::Request : Performative::Inform;
        m.sender = "e" + std::to_string(i);
        m.broadcast = i % 3 == 0;
        if (!m.broadcast) m.receivers = {"x", "y"};
        m.content = Json::object();
        m.content["_stream"] = "S";
        m.content["n"] = i;
        m.sentAt = 1000 + i;
        sent.push_back(m);
        wire += frameAcl(m);
    }
    std::vector<AclMessage> got;
    for (size_t i = 0; i < wire.size(); i += 7) {
        framer.append(std::string_view(wire).substr(i, 7));
        while (auto m = framer.next()) got.push_back(*m);
    }
    EXPECT_EQ(got, sent);
}

TEST(AclTest, RejectsMalformed) {
    EXPECT_THROW(decodeAcl("{}"), DecodeError);
    EXPECT_THROW(decodeAcl(R"({"performative":"CFP","sender":"a","receivers":"BROADCAST","content":{},"sent_at":0})"),
                 DecodeError);
    EXPECT_THROW(decodeAcl(R"({"performative":"INFORM","sender":"a","receivers":[],"content":{},"sent_at":0})"),
                 DecodeError);
    AclFramer framer;
    framer.append(std::string("\xff\xff\xff\xff", 4));
    EXPECT_THROW(framer.next(), DecodeError);
}

}// namespace
}// namespace atmosphere::agent
