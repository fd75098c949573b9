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

#include <atmosphere/runtime/Mqtt.hpp>

#include <gtest/gtest.h>

#include <set>

namespace atmosphere::runtime {
namespace {

TEST(SimLoopTest, OrdersByTimeThenSubmission) {
    SimLoop loop(1000);
    std::vector<int> order;
    loop.schedule(20, [&] { order.push_back(3); });
    loop.schedule(10, [&] { order.push_back(1); });
    loop.schedule(10, [&] { order.push_back(2); });
    auto cancelled = loop.schedule(5, [&] { order.push_back(99); });
    loop.post([&] { order.push_back(0); });
    loop.cancel(cancelled);
    loop.runUntil(1015);
    EXPECT_EQ(order, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(loop.nowUs(), 1015);
    loop.runUntil(2000);
    EXPECT_EQ(order.back(), 3);
    EXPECT_TRUE(loop.idle());
}

TEST(SimNetworkTest, DeliversInOrderAfterLatency) {
    SimLoop loop;
    SimNetwork net(loop, 1, {250, 0.0});
    std::string received;
    std::int64_t firstAt = -1;
    net.listen("a:x", [&](ConnectionPtr c) {
        static ConnectionPtr keep;
        keep = c;
        c->onData([&](std::string_view b) {
            if (firstAt < 0) firstAt = loop.nowUs();
            received += b;
        });
    });
    ConnectionPtr client;
    net.connect("b", "a:x", [&](ConnectionPtr c, const std::string&) {
        client = c;
        for (int i = 0; i < 5; ++i) c->send(std::to_string(i));
    });
    loop.runUntil(10'000);
    EXPECT_EQ(received, "01234");
    EXPECT_EQ(firstAt, 250);
    ASSERT_EQ(net.connections().all().size(), 1u);
    EXPECT_EQ(net.connections().all()[0].toNode, "a");

    std::string error;
    net.connect("b", "nobody:x", [&](ConnectionPtr c, const std::string& e) { error = e; });
    loop.runUntil(20'000);
    EXPECT_NE(error.find("refused"), std::string::npos);
}

struct Harness {
    SimLoop loop;
    SimNetwork net;
    RunCounters counters;
    BrokerServer broker;
    Harness(mqtt::BrokerConfig config = {}, LinkProfile profile = {})
        : net(loop, 7, profile), broker(loop, net, "f:mqtt", counters, config) {
        broker.start();
    }
    std::unique_ptr<MqttClient> client(const std::string& id, mqtt::RetryPolicy retry = {}) {
        auto c = std::make_unique<MqttClient>(loop, net, counters, MqttClientOptions{id, "f:mqtt", id, retry});
        c->start();
        return c;
    }
};

TEST(BrokerServerTest, Qos0FanOutAndLocalDelivery) {
    Harness h;
    auto pub = h.client("p");
    auto s1 = h.client("s1");
    auto s2 = h.client("s2");
    std::vector<std::string> got1, got2, local;
    s1->onMessage([&](const std::string& t, const std::string& p) { got1.push_back(t + ":" + p); });
    s2->onMessage([&](const std::string& t, const std::string& p) { got2.push_back(t + ":" + p); });
    s1->subscribe("f/#", 0);
    s2->subscribe("f/out/edge", 0);
    h.broker.subscribeLocal("cep", "f/in", [&](const std::string&, const std::string& p) { local.push_back(p); });
    h.loop.runUntil(1'000'000);
    pub->publish("f/in", "a", 0);
    pub->publish("f/out/edge", "b", 0);
    h.loop.runUntil(1'500'000);
    h.broker.publishLocal("f/out/edge", "c", 0);
    h.loop.runUntil(2'000'000);
    EXPECT_EQ(got1, (std::vector<std::string>{"f/in:a", "f/out/edge:b", "f/out/edge:c"}));
    EXPECT_EQ(got2, (std::vector<std::string>{"f/out/edge:b", "f/out/edge:c"}));
    EXPECT_EQ(local, std::vector<std::string>{"a"});
    // 2 client publishes, 3 + 2 broker deliveries
    EXPECT_EQ(h.counters.publish, 7u);
    EXPECT_EQ(h.counters.puback, 0u);
}

TEST(BrokerServerTest, Qos1RoundTripCountsTwoPublishesTwoAcks) {
    Harness h;
    auto edge = h.client("e1");
    std::vector<std::string> got;
    edge->onMessage([&](const std::string&, const std::string& p) { got.push_back(p); });
    edge->subscribe("f/out/edge", 1);
    h.broker.subscribeLocal("cep", "f/in", [&](const std::string&, const std::string& p) {
        h.broker.publishLocal("f/out/edge", "echo-" + p, 1);
    });
    h.loop.runUntil(1'000'000);
    const auto before = h.counters.toJson();
    for (int i = 0; i < 10; ++i) edge->publish("f/in", std::to_string(i), 1);
    h.loop.runUntil(5'000'000);
    EXPECT_EQ(got.size(), 10u);
    EXPECT_EQ(h.counters.publish - before["publish"].get<std::uint64_t>(), 20u);
    EXPECT_EQ(h.counters.puback - before["puback"].get<std::uint64_t>(), 20u);
    EXPECT_EQ(edge->inflight(), 0u);
    EXPECT_EQ(h.broker.core().inflightCount(), 0u);
}

TEST(BrokerServerTest, AtLeastOnceUnderLoss) {
    const mqtt::RetryPolicy retry{200, 20};
    mqtt::BrokerConfig config;
    config.retry = retry;
    Harness h(config, {1000, 0.0});
    RunCounters publisherCounters;
    MqttClient pub(h.loop, h.net, publisherCounters, {"p", "f:mqtt", "p", retry});
    pub.start();
    auto sub = h.client("s", retry);
    std::multiset<std::string> got;
    sub->onMessage([&](const std::string&, const std::string& p) { got.insert(p); });
    sub->subscribe("t", 1);
    h.loop.runUntil(1'000'000);
    ASSERT_TRUE(pub.connected() && sub->connected());

    h.net.setProfile("f:mqtt", {1000, 0.30});
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        h.loop.schedule(i * 1000, [&pub, i] { pub.publish("t", std::to_string(i), 1); });
    }
    const std::int64_t lastSend = h.loop.nowUs() + (n - 1) * 1000;
    h.loop.runUntil(lastSend + retry.maxRetries * retry.retryTimeoutMs * 1000);
    std::set<std::string> distinct(got.begin(), got.end());
    EXPECT_EQ(distinct.size(), static_cast<std::size_t>(n));
    EXPECT_GT(h.net.dropped(), 0u);
    EXPECT_GT(publisherCounters.publish.load(), static_cast<std::uint64_t>(n));
    EXPECT_EQ(pub.abandoned(), 0u);
    EXPECT_EQ(h.broker.droppedClients(), 0u);
}

TEST(BrokerServerTest, Qos0NeverRetransmitted) {
    Harness h({}, {1000, 0.0});
    RunCounters publisherCounters;
    MqttClient pub(h.loop, h.net, publisherCounters, {"p", "f:mqtt", "p", {200, 20}});
    pub.start();
    auto sub = h.client("s");
    int got = 0;
    sub->onMessage([&](const std::string&, const std::string&) { ++got; });
    sub->subscribe("t", 1);
    h.loop.runUntil(1'000'000);
    h.net.setProfile("f:mqtt", {1000, 0.30});
    for (int i = 0; i < 1000; ++i) pub.publish("t", std::to_string(i), 0);
    h.loop.runUntil(60'000'000);
    EXPECT_EQ(publisherCounters.publish.load(), 1000u);
    EXPECT_EQ(publisherCounters.puback.load(), 0u);
    EXPECT_EQ(pub.inflight(), 0u);
    EXPECT_LT(got, 1000);
    EXPECT_GT(got, 300);
}

TEST(BrokerServerTest, DuplicateDeliverySuppressedAtSubscriber) {
    // Lost PUBACKs cause redeliveries with DUP set.
    const mqtt::RetryPolicy retry{200, 20};
    mqtt::BrokerConfig config;
    config.retry = retry;
    Harness h(config, {1000, 0.0});
    auto pub = h.client("p", retry);
    auto sub = h.client("s", retry);
    std::vector<std::string> got;
    sub->onMessage([&](const std::string&, const std::string& p) { got.push_back(p); });
    sub->subscribe("t", 1);
    h.loop.runUntil(1'000'000);
    h.net.setProfile("f:mqtt", {1000, 0.30});
    for (int i = 0; i < 200; ++i) pub->publish("t", std::to_string(i), 1);
    h.loop.runUntil(10'000'000);
    std::set<std::string> distinct(got.begin(), got.end());
    EXPECT_EQ(distinct.size(), 200u);
    EXPECT_EQ(got.size(), distinct.size());
}

TEST(TcpNetworkTest, BrokerOverLoopback) {
    AsioLoop loop;
    TcpNetwork net(loop);
    RunCounters counters;
    BrokerServer broker(loop, net, "f:mqtt", counters);
    broker.start();
    ASSERT_NE(net.portOf("f:mqtt"), 0);
    MqttClient edge(loop, net, counters, {"e1", "f:mqtt", "e1", {}});
    std::vector<std::string> got;
    edge.onMessage([&](const std::string&, const std::string& p) { got.push_back(p); });
    edge.subscribe("f/out/edge", 1);
    broker.subscribeLocal("cep", "f/in", [&](const std::string&, const std::string& p) {
        broker.publishLocal("f/out/edge", p, 1);
    });
    edge.start();
    ASSERT_TRUE(loop.runWhile([&] { return !edge.connected(); }, std::chrono::seconds(5)));
    loop.runFor(std::chrono::milliseconds(50));
    for (int i = 0; i < 100; ++i) edge.publish("f/in", std::to_string(i), 1);
    ASSERT_TRUE(loop.runWhile([&] { return got.size() < 100 || edge.inflight() > 0; }, std::chrono::seconds(5)));
    EXPECT_EQ(got.front(), "0");
    EXPECT_EQ(got.back(), "99");
    ASSERT_EQ(net.connections().all().size(), 1u);
    EXPECT_EQ(net.connections().all()[0].fromNode, "e1");
}

TEST(TcpNetworkTest, RefusedConnectionRetriesThenFails) {
    AsioLoop loop;
    TcpNetwork net(loop, {{"f:mqtt", 1}});
    RunCounters counters;
    MqttClientOptions options{"e1", "f:mqtt", "e1", {}};
    options.connectAttempts = 3;
    options.connectRetryUs = 10'000;
    MqttClient edge(loop, net, counters, options);
    std::string error;
    bool done = false;
    edge.start([&](const std::string& e) {
        error = e;
        done = true;
    });
    ASSERT_TRUE(loop.runWhile([&] { return !done; }, std::chrono::seconds(5)));
    EXPECT_FALSE(error.empty());
}

}// namespace
}// namespace atmosphere::runtime
