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


#include <atmosphere/harness/Buckets.hpp>
#include <atmosphere/harness/Runner.hpp>

#include "../support/Fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

namespace atmosphere::harness {
namespace {

Json benchDocument() {
    return Json::parse(R"({
        "name": "mini-bench",
        "schemas": {"ExternalLight": {"seq": "string", "isOn": "boolean", "floor": "integer"}},
        "nodes": [{"id": "f1", "tier": "fog", "patterns": ["patterns/bench.epl"]},
                  {"id": "e1", "tier": "edge", "fog": "f1", "humidity": true}],
        "simulators": [{"target": "e1", "stream": "ExternalLight", "rate": 50,
                        "fields": {"seq": {"sequence": true}, "isOn": {"bernoulli": 0.5}, "floor": {"uniform": [1, 4]}}}],
        "run": {"duration": 2, "qos": 1, "clock": "processing_time", "warmup": 0, "linkLatencyUs": 200}
    })");
}

std::string scenarioDir() { return testing::sourcePath("scenarios"); }

std::string errorOf(const Json& doc) {
    try {
        parseScenario(doc, scenarioDir());
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}// namespace

TEST(BucketsTest, OnePerBucket) {
    const auto b = bucketize({3, 7, 20, 60, 200});
    for (double p : b) EXPECT_DOUBLE_EQ(p, 20.0);
}

TEST(BucketsTest, AllZero) {
    const auto b = bucketize({0, 0, 0});
    EXPECT_DOUBLE_EQ(b[0], 100.0);
    for (std::size_t i = 1; i < b.size(); ++i) EXPECT_DOUBLE_EQ(b[i], 0.0);
}

TEST(BucketsTest, EmptyInputRejected) { EXPECT_THROW(bucketize({}), std::invalid_argument); }

TEST(BucketsTest, RoundsBeforeBucketing) {
    EXPECT_EQ(bucketOf(5.49), 0u);
    EXPECT_EQ(bucketOf(5.5), 1u);
    EXPECT_EQ(bucketOf(10.4), 1u);
    EXPECT_EQ(bucketOf(50.5), 3u);
    EXPECT_EQ(bucketOf(100.49), 3u);
    EXPECT_EQ(bucketOf(100.5), 4u);
}

TEST(BucketsTest, MatchesNaiveRecount) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> latency(0.0, 150.0);
    std::vector<double> values(10'000);
    for (auto& v : values) v = latency(rng);
    const auto b = bucketize(values);

    const int bounds[5][2] = {{0, 5}, {6, 10}, {11, 50}, {51, 100}, {101, 1 << 30}};
    double sum = 0;
    for (int k = 0; k < 5; ++k) {
        int hits = 0;
        for (double v : values) {
            const int ms = static_cast<int>(std::floor(v + 0.5));
            if (ms >= bounds[k][0] && ms <= bounds[k][1]) ++hits;
        }
        EXPECT_DOUBLE_EQ(b[k], 100.0 * hits / 10'000.0) << kBucketLabels[k];
        sum += b[k];
    }
    EXPECT_NEAR(sum, 100.0, 1e-9);
}

TEST(ScenarioConfigTest, HospitalTopology) {
    const auto config = loadScenario(testing::sourcePath("scenarios/hospital.json"));
    EXPECT_EQ(config.idsOf(Tier::Fog), (std::vector<std::string>{"f1", "f2"}));
    EXPECT_EQ(config.idsOf(Tier::Cloud), (std::vector<std::string>{"c1"}));
    EXPECT_EQ(config.idsOf(Tier::User), (std::vector<std::string>{"u"}));
    std::set<std::string> kinds;
    for (const auto& id : config.idsOf(Tier::Edge)) {
        for (const auto& a : std::get<runtime::EdgeNodeConfig>(config.node(id)->config).agents) {
            kinds.insert(a.id.substr(a.id.find('.') + 1));
        }
    }
    EXPECT_EQ(kinds, (std::set<std::string>{"access", "ventilator", "window", "external_light", "interior_light", "control_panel"}));
    EXPECT_TRUE(config.schemas.contains("MedicineStockBreak"));
    EXPECT_TRUE(config.schemas.contains("SurveillanceUnit"));
}

TEST(ScenarioConfigTest, ShippedScenariosLoad) {
    for (const char* name : {"bench", "hospital", "hospital_load"}) {
        EXPECT_NO_THROW(loadScenario(testing::sourcePath(std::string("scenarios/") + name + ".json"))) << name;
    }
}

TEST(ScenarioConfigTest, MissingPatternFileNamed) {
    auto doc = benchDocument();
    doc["nodes"][0]["patterns"] = {"patterns/nope.epl"};
    const auto message = errorOf(doc);
    EXPECT_NE(message.find("/nodes/0/patterns/0"), std::string::npos) << message;
    EXPECT_NE(message.find("nope.epl"), std::string::npos) << message;
}

TEST(ScenarioConfigTest, DuplicateNodeId) {
    auto doc = benchDocument();
    doc["nodes"].push_back({{"id", "f1"}, {"tier", "user"}, {"fog", "f1"}});
    const auto message = errorOf(doc);
    EXPECT_EQ(message.rfind("/nodes/2/id", 0), 0u) << message;
}

TEST(ScenarioConfigTest, ErrorsCarryPointers) {
    auto doc = benchDocument();
    doc["nodes"][1]["fog"] = "f9";
    EXPECT_EQ(errorOf(doc).rfind("/nodes/1/fog", 0), 0u);

    doc = benchDocument();
    doc["simulators"][0]["fields"].erase("floor");
    EXPECT_EQ(errorOf(doc).rfind("/simulators/0/fields", 0), 0u);

    doc = benchDocument();
    doc["simulators"][0]["rate"] = 0;
    EXPECT_EQ(errorOf(doc).rfind("/simulators/0/rate", 0), 0u);

    doc = benchDocument();
    doc["run"]["qos"] = 2;
    EXPECT_EQ(errorOf(doc).rfind("/run/qos", 0), 0u);

    doc = benchDocument();
    doc["nodes"][1]["agents"] = Json::parse(R"([{"name": "a", "rules": [{"id": "r", "trigger": {"sensor": "ghost"},
        "actions": [{"type": "log", "text": "x"}]}]}])");
    EXPECT_EQ(errorOf(doc).rfind("/nodes/1/agents/0", 0), 0u) << errorOf(doc);
}

TEST(ScenarioConfigTest, TargetsNeedARoute) {
    auto doc = benchDocument();
    doc["nodes"][0]["patterns"] = {"patterns/hospital_f1.epl"};
    doc["schemas"]["MedicineAdministered"] = {{"id", "string"}, {"type", "string"}};
    doc["schemas"]["MedicineStockBreak"] = {{"timestamp", "integer"}, {"id", "string"}};
    // hospital_f1 routes to a peer fog and a cloud that this topology lacks
    EXPECT_NE(errorOf(doc).find("targets"), std::string::npos);
}

TEST(SimulatorTest, SeededAndInRange) {
    const auto config = parseScenario(benchDocument(), scenarioDir());
    FieldSampler a(config.simulators[0], 9);
    FieldSampler b(config.simulators[0], 9);
    for (int i = 0; i < 200; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_EQ(x["seq"], "e1-" + std::to_string(i));
        EXPECT_GE(x["floor"].get<int>(), 1);
        EXPECT_LE(x["floor"].get<int>(), 4);
        EXPECT_TRUE(x["isOn"].is_boolean());
    }
}

TEST(RunnerTest, HospitalEventTimeIsDeterministic) {
    const auto config = loadScenario(testing::sourcePath("scenarios/hospital.json"));
    const auto first = runScenario(config);
    const auto second = runScenario(config);
    EXPECT_EQ(toJsonLines(first.alerts), toJsonLines(second.alerts));
    EXPECT_EQ(toJsonLines(first.emissions), toJsonLines(second.emissions));
    EXPECT_EQ(toJsonLines(first.effects), toJsonLines(second.effects));
    EXPECT_FALSE(first.alerts.empty());
}

TEST(RunnerTest, BenchConservationAndAccounting) {
    auto config = parseScenario(benchDocument(), scenarioDir());
    const auto report = runScenario(config);
    const auto& rt = report.roundTrips;
    EXPECT_EQ(rt.initiated, 100u);
    EXPECT_EQ(rt.completed + rt.inflight + rt.deadLettered, rt.initiated);
    EXPECT_EQ(report.counters["publish"], 2 * rt.completed);
    EXPECT_EQ(report.counters["puback"], 2 * rt.completed);
    const auto s = summarize(report.latenciesMs(false));
    EXPECT_EQ(s.count, rt.completed);
    EXPECT_GE(s.mean, s.min);
    EXPECT_LE(s.mean, s.max);
    EXPECT_NEAR(std::accumulate(s.buckets.begin(), s.buckets.end(), 0.0), 100.0, 1e-9);
    for (const auto& r : report.records) EXPECT_GE(r.latencyMs(), 0.0);
}

TEST(RunnerTest, WarmupExcludedFromSummary) {
    auto config = parseScenario(benchDocument(), scenarioDir());
    config.run.warmupS = 1;
    config.run.qos = 0;
    const auto report = runScenario(config);
    const auto after = report.latenciesMs(true).size();
    EXPECT_GT(after, 0u);
    EXPECT_LT(after, report.records.size());
}

TEST(RunnerTest, RateOverrideOnlyTouchesLoadSimulators) {
    auto config = parseScenario(benchDocument(), scenarioDir());
    config.simulators.push_back(config.simulators[0]);
    config.simulators[1].load = false;
    RunOptions options;
    options.rate = 7;
    applyOverrides(config, options);
    EXPECT_EQ(config.simulators[0].rate, 7);
    EXPECT_EQ(config.simulators[1].rate, 50);
}

}// namespace atmosphere::harness
