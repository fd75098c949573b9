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

#include <gtest/gtest.h>

#include <atmosphere/cep/Engine.hpp>
#include <atmosphere/cep/SchemaInference.hpp>
#include <atmosphere/oracle/OracleReplay.hpp>
#include <atmosphere/pattern/Parser.hpp>

#include "../support/Fixtures.hpp"

#include <map>

namespace atmosphere::cep {

using event::Event;
using event::FieldValue;
using testing::makeEvent;

class EngineTest : public ::testing::Test {
  protected:
    void SetUp() override {
        patterns = pattern::parsePatternFile(testing::readFile("scenarios/patterns/paper_listings.epl"));
        registry = testing::caseStudySchemas();
    }

    std::unique_ptr<Engine> engineWith(std::vector<size_t> which, bool withDerived = false) {
        auto schemas = registry;
        if (withDerived) registerDerivedSchemas(patterns, schemas);
        auto engine = std::make_unique<Engine>(schemas);
        for (size_t i : which) engine->deploy(patterns[i]);
        return engine;
    }

    std::vector<pattern::PatternDef> patterns;
    event::SchemaRegistry registry;
};

TEST_F(EngineTest, listingFourFiltersOnThreshold) {
    auto engine = engineWith({1}, true);
    auto out = engine->ingest(makeEvent("ExternalLightByFloor", 5000, {{"timestamp", 5000}, {"floor", 3}, {"count", 4}}));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].event.stream, "SurveillanceUnit");
    EXPECT_EQ(out[0].event.fields, (std::vector<event::Field>{{"timestamp", 5000}, {"floor", 3}}));
    EXPECT_EQ(out[0].producedBy, "SurveillanceUnit");
    EXPECT_TRUE(engine->ingest(makeEvent("ExternalLightByFloor", 6000, {{"timestamp", 6000}, {"floor", 3}, {"count", 3}}))
                    .empty());
}

TEST_F(EngineTest, listingThreeCountsPerFloorAtBoundary) {
    auto engine = engineWith({0});
    for (int64_t t : {1000, 5000, 8000}) {
        EXPECT_TRUE(engine->ingest(makeEvent("ExternalLight", t, {{"isOn", true}, {"floor", 2}})).empty());
    }
    EXPECT_TRUE(engine->ingest(makeEvent("ExternalLight", 9000, {{"isOn", false}, {"floor", 2}})).empty());
    EXPECT_EQ(engine->nextBoundary(), 600'000);
    auto out = engine->advanceClock(600'000);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].event.fields,
              (std::vector<event::Field>{{"timestamp", int64_t{600'000}}, {"floor", 2}, {"count", 3}}));
    EXPECT_EQ(out[0].event.timestamp, 600'000);
    EXPECT_FALSE(engine->nextBoundary().has_value());
}

TEST_F(EngineTest, eventOnBoundaryStartsNewBatch) {
    auto engine = engineWith({0});
    engine->ingest(makeEvent("ExternalLight", 599'999, {{"isOn", true}, {"floor", 1}}));
    auto out = engine->ingest(makeEvent("ExternalLight", 600'000, {{"isOn", true}, {"floor", 1}}));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(*out[0].event.find("count"), FieldValue(1));
    out = engine->advanceClock(1'200'000);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(*out[0].event.find("count"), FieldValue(1));
}

TEST_F(EngineTest, advanceAcrossEmptyBatchesEmitsNothing) {
    auto engine = engineWith({0});
    EXPECT_TRUE(engine->advanceClock(3'600'000).empty());
    engine->ingest(makeEvent("ExternalLight", 3'600'001, {{"isOn", true}, {"floor", 4}}));
    auto out = engine->advanceClock(3'600'000 + 3 * 600'000);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].event.timestamp, 4'200'000);
}

TEST_F(EngineTest, deployErrors) {
    auto engine = engineWith({2, 3}, false);
    EXPECT_EQ(engine->consumersOf("Medicine"), (std::vector<std::string>{"DemandByLaboratory"}));
    EXPECT_EQ(engine->consumersOf("DemandByLaboratory"), (std::vector<std::string>{"VeryHighDemandByLaboratory"}));

    try {
        engine->deploy(patterns[2]);
        FAIL();
    } catch (const DeployError& e) {
        EXPECT_EQ(e.kind(), DeployError::Kind::DuplicateName);
    }

    auto loop = pattern::parsePattern(R"(@Name("Loop") @Tag(name="domainName", value="Fog")
        insert into Medicine select a1.* from pattern [every a1 = Medicine(a1.place = 'x')])");
    try {
        engine->deploy(loop);
        FAIL();
    } catch (const DeployError& e) {
        EXPECT_EQ(e.kind(), DeployError::Kind::Cycle);
    }

    try {
        engineWith({1});
        FAIL();
    } catch (const DeployError& e) {
        EXPECT_EQ(e.kind(), DeployError::Kind::UnknownStream);
    }
}

TEST_F(EngineTest, mutualCycleIsRejected) {
    auto a = pattern::parsePattern(R"(@Name("A") @Tag(name="domainName", value="Fog")
        insert into Y select a1.* from pattern [every a1 = X])");
    auto b = pattern::parsePattern(R"(@Name("B") @Tag(name="domainName", value="Fog")
        insert into X select a1.* from pattern [every a1 = Y])");
    EXPECT_EQ(findCycle({a, b}).size(), 2u);
    Engine engine(registry);
    try {
        engine.deployAll({a, b});
        FAIL();
    } catch (const DeployError& e) {
        EXPECT_EQ(e.kind(), DeployError::Kind::Cycle);
    }
}

TEST_F(EngineTest, deployAllAcceptsAnyOrder) {
    std::vector<pattern::PatternDef> reversed(patterns.rbegin(), patterns.rend());
    Engine engine(registry);
    engine.deployAll(reversed);
    const auto order = engine.topologicalOrder();
    auto pos = [&](const std::string& n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
    EXPECT_LT(pos("DemandByLaboratory"), pos("VeryHighDemandByLaboratory"));
    EXPECT_LT(pos("VeryHighDemandByLaboratory"), pos("MedicineStockBreak"));
    EXPECT_LT(pos("ExternalLightByFloor"), pos("SurveillanceUnit"));
}

TEST_F(EngineTest, ingestErrors) {
    auto engine = engineWith({0});
    EXPECT_THROW(engine->ingest(makeEvent("Nope", 1, {})), UnknownStreamError);
    engine->ingest(makeEvent("ExternalLight", 100, {{"isOn", true}, {"floor", 1}}));
    EXPECT_THROW(engine->ingest(makeEvent("ExternalLight", 99, {{"isOn", true}, {"floor", 1}})), TimeRegressionError);
    EXPECT_THROW(engine->advanceClock(50), TimeRegressionError);
    EXPECT_EQ(engine->now(), 100);
}

namespace {

std::vector<Event> medicineLog() {
    std::vector<Event> log;
    int64_t t = 1000;
    auto add = [&](const char* id, const char* place, const char* type) {
        log.push_back(makeEvent("Medicine", t, {{"id", id}, {"type", type}, {"place", place}}));
        t += 1000;
    };
    for (int i = 0; i < 1001; ++i) add("m1", "laboratory", "respiratory");
    for (int i = 0; i < 5; ++i) add("m1", "pharmacy", "respiratory");
    add("m1", "hospital", "respiratory");
    for (int i = 0; i < 3; ++i) add("m2", "pharmacy", "respiratory");
    return log;
}

}// namespace

TEST_F(EngineTest, medicineStockBreakForCorrelatedIdOnly) {
    const auto log = medicineLog();
    ASSERT_LT(log.back().timestamp, testing::kHourMs);
    Engine engine(registry);
    engine.deployAll(patterns);
    std::vector<Emission> out;
    for (const auto& e : log) {
        auto step = engine.ingest(e);
        out.insert(out.end(), step.begin(), step.end());
    }
    auto tail = engine.advanceClock(48 * testing::kHourMs);
    out.insert(out.end(), tail.begin(), tail.end());

    std::map<std::string, std::vector<std::string>> byStream;
    for (const auto& em : out) byStream[em.event.stream].push_back(em.event.find("id") ? em.event.find("id")->asString() : "");
    EXPECT_EQ(byStream["VeryHighDemandByLaboratory"], (std::vector<std::string>{"m1"}));
    EXPECT_EQ(byStream["StockShortageByPharmacy"], (std::vector<std::string>{"m1", "m2"}));
    EXPECT_EQ(byStream["RespiratoryUseByHospital"], (std::vector<std::string>{"m1"}));
    EXPECT_EQ(byStream["MedicineStockBreak"], (std::vector<std::string>{"m1"}));

    for (const auto& em : out) {
        if (em.event.stream == "VeryHighDemandByLaboratory") {
            EXPECT_GT(em.event.find("count")->asInteger(), 1000);
        }
        if (em.event.stream == "MedicineStockBreak") {
            EXPECT_EQ(em.event.timestamp, testing::kHourMs);
        }
    }

    const auto reference = oracle::oracleReplay(patterns, registry, log, 48 * testing::kHourMs);
    ASSERT_EQ(reference.size(), out.size());
    for (size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(reference[i].event, out[i].event);
        EXPECT_EQ(reference[i].producedBy, out[i].producedBy);
    }
}

TEST_F(EngineTest, listingThreeMatchesDirectTally) {
    auto log = testing::randomLog(99, 3000);
    std::vector<Event> lights;
    for (const auto& e : log) {
        if (e.stream == "ExternalLight") lights.push_back(e);
    }
    const int64_t horizon = 49 * testing::kHourMs;
    auto engine = engineWith({0});
    std::map<std::pair<int64_t, int64_t>, int64_t> emitted;
    auto collect = [&](const std::vector<Emission>& out) {
        for (const auto& em : out) {
            emitted[{em.event.timestamp, em.event.find("floor")->asInteger()}] = em.event.find("count")->asInteger();
        }
    };
    for (const auto& e : lights) collect(engine->ingest(e));
    collect(engine->advanceClock(horizon));

    std::map<std::pair<int64_t, int64_t>, int64_t> tally;
    for (const auto& e : lights) {
        if (!e.find("isOn")->asBoolean()) continue;
        const int64_t end = (e.timestamp / 600'000 + 1) * 600'000;
        ++tally[{end, e.find("floor")->asInteger()}];
    }
    EXPECT_EQ(emitted, tally);
}

TEST_F(EngineTest, unwindowedEmissionsCopyOneInput) {
    auto extra = pattern::parsePatternFile(testing::readFile("tests/data/oracle_extra.epl"));
    Engine engine(registry);
    engine.deploy(extra[0]);
    const auto log = testing::randomLog(5, 2000);
    size_t inputs = 0;
    for (const auto& e : log) {
        if (e.stream != "Vital") continue;
        ++inputs;
        for (const auto& em : engine.ingest(e)) {
            EXPECT_EQ(*em.event.find("id"), *e.find("id"));
            EXPECT_EQ(*em.event.find("o2"), *e.find("o2"));
            EXPECT_EQ(*em.event.find("room"), *e.find("room"));
            EXPECT_EQ(em.event.timestamp, e.timestamp);
        }
    }
    EXPECT_LE(engine.emissionCount(), inputs);
    EXPECT_EQ(engine.ingestCount(), inputs);
}

TEST_F(EngineTest, processingTimeUsesInjectedClock) {
    int64_t wall = 1'000'000;
    EngineOptions options;
    options.mode = ClockMode::ProcessingTime;
    options.startMs = wall;
    options.now = [&] { return wall; };
    Engine engine(registry, options);
    engine.deploy(patterns[0]);
    engine.ingest(makeEvent("ExternalLight", 0, {{"isOn", true}, {"floor", 1}}));
    wall += 700'000;
    auto out = engine.advanceClock(wall);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].event.timestamp, 1'600'000);
}

}// namespace atmosphere::cep
