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

#include <atmosphere/pattern/Parser.hpp>

#include "../support/Fixtures.hpp"

#include <random>

namespace atmosphere::pattern {

namespace {

std::vector<PatternDef> listings() { return parsePatternFile(testing::readFile("scenarios/patterns/paper_listings.epl")); }

const Predicate& onlyPredicate(const PatternDef& p) {
    EXPECT_EQ(p.bindings.size(), 1u);
    EXPECT_EQ(p.bindings[0].predicates.size(), 1u);
    return p.bindings[0].predicates[0];
}

}// namespace

TEST(PatternParserTest, parsesAllNineListings) {
    const auto all = listings();
    ASSERT_EQ(all.size(), 9u);
    const std::vector<std::string> names{"ExternalLightByFloor", "SurveillanceUnit",   "DemandByLaboratory",
                                         "VeryHighDemandByLaboratory", "StockByPharmacy", "StockShortageByPharmacy",
                                         "UseByHospital", "RespiratoryUseByHospital", "MedicineStockBreak"};
    for (size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].name, names[i]);
        EXPECT_EQ(all[i].insertInto, names[i]);
        EXPECT_EQ(all[i].tag("domainName"), "Fog");
    }
}

TEST(PatternParserTest, listingFourStructure) {
    const auto p = listings()[1];
    EXPECT_EQ(p.name, "SurveillanceUnit");
    ASSERT_EQ(p.bindings.size(), 1u);
    EXPECT_EQ(p.bindings[0].alias, "a1");
    EXPECT_EQ(p.bindings[0].stream, "ExternalLightByFloor");
    const auto& pred = onlyPredicate(p);
    EXPECT_EQ(pred.lhs, (FieldPath{"a1", "count"}));
    EXPECT_EQ(pred.op, CompareOp::Ge);
    EXPECT_EQ(std::get<event::FieldValue>(pred.rhs), event::FieldValue(4));
    EXPECT_FALSE(p.window.has_value());
    ASSERT_EQ(p.select.size(), 2u);
    EXPECT_EQ(std::get<select::FieldRef>(p.select[0]), (select::FieldRef{{"a1", "timestamp"}, "timestamp"}));
    EXPECT_EQ(std::get<select::FieldRef>(p.select[1]), (select::FieldRef{{"a1", "floor"}, "floor"}));
}

TEST(PatternParserTest, thresholdsAndWindowsMatchListings) {
    const auto all = listings();
    EXPECT_EQ(onlyPredicate(all[3]).op, CompareOp::Gt);
    EXPECT_EQ(std::get<event::FieldValue>(onlyPredicate(all[3]).rhs), event::FieldValue(1000));
    EXPECT_EQ(onlyPredicate(all[5]).op, CompareOp::Le);
    EXPECT_EQ(std::get<event::FieldValue>(onlyPredicate(all[5]).rhs), event::FieldValue(5));
    EXPECT_EQ(onlyPredicate(all[7]).op, CompareOp::Ge);
    EXPECT_EQ(std::get<event::FieldValue>(onlyPredicate(all[7]).rhs), event::FieldValue(1));

    EXPECT_EQ(all[0].window->toMillis(), 10 * 60'000);
    EXPECT_EQ(all[2].window->toMillis(), 3'600'000);
    EXPECT_EQ(all[4].window->toMillis(), 3'600'000);
    EXPECT_EQ(all[6].window->toMillis(), 3'600'000);
    EXPECT_EQ(all[8].window->toMillis(), 24 * 3'600'000);
    EXPECT_EQ(all[0].groupBy, (std::vector<FieldPath>{{"a1", "floor"}}));
    EXPECT_EQ(all[2].groupBy.size(), 3u);
}

TEST(PatternParserTest, listingElevenCorrelations) {
    const auto p = listings()[8];
    ASSERT_EQ(p.bindings.size(), 3u);
    EXPECT_TRUE(p.bindings[0].predicates.empty());
    ASSERT_EQ(p.bindings[1].predicates.size(), 1u);
    EXPECT_EQ(p.bindings[1].predicates[0].lhs, (FieldPath{"a2", "id"}));
    EXPECT_EQ(std::get<FieldPath>(p.bindings[1].predicates[0].rhs), (FieldPath{"a1", "id"}));
    EXPECT_EQ(p.bindings[2].predicates[0].lhs, (FieldPath{"a3", "id"}));
    EXPECT_EQ(std::get<FieldPath>(p.bindings[2].predicates[0].rhs), (FieldPath{"a2", "id"}));
    EXPECT_EQ(p.window, (Duration{24, TimeUnit::Hours}));
}

TEST(PatternParserTest, printParseFixpointOnListings) {
    for (const auto& p : listings()) {
        const std::string text = printPattern(p);
        const PatternDef again = parsePattern(text);
        EXPECT_EQ(again, p) << text;
        EXPECT_EQ(printPattern(again), text);
    }
}

TEST(PatternParserTest, minimalPatternRoundTrips) {
    const auto p = parsePattern(R"(@Name("M") @Tag(name="domainName", value="Fog") insert into Out select a1.* from pattern [every a1 = In])");
    EXPECT_TRUE(p.bindings[0].selectAll);
    EXPECT_EQ(parsePattern(printPattern(p)), p);
}

TEST(PatternParserTest, undeclaredCorrelationAliasIsSemanticError) {
    try {
        parsePattern(R"(@Name("X") @Tag(name="domainName", value="Fog") insert into X select a1.* from pattern [(every a1 = Y(a1.id = a2.id))])");
        FAIL();
    } catch (const PatternError& e) {
        EXPECT_EQ(e.kind(), PatternError::Kind::Semantic);
    }
}

TEST(PatternParserTest, unsupportedConstructs) {
    const std::string head = R"(@Name("X") @Tag(name="domainName", value="Fog") insert into X select a1.* from pattern )";
    for (const std::string tail : {"[every a1 = Y(a1.v > 1 or a1.v < 0)]", "[every a1 = Y].win:length(10)",
                                   "[a1 = Y]", "[every a1 = Y].win:time_batch(5 days)", "[every a1 = Y(a1.v = null)]"}) {
        try {
            parsePattern(head + tail);
            FAIL() << tail;
        } catch (const PatternError& e) {
            EXPECT_EQ(e.kind(), PatternError::Kind::Unsupported) << tail << ": " << e.what();
        }
    }
}

TEST(PatternParserTest, syntaxErrorsCarryPosition) {
    try {
        parsePattern("@Name(\"X\")\ninsert into X\nselect a1.* from pattern [every a1 = Y(a1.v >)]");
        FAIL();
    } catch (const PatternError& e) {
        EXPECT_EQ(e.kind(), PatternError::Kind::Syntax);
        EXPECT_EQ(e.line(), 3);
        EXPECT_GT(e.column(), 1);
    }
}

TEST(PatternParserTest, missingDomainNameIsRejected) {
    EXPECT_THROW(parsePattern(R"(@Name("X") insert into X select a1.* from pattern [every a1 = Y])"), PatternError);
}

namespace {

PatternDef randomPattern(std::mt19937& rng) {
    auto ident = [&](const char* prefix) { return std::string(prefix) + std::to_string(rng() % 50); };
    PatternDef p;
    p.name = ident("P");
    p.tags["domainName"] = rng() % 2 ? "Fog" : "Cloud \"east\"";
    if (rng() % 2) p.tags["target"] = kTargetAudiences[rng() % 4];
    p.insertInto = ident("Out");
    const size_t n = rng() % 3 == 0 ? 2 + rng() % 2 : 1;
    for (size_t i = 0; i < n; ++i) {
        Binding b{"a" + std::to_string(i + 1), ident("S"), {}, false};
        for (size_t k = 0, m = rng() % 3; k < m; ++k) {
            Predicate pred;
            pred.lhs = {b.alias, ident("f")};
            pred.op = static_cast<CompareOp>(rng() % 6);
            if (i > 0 && rng() % 2) {
                pred.rhs = FieldPath{"a" + std::to_string(1 + rng() % i), ident("g")};
            } else {
                switch (rng() % 4) {
                    case 0: pred.rhs = event::FieldValue(static_cast<int64_t>(rng() % 2000) - 1000); break;
                    case 1: pred.rhs = event::FieldValue(static_cast<double>(rng() % 100000) / 8.0 - 50.0); break;
                    case 2: pred.rhs = event::FieldValue(std::string("it's ") + ident("v")); break;
                    default: pred.rhs = event::FieldValue(rng() % 2 == 0);
                }
            }
            b.predicates.push_back(pred);
        }
        p.bindings.push_back(b);
    }
    const bool windowed = rng() % 2;
    if (windowed) p.window = Duration{static_cast<int64_t>(1 + rng() % 90), static_cast<TimeUnit>(rng() % 3)};
    int outputs = 0;
    auto out = [&] { return "o" + std::to_string(outputs++); };
    if (rng() % 3 == 0) p.select.push_back(select::CurrentTimestamp{out()});
    for (const auto& b : p.bindings) p.select.push_back(select::FieldRef{{b.alias, ident("f")}, out()});
    if (windowed && n == 1) {
        if (rng() % 2) p.select.push_back(select::Count{{"a1", ident("f")}, out()});
        if (rng() % 2) p.groupBy.push_back({"a1", ident("f")});
    }
    if (rng() % 4 == 0) {
        p.select.push_back(select::StarOf{"a1"});
        p.bindings[0].selectAll = true;
    }
    return p;
}

}// namespace

TEST(PatternParserTest, randomPatternsRoundTrip) {
    std::mt19937 rng(3);
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
        const PatternDef p = randomPattern(rng);
        try {
            validatePattern(p);
        } catch (const PatternError&) {
            continue;
        }
        ++checked;
        const std::string text = printPattern(p);
        ASSERT_EQ(parsePattern(text), p) << text;
    }
    EXPECT_GT(checked, 500);
}

}// namespace atmosphere::pattern
