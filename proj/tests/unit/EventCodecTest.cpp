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

#include <atmosphere/common/Errors.hpp>
#include <atmosphere/event/EventCodec.hpp>

#include "../support/Fixtures.hpp"

#include <random>

namespace atmosphere::event {

class EventCodecTest : public ::testing::Test {
  protected:
    SchemaRegistry registry = testing::caseStudySchemas();
};

TEST_F(EventCodecTest, encodesReservedKeysFirst) {
    Event e = testing::makeEvent("ExternalLight", 1000, {{"isOn", true}, {"floor", 3}});
    e.source = "e4";
    EXPECT_EQ(encodeEvent(e, registry), R"({"_stream":"ExternalLight","_ts":1000,"_src":"e4","isOn":true,"floor":3})");
}

TEST_F(EventCodecTest, emptyFieldsGiveOnlyReservedKeys) {
    registry.add({"Tick", {}});
    Event e = testing::makeEvent("Tick", 5, {});
    e.source = "x";
    EXPECT_EQ(encodeEvent(e, registry), R"({"_stream":"Tick","_ts":5,"_src":"x"})");
}

TEST_F(EventCodecTest, decodeIsInverseOfEncode) {
    const std::string payload = R"({"_stream":"ExternalLight","_ts":1000,"_src":"e4","isOn":true,"floor":3})";
    Event e = decodeEvent(payload, registry);
    EXPECT_EQ(e.stream, "ExternalLight");
    EXPECT_EQ(e.timestamp, 1000);
    EXPECT_EQ(e.source, "e4");
    EXPECT_EQ(*e.find("floor"), FieldValue(3));
    EXPECT_EQ(encodeEvent(e, registry), payload);
}

TEST_F(EventCodecTest, unknownStreamIsRejected) {
    EXPECT_THROW(decodeEvent(R"({"_stream":"Unknown","_ts":1,"_src":"a"})", registry), UnknownStreamError);
}

TEST_F(EventCodecTest, stringInIntegerFieldIsRejected) {
    try {
        decodeEvent(R"({"_stream":"ExternalLight","_ts":1,"_src":"a","isOn":true,"floor":"3"})", registry);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "floor");
    }
}

TEST_F(EventCodecTest, missingAndExtraFieldsAreRejected) {
    EXPECT_THROW(decodeEvent(R"({"_stream":"ExternalLight","_ts":1,"_src":"a","isOn":true})", registry), ValidationError);
    EXPECT_THROW(decodeEvent(R"({"_stream":"ExternalLight","_ts":1,"_src":"a","isOn":true,"floor":1,"x":2})", registry),
                 ValidationError);
    EXPECT_THROW(decodeEvent(R"({"_stream":"ExternalLight","_ts":-1,"_src":"a","isOn":true,"floor":1})", registry),
                 ValidationError);
    EXPECT_THROW(decodeEvent("{not json", registry), DecodeError);
}

TEST_F(EventCodecTest, integersWidenToDeclaredNumber) {
    Event e = decodeEvent(R"({"_stream":"Vital","_ts":1,"_src":"a","id":"m1","room":2,"o2":90})", registry);
    EXPECT_EQ(e.find("o2")->type(), FieldType::Number);
    EXPECT_EQ(e.find("o2")->asNumber(), 90.0);
}

TEST_F(EventCodecTest, fieldOrderFollowsSchema) {
    Event e = decodeEvent(R"({"floor":2,"_src":"a","isOn":false,"_ts":7,"_stream":"ExternalLight"})", registry);
    ASSERT_EQ(e.fields.size(), 2u);
    EXPECT_EQ(e.fields[0].first, "isOn");
}

TEST_F(EventCodecTest, randomRoundTrip) {
    registry.add({"Mixed",
                  {{"n", DeclaredType::Number},
                   {"i", DeclaredType::Integer},
                   {"s", DeclaredType::String},
                   {"b", DeclaredType::Boolean}}});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> real(-1e12, 1e12);
    std::uniform_int_distribution<int64_t> integer(-kMaxExactInteger, kMaxExactInteger);
    for (int k = 0; k < 1000; ++k) {
        std::string s;
        const size_t len = rng() % 12;
        for (size_t c = 0; c < len; ++c) s.push_back(static_cast<char>(rng() % 2 ? 'a' + rng() % 26 : 1 + rng() % 127));
        if (rng() % 9 == 0) s += "\xc3\xa9";
        Event e = testing::makeEvent("Mixed", static_cast<int64_t>(rng() % 4'000'000'000'000ULL),
                                     {{"n", rng() % 10 == 0 ? FieldValue::null() : FieldValue(real(rng))},
                                      {"i", integer(rng)},
                                      {"s", s},
                                      {"b", rng() % 2 == 0}});
        e.source = "src" + std::to_string(k);
        const std::string wire = encodeEvent(e, registry);
        const Event back = decodeEvent(wire, registry);
        ASSERT_EQ(back, e) << wire;
        ASSERT_EQ(encodeEvent(back, registry), wire);
    }
}

}// namespace atmosphere::event
