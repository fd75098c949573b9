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

#include <atmosphere/common/Errors.hpp>
#include <atmosphere/event/Event.hpp>
#include <atmosphere/event/FieldValue.hpp>

#include <charconv>
#include <cmath>

namespace atmosphere::event {

const char* toString(FieldType type) {
    switch (type) {
        case FieldType::Null: return "null";
        case FieldType::Number: return "number";
        case FieldType::Integer: return "integer";
        case FieldType::String: return "string";
        case FieldType::Boolean: return "boolean";
    }
    return "?";
}

FieldType FieldValue::type() const {
    switch (value.index()) {
        case 0: return FieldType::Null;
        case 1: return FieldType::Number;
        case 2: return FieldType::Integer;
        case 3: return FieldType::String;
        default: return FieldType::Boolean;
    }
}

double FieldValue::asNumber() const {
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
        return static_cast<double>(*i);
    }
    return std::get<double>(value);
}

std::partial_ordering compareValues(const FieldValue& lhs, const FieldValue& rhs) {
    const auto lt = lhs.type();
    const auto rt = rhs.type();
    if (lt == FieldType::Integer && rt == FieldType::Integer) {
        return lhs.asInteger() <=> rhs.asInteger();
    }
    if (lhs.isNumeric() && rhs.isNumeric()) {
        return lhs.asNumber() <=> rhs.asNumber();
    }
    if (lt != rt) {
        throw TypeError(std::string("cannot compare ") + toString(lt) + " with " + toString(rt));
    }
    switch (lt) {
        case FieldType::String: return lhs.asString() <=> rhs.asString();
        case FieldType::Boolean: return lhs.asBoolean() <=> rhs.asBoolean();
        default: return std::partial_ordering::equivalent;// null == null
    }
}

std::string toDisplayString(const FieldValue& value) {
    switch (value.type()) {
        case FieldType::Null: return "null";
        case FieldType::Number: {
            char buffer[32];
            auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value.asNumber());
            return std::string(buffer, end);
        }
        case FieldType::Integer: return std::to_string(value.asInteger());
        case FieldType::String: return value.asString();
        case FieldType::Boolean: return value.asBoolean() ? "true" : "false";
    }
    return {};
}

bool isIdentifier(std::string_view text) {
    if (text.empty()) {
        return false;
    }
    auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
    if (!alpha(text.front())) {
        return false;
    }
    for (char c : text) {
        if (!alpha(c) && !(c >= '0' && c <= '9')) {
            return false;
        }
    }
    return true;
}

}// namespace atmosphere::event
