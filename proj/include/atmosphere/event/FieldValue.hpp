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

#ifndef ATMOSPHERE_EVENT_FIELDVALUE_HPP_
#define ATMOSPHERE_EVENT_FIELDVALUE_HPP_

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

namespace atmosphere::event {

enum class FieldType { Null, Number, Integer, String, Boolean };

const char* toString(FieldType type);

/**
 * @brief A typed scalar carried by an event field.
 *
 * Equality is strict (type and value). Use compareValues() for the
 * coercing comparison used by predicates and guards.
 */
class FieldValue {
  public:
    using Storage = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

    FieldValue() = default;
    FieldValue(double v) : value(v) {}
    FieldValue(std::int64_t v) : value(v) {}
    FieldValue(int v) : value(static_cast<std::int64_t>(v)) {}
    FieldValue(std::string v) : value(std::move(v)) {}
    FieldValue(const char* v) : value(std::string(v)) {}
    FieldValue(bool v) : value(v) {}

    static FieldValue null() { return {}; }

    FieldType type() const;
    bool isNull() const { return std::holds_alternative<std::monostate>(value); }
    bool isNumeric() const { return type() == FieldType::Number || type() == FieldType::Integer; }

    double asNumber() const;
    std::int64_t asInteger() const { return std::get<std::int64_t>(value); }
    const std::string& asString() const { return std::get<std::string>(value); }
    bool asBoolean() const { return std::get<bool>(value); }

    const Storage& storage() const { return value; }

    bool operator==(const FieldValue&) const = default;

  private:
    Storage value;
};

/**
 * Orders two values. Integer and number operands are compared numerically;
 * any other mix of types (including null against non-null) throws TypeError.
 */
std::partial_ordering compareValues(const FieldValue& lhs, const FieldValue& rhs);

/// Human-readable rendering (strings unquoted); used by log templates.
std::string toDisplayString(const FieldValue& value);

/// Largest integer magnitude that survives a round trip through a JSON double.
inline constexpr std::int64_t kMaxExactInteger = (std::int64_t{1} << 53);

}// namespace atmosphere::event

#endif// ATMOSPHERE_EVENT_FIELDVALUE_HPP_
