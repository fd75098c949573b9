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

#ifndef ATMOSPHERE_EVENT_SCHEMA_HPP_
#define ATMOSPHERE_EVENT_SCHEMA_HPP_

#include <atmosphere/event/Event.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace atmosphere::event {

enum class DeclaredType { Number, Integer, String, Boolean };

const char* toString(DeclaredType type);
std::optional<DeclaredType> parseDeclaredType(std::string_view name);

/// True when a value of type `actual` may be stored in a field declared as `declared`.
/// Null is accepted for every declared type.
bool isCoercible(FieldType actual, DeclaredType declared);

struct EventSchema {
    std::string stream;
    std::vector<std::pair<std::string, DeclaredType>> fields;

    std::optional<DeclaredType> typeOf(std::string_view field) const;
    bool operator==(const EventSchema&) const = default;
};

/// Stream name -> schema. Registering a different schema under an existing name is an error.
class SchemaRegistry {
  public:
    void add(EventSchema schema);
    const EventSchema* find(std::string_view stream) const;
    const EventSchema& get(std::string_view stream) const;
    bool contains(std::string_view stream) const { return find(stream) != nullptr; }
    const std::map<std::string, EventSchema, std::less<>>& all() const { return schemas; }

  private:
    std::map<std::string, EventSchema, std::less<>> schemas;
};

/**
 * Checks stream/timestamp invariants and that every declared field is present
 * with a coercible type and no undeclared field exists. Throws ValidationError
 * naming the offending field, or UnknownStreamError.
 */
void validate(const Event& event, const SchemaRegistry& registry);

/// Returns a copy of `event` with fields in schema declaration order and integer
/// values widened to number where the schema says number.
Event canonicalize(const Event& event, const EventSchema& schema);

}// namespace atmosphere::event

#endif// ATMOSPHERE_EVENT_SCHEMA_HPP_
