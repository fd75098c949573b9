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
#include <atmosphere/event/Schema.hpp>

#include <cstdlib>
#include <set>

namespace atmosphere::event {

const char* toString(DeclaredType type) {
    switch (type) {
        case DeclaredType::Number: return "number";
        case DeclaredType::Integer: return "integer";
        case DeclaredType::String: return "string";
        case DeclaredType::Boolean: return "boolean";
    }
    return "?";
}

std::optional<DeclaredType> parseDeclaredType(std::string_view name) {
    if (name == "number") return DeclaredType::Number;
    if (name == "integer") return DeclaredType::Integer;
    if (name == "string") return DeclaredType::String;
    if (name == "boolean") return DeclaredType::Boolean;
    return std::nullopt;
}

bool isCoercible(FieldType actual, DeclaredType declared) {
    switch (actual) {
        case FieldType::Null: return true;
        case FieldType::Integer: return declared == DeclaredType::Integer || declared == DeclaredType::Number;
        case FieldType::Number: return declared == DeclaredType::Number;
        case FieldType::String: return declared == DeclaredType::String;
        case FieldType::Boolean: return declared == DeclaredType::Boolean;
    }
    return false;
}

std::optional<DeclaredType> EventSchema::typeOf(std::string_view field) const {
    for (const auto& [name, type] : fields) {
        if (name == field) {
            return type;
        }
    }
    return std::nullopt;
}

void SchemaRegistry::add(EventSchema schema) {
    if (!isIdentifier(schema.stream)) {
        throw ConfigError("invalid stream name '" + schema.stream + "'");
    }
    std::set<std::string_view> seen;
    for (const auto& [name, type] : schema.fields) {
        if (!isIdentifier(name) || name.front() == '_') {
            throw ConfigError("invalid field name '" + name + "' in schema " + schema.stream);
        }
        if (!seen.insert(name).second) {
            throw ConfigError("duplicate field '" + name + "' in schema " + schema.stream);
        }
    }
    auto it = schemas.find(schema.stream);
    if (it != schemas.end()) {
        if (it->second == schema) {
            return;
        }
        throw ConfigError("conflicting schema for stream " + schema.stream);
    }
    auto key = schema.stream;
    schemas.emplace(std::move(key), std::move(schema));
}

const EventSchema* SchemaRegistry::find(std::string_view stream) const {
    auto it = schemas.find(stream);
    return it == schemas.end() ? nullptr : &it->second;
}

const EventSchema& SchemaRegistry::get(std::string_view stream) const {
    if (const auto* schema = find(stream)) {
        return *schema;
    }
    throw UnknownStreamError(std::string(stream));
}

void validate(const Event& event, const SchemaRegistry& registry) {
    if (!isIdentifier(event.stream)) {
        throw ValidationError("_stream", "invalid stream name '" + event.stream + "'");
    }
    if (event.timestamp < 0) {
        throw ValidationError("_ts", "negative timestamp");
    }
    const auto& schema = registry.get(event.stream);
    std::set<std::string_view> seen;
    for (const auto& [name, value] : event.fields) {
        if (!seen.insert(name).second) {
            throw ValidationError(name, "duplicate field '" + name + "'");
        }
        auto declared = schema.typeOf(name);
        if (!declared) {
            throw ValidationError(name, "field '" + name + "' is not declared by " + schema.stream);
        }
        if (!isCoercible(value.type(), *declared)) {
            throw ValidationError(name, "field '" + name + "' has type " + toString(value.type()) + ", declared "
                                      + toString(*declared));
        }
        if (value.type() == FieldType::Integer && std::llabs(value.asInteger()) > kMaxExactInteger) {
            throw ValidationError(name, "field '" + name + "' exceeds the exact integer range");
        }
    }
    for (const auto& [name, type] : schema.fields) {
        if (!seen.contains(name)) {
            throw ValidationError(name, "missing field '" + name + "' for " + schema.stream);
        }
    }
}

Event canonicalize(const Event& event, const EventSchema& schema) {
    Event out{event.stream, {}, event.timestamp, event.source};
    out.fields.reserve(schema.fields.size());
    for (const auto& [name, type] : schema.fields) {
        const auto* value = event.find(name);
        FieldValue v = value ? *value : FieldValue::null();
        if (type == DeclaredType::Number && v.type() == FieldType::Integer) {
            v = FieldValue(v.asNumber());
        }
        out.fields.emplace_back(name, std::move(v));
    }
    return out;
}

}// namespace atmosphere::event
