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
#include <atmosphere/event/EventCodec.hpp>

namespace atmosphere::event {

OrderedJson toJson(const FieldValue& value) {
    switch (value.type()) {
        case FieldType::Null: return nullptr;
        case FieldType::Number: return value.asNumber();
        case FieldType::Integer: return value.asInteger();
        case FieldType::String: return value.asString();
        case FieldType::Boolean: return value.asBoolean();
    }
    return nullptr;
}

FieldValue fromJson(const OrderedJson& json) {
    switch (json.type()) {
        case OrderedJson::value_t::null: return FieldValue::null();
        case OrderedJson::value_t::boolean: return FieldValue(json.get<bool>());
        case OrderedJson::value_t::number_integer: return FieldValue(json.get<std::int64_t>());
        case OrderedJson::value_t::number_unsigned: {
            auto u = json.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(kMaxExactInteger)) {
                throw DecodeError("integer out of exact range");
            }
            return FieldValue(static_cast<std::int64_t>(u));
        }
        case OrderedJson::value_t::number_float: return FieldValue(json.get<double>());
        case OrderedJson::value_t::string: return FieldValue(json.get<std::string>());
        default: throw DecodeError("field values must be JSON scalars");
    }
}

OrderedJson toJson(const Event& event, const SchemaRegistry& registry) {
    validate(event, registry);
    const auto canonical = canonicalize(event, registry.get(event.stream));
    OrderedJson object = OrderedJson::object();
    object["_stream"] = canonical.stream;
    object["_ts"] = canonical.timestamp;
    object["_src"] = canonical.source;
    for (const auto& [name, value] : canonical.fields) {
        object[name] = toJson(value);
    }
    return object;
}

std::string encodeEvent(const Event& event, const SchemaRegistry& registry) {
    return toJson(event, registry).dump();
}

Event fromJson(const OrderedJson& object, const SchemaRegistry& registry) {
    if (!object.is_object()) {
        throw DecodeError("event payload must be a JSON object");
    }
    auto stream = object.find("_stream");
    auto ts = object.find("_ts");
    auto src = object.find("_src");
    if (stream == object.end() || !stream->is_string()) {
        throw DecodeError("missing _stream");
    }
    if (ts == object.end() || !ts->is_number_integer()) {
        throw DecodeError("missing or non-integer _ts");
    }
    if (src == object.end() || !src->is_string()) {
        throw DecodeError("missing _src");
    }
    Event event;
    event.stream = stream->get<std::string>();
    event.timestamp = ts->get<std::int64_t>();
    event.source = src->get<std::string>();
    const auto& schema = registry.get(event.stream);
    for (auto it = object.begin(); it != object.end(); ++it) {
        if (!it.key().empty() && it.key().front() == '_') {
            if (it.key() != "_stream" && it.key() != "_ts" && it.key() != "_src") {
                throw ValidationError(it.key(), "unknown reserved key '" + it.key() + "'");
            }
            continue;
        }
        FieldValue value;
        try {
            value = fromJson(it.value());
        } catch (const DecodeError& e) {
            throw ValidationError(it.key(), "field '" + it.key() + "': " + e.what());
        }
        event.fields.emplace_back(it.key(), std::move(value));
    }
    validate(event, registry);
    return canonicalize(event, schema);
}

Event decodeEvent(std::string_view payload, const SchemaRegistry& registry) {
    OrderedJson object;
    try {
        object = OrderedJson::parse(payload);
    } catch (const OrderedJson::parse_error& e) {
        throw DecodeError(std::string("malformed JSON: ") + e.what());
    }
    return fromJson(object, registry);
}

}// namespace atmosphere::event
