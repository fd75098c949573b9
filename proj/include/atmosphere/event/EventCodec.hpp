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

#ifndef ATMOSPHERE_EVENT_EVENTCODEC_HPP_
#define ATMOSPHERE_EVENT_EVENTCODEC_HPP_

#include <atmosphere/event/Event.hpp>
#include <atmosphere/event/Schema.hpp>

#include <json.hpp>

#include <string>
#include <string_view>

namespace atmosphere::event {

using OrderedJson = nlohmann::ordered_json;

/// JSON payload: reserved keys `_stream`, `_ts`, `_src` first, then fields in schema order.
std::string encodeEvent(const Event& event, const SchemaRegistry& registry);

/// Inverse of encodeEvent. Accepts fields in any order.
Event decodeEvent(std::string_view payload, const SchemaRegistry& registry);

/// Same as above on an already parsed object (used for ACL content).
Event fromJson(const OrderedJson& object, const SchemaRegistry& registry);
OrderedJson toJson(const Event& event, const SchemaRegistry& registry);

OrderedJson toJson(const FieldValue& value);
/// Converts a JSON scalar; objects and arrays raise DecodeError.
FieldValue fromJson(const OrderedJson& json);

}// namespace atmosphere::event

#endif// ATMOSPHERE_EVENT_EVENTCODEC_HPP_
