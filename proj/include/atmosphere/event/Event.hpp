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

#ifndef ATMOSPHERE_EVENT_EVENT_HPP_
#define ATMOSPHERE_EVENT_EVENT_HPP_

#include <atmosphere/event/FieldValue.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atmosphere::event {

using Field = std::pair<std::string, FieldValue>;

/// A timestamped record flowing through every tier.
struct Event {
    std::string stream;
    std::vector<Field> fields;
    std::int64_t timestamp = 0;// ms since Unix epoch
    std::string source;

    const FieldValue* find(std::string_view name) const {
        for (const auto& [fieldName, value] : fields) {
            if (fieldName == name) {
                return &value;
            }
        }
        return nullptr;
    }

    void set(std::string name, FieldValue value) {
        for (auto& [fieldName, current] : fields) {
            if (fieldName == name) {
                current = std::move(value);
                return;
            }
        }
        fields.emplace_back(std::move(name), std::move(value));
    }

    bool operator==(const Event&) const = default;
};

/// True for names matching [A-Za-z_][A-Za-z0-9_]*.
bool isIdentifier(std::string_view text);

}// namespace atmosphere::event

#endif// ATMOSPHERE_EVENT_EVENT_HPP_
