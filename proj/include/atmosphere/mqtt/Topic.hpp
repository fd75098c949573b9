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

#ifndef ATMOSPHERE_MQTT_TOPIC_HPP_
#define ATMOSPHERE_MQTT_TOPIC_HPP_

#include <string_view>

namespace atmosphere::mqtt {

/// Non-empty and free of the wildcard characters `+` and `#`.
bool isValidTopicName(std::string_view name);

/// `+` must fill a whole level; `#` must fill the last level.
bool isValidTopicFilter(std::string_view filter);

/**
 * Level-wise MQTT 3.1.1 matching: `+` matches exactly one level, `#` matches
 * the remainder (including the parent level). Wildcards in the first level do
 * not match names starting with `$`.
 */
bool matchTopic(std::string_view filter, std::string_view name);

}// namespace atmosphere::mqtt

#endif// ATMOSPHERE_MQTT_TOPIC_HPP_
