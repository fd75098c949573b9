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

#include <atmosphere/mqtt/Topic.hpp>

namespace atmosphere::mqtt {

namespace {

/// Splits off the next level; `rest` becomes empty-with-flag when exhausted.
struct LevelCursor {
    std::string_view text;
    bool exhausted = false;

    std::string_view next() {
        auto slash = text.find('/');
        std::string_view level = text.substr(0, slash);
        if (slash == std::string_view::npos) {
            exhausted = true;
            text = {};
        } else {
            text.remove_prefix(slash + 1);
        }
        return level;
    }
};

}// namespace

bool isValidTopicName(std::string_view name) {
    return !name.empty() && name.find_first_of("+#") == std::string_view::npos
        && name.find('\0') == std::string_view::npos;
}

bool isValidTopicFilter(std::string_view filter) {
    if (filter.empty()) {
        return false;
    }
    LevelCursor cursor{filter};
    while (!cursor.exhausted) {
        auto level = cursor.next();
        if (level.find_first_of("+#") != std::string_view::npos && level.size() != 1) {
            return false;
        }
        if (level == "#" && !cursor.exhausted) {
            return false;
        }
    }
    return true;
}

bool matchTopic(std::string_view filter, std::string_view name) {
    if (!name.empty() && name.front() == '$' && !filter.empty() && (filter.front() == '+' || filter.front() == '#')) {
        return false;
    }
    LevelCursor f{filter};
    LevelCursor n{name};
    while (!f.exhausted) {
        auto filterLevel = f.next();
        if (filterLevel == "#") {
            return true;
        }
        if (n.exhausted) {
            return false;
        }
        auto nameLevel = n.next();
        if (filterLevel != "+" && filterLevel != nameLevel) {
            return false;
        }
    }
    return n.exhausted;
}

}// namespace atmosphere::mqtt
