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

#ifndef ATMOSPHERE_PATTERN_PARSER_HPP_
#define ATMOSPHERE_PATTERN_PARSER_HPP_

#include <atmosphere/pattern/PatternDef.hpp>

#include <string_view>
#include <vector>

namespace atmosphere::pattern {

/// Parses exactly one pattern. Errors carry 1-based line/column.
PatternDef parsePattern(std::string_view text);

/// Parses a pattern file holding one or more patterns (blank lines or `;` between them).
std::vector<PatternDef> parsePatternFile(std::string_view text);

/// Canonical text; parsePattern(printPattern(p)) == p for every valid p.
std::string printPattern(const PatternDef& pattern);

}// namespace atmosphere::pattern

#endif// ATMOSPHERE_PATTERN_PARSER_HPP_
