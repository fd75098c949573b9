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

#ifndef ATMOSPHERE_PATTERN_PATTERNDEF_HPP_
#define ATMOSPHERE_PATTERN_PATTERNDEF_HPP_

#include <atmosphere/common/Errors.hpp>
#include <atmosphere/event/FieldValue.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace atmosphere::pattern {

enum class TimeUnit { Seconds, Minutes, Hours };

struct Duration {
    std::int64_t magnitude = 0;
    TimeUnit unit = TimeUnit::Seconds;

    std::int64_t toMillis() const;
    bool operator==(const Duration&) const = default;
};

struct FieldPath {
    std::string alias;
    std::string field;
    bool operator==(const FieldPath&) const = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
const char* toString(CompareOp op);

struct Predicate {
    FieldPath lhs;
    CompareOp op = CompareOp::Eq;
    std::variant<event::FieldValue, FieldPath> rhs;

    bool isCorrelation() const { return std::holds_alternative<FieldPath>(rhs); }
    bool operator==(const Predicate&) const = default;
};

struct Binding {
    std::string alias;
    std::string stream;
    std::vector<Predicate> predicates;
    bool selectAll = false;// `alias.*` appears in the select list
    bool operator==(const Binding&) const = default;
};

namespace select {
struct FieldRef {
    FieldPath path;
    std::string as;
    bool operator==(const FieldRef&) const = default;
};
struct CurrentTimestamp {
    std::string as;
    bool operator==(const CurrentTimestamp&) const = default;
};
struct Count {
    FieldPath path;
    std::string as;
    bool operator==(const Count&) const = default;
};
struct StarOf {
    std::string alias;
    bool operator==(const StarOf&) const = default;
};
}// namespace select

using SelectItem = std::variant<select::FieldRef, select::CurrentTimestamp, select::Count, select::StarOf>;

/// Parsed, validated form of one pattern definition.
struct PatternDef {
    std::string name;
    std::map<std::string, std::string> tags;
    std::string insertInto;
    std::vector<SelectItem> select;
    std::vector<Binding> bindings;
    std::optional<Duration> window;
    std::vector<FieldPath> groupBy;

    const Binding* binding(std::string_view alias) const;
    std::optional<std::string> tag(std::string_view key) const;
    std::optional<std::string> target() const { return tag("target"); }
    bool isConjunction() const { return bindings.size() > 1; }
    bool hasCount() const;
    bool operator==(const PatternDef&) const = default;
};

class PatternError : public AtmosphereError {
  public:
    enum class Kind { Syntax, Unsupported, Semantic };
    PatternError(Kind kind, const std::string& message, int line = 0, int column = 0);
    Kind kind() const { return errorKind; }
    int line() const { return errorLine; }
    int column() const { return errorColumn; }

  private:
    Kind errorKind;
    int errorLine;
    int errorColumn;
};

/// Semantic checks shared by the parser and programmatic construction. Throws PatternError(Semantic).
void validatePattern(const PatternDef& pattern);

inline constexpr const char* kTargetAudiences[] = {"edge", "cloud", "fog", "user"};

}// namespace atmosphere::pattern

#endif// ATMOSPHERE_PATTERN_PATTERNDEF_HPP_
