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

#include <atmosphere/pattern/PatternDef.hpp>

#include <algorithm>
#include <set>

namespace atmosphere::pattern {

std::int64_t Duration::toMillis() const {
    switch (unit) {
        case TimeUnit::Seconds: return magnitude * 1000;
        case TimeUnit::Minutes: return magnitude * 60'000;
        case TimeUnit::Hours: return magnitude * 3'600'000;
    }
    return 0;
}

const char* toString(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

PatternError::PatternError(Kind kind, const std::string& message, int line, int column)
    : AtmosphereError(line > 0 ? message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                               : message),
      errorKind(kind), errorLine(line), errorColumn(column) {}

const Binding* PatternDef::binding(std::string_view alias) const {
    for (const auto& b : bindings) {
        if (b.alias == alias) {
            return &b;
        }
    }
    return nullptr;
}

std::optional<std::string> PatternDef::tag(std::string_view key) const {
    auto it = tags.find(std::string(key));
    if (it == tags.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool PatternDef::hasCount() const {
    return std::any_of(select.begin(), select.end(),
                       [](const SelectItem& item) { return std::holds_alternative<select::Count>(item); });
}

namespace {

[[noreturn]] void fail(const std::string& message) { throw PatternError(PatternError::Kind::Semantic, message); }

}// namespace

void validatePattern(const PatternDef& p) {
    if (p.name.empty()) fail("pattern has no @Name");
    if (!p.tags.contains("domainName")) fail("pattern " + p.name + " lacks @Tag domainName");
    if (auto target = p.target()) {
        if (std::none_of(std::begin(kTargetAudiences), std::end(kTargetAudiences),
                         [&](const char* audience) { return *target == audience; })) {
            fail("pattern " + p.name + " has unknown target '" + *target + "'");
        }
    }
    if (p.insertInto.empty()) fail("pattern " + p.name + " has no insert into stream");
    if (p.bindings.empty()) fail("pattern " + p.name + " has no bindings");
    if (p.select.empty()) fail("pattern " + p.name + " selects nothing");

    std::set<std::string> aliases;
    for (std::size_t i = 0; i < p.bindings.size(); ++i) {
        const auto& b = p.bindings[i];
        if (!aliases.insert(b.alias).second) fail("duplicate alias '" + b.alias + "' in pattern " + p.name);
        for (const auto& pred : b.predicates) {
            if (pred.lhs.alias != b.alias) {
                fail("predicate on binding '" + b.alias + "' must start with " + b.alias + ".<field>");
            }
            if (const auto* rhs = std::get_if<FieldPath>(&pred.rhs)) {
                bool earlier = false;
                for (std::size_t j = 0; j < i; ++j) {
                    earlier = earlier || p.bindings[j].alias == rhs->alias;
                }
                if (!earlier) {
                    fail("correlation '" + rhs->alias + "." + rhs->field + "' in binding '" + b.alias
                         + "' does not refer to an earlier binding");
                }
            } else if (std::get<event::FieldValue>(pred.rhs).isNull()) {
                fail("null literals are not supported");
            }
        }
    }
    auto requireAlias = [&](const FieldPath& path, const char* where) {
        if (!aliases.contains(path.alias)) {
            fail(std::string(where) + " references undeclared alias '" + path.alias + "' in pattern " + p.name);
        }
    };
    std::set<std::string> outputNames;
    int counts = 0;
    for (const auto& item : p.select) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, select::StarOf>) {
                    if (!aliases.contains(s.alias)) fail("select references undeclared alias '" + s.alias + "'");
                    const auto* b = p.binding(s.alias);
                    if (!b->selectAll) fail("binding '" + s.alias + "' selectAll flag out of sync with select list");
                } else {
                    if constexpr (!std::is_same_v<T, select::CurrentTimestamp>) {
                        requireAlias(s.path, "select");
                    }
                    if constexpr (std::is_same_v<T, select::Count>) {
                        ++counts;
                    }
                    if (!outputNames.insert(s.as).second) fail("duplicate output name '" + s.as + "'");
                }
            },
            item);
    }
    for (const auto& b : p.bindings) {
        bool starred = std::any_of(p.select.begin(), p.select.end(), [&](const SelectItem& item) {
            const auto* star = std::get_if<select::StarOf>(&item);
            return star && star->alias == b.alias;
        });
        if (starred != b.selectAll) fail("binding '" + b.alias + "' selectAll flag out of sync with select list");
    }
    for (const auto& path : p.groupBy) requireAlias(path, "group by");

    if (counts > 1) fail("at most one count() per pattern");
    if (p.window && p.window->magnitude <= 0) fail("window length must be positive");
    if (!p.groupBy.empty() && !p.window) fail("group by requires a time_batch window");
    if (counts > 0 && !p.window) fail("count() requires a time_batch window");
    if (p.isConjunction() && (counts > 0 || !p.groupBy.empty())) {
        fail("aggregation over a conjunction of bindings is not supported");
    }
}

}// namespace atmosphere::pattern
