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

#include <atmosphere/pattern/Parser.hpp>

#include <charconv>
#include <sstream>

namespace atmosphere::pattern {

namespace {

std::string quote(std::string_view text, char delimiter) {
    std::string out(1, delimiter);
    for (char c : text) {
        if (c == delimiter || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back(delimiter);
    return out;
}

std::string printLiteral(const event::FieldValue& value) {
    using event::FieldType;
    switch (value.type()) {
        case FieldType::Integer: return std::to_string(value.asInteger());
        case FieldType::Number: {
            char buffer[64];
            auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value.asNumber());
            std::string text(buffer, end);
            if (text.find_first_of(".e") == std::string::npos) text += ".0";
            return text;
        }
        case FieldType::String: return quote(value.asString(), '\'');
        case FieldType::Boolean: return value.asBoolean() ? "true" : "false";
        case FieldType::Null: return "null";
    }
    return {};
}

std::string printPath(const FieldPath& path) { return path.alias + "." + path.field; }

const char* unitName(TimeUnit unit) {
    switch (unit) {
        case TimeUnit::Seconds: return "seconds";
        case TimeUnit::Minutes: return "minutes";
        case TimeUnit::Hours: return "hours";
    }
    return "";
}

void printBinding(std::ostream& out, const Binding& b) {
    out << b.alias << " = " << b.stream;
    if (b.predicates.empty()) return;
    out << "(";
    for (std::size_t i = 0; i < b.predicates.size(); ++i) {
        const auto& pred = b.predicates[i];
        if (i > 0) out << " and ";
        out << printPath(pred.lhs) << " " << toString(pred.op) << " ";
        if (const auto* path = std::get_if<FieldPath>(&pred.rhs)) {
            out << printPath(*path);
        } else {
            out << printLiteral(std::get<event::FieldValue>(pred.rhs));
        }
    }
    out << ")";
}

}// namespace

std::string printPattern(const PatternDef& p) {
    std::ostringstream out;
    out << "@Name(" << quote(p.name, '"') << ")\n";
    for (const auto& [key, value] : p.tags) {
        out << "@Tag(name=" << quote(key, '"') << ", value=" << quote(value, '"') << ")\n";
    }
    out << "insert into " << p.insertInto << "\nselect ";
    for (std::size_t i = 0; i < p.select.size(); ++i) {
        if (i > 0) out << ",\n  ";
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, select::FieldRef>) out << printPath(s.path) << " as " << s.as;
                else if constexpr (std::is_same_v<T, select::CurrentTimestamp>) out << "current_timestamp() as " << s.as;
                else if constexpr (std::is_same_v<T, select::Count>) out << "count(" << printPath(s.path) << ") as " << s.as;
                else out << s.alias << ".*";
            },
            p.select[i]);
    }
    out << "\nfrom pattern [every ";
    if (p.bindings.size() == 1) {
        printBinding(out, p.bindings.front());
    } else {
        out << "(";
        for (std::size_t i = 0; i < p.bindings.size(); ++i) {
            if (i > 0) out << " and ";
            printBinding(out, p.bindings[i]);
        }
        out << ")";
    }
    out << "]";
    if (p.window) out << ".win:time_batch(" << p.window->magnitude << " " << unitName(p.window->unit) << ")";
    if (!p.groupBy.empty()) {
        out << "\ngroup by ";
        for (std::size_t i = 0; i < p.groupBy.size(); ++i) {
            if (i > 0) out << ", ";
            out << printPath(p.groupBy[i]);
        }
    }
    out << "\n";
    return out.str();
}

}// namespace atmosphere::pattern
