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

#include <atmosphere/cep/SchemaInference.hpp>

#include <set>

namespace atmosphere::cep {

using event::DeclaredType;
using pattern::PatternError;

namespace {

[[noreturn]] void fail(const pattern::PatternDef& p, const std::string& message) {
    throw PatternError(PatternError::Kind::Semantic, "pattern " + p.name + ": " + message);
}

bool numeric(DeclaredType t) { return t == DeclaredType::Number || t == DeclaredType::Integer; }

bool comparable(DeclaredType a, DeclaredType b) { return a == b || (numeric(a) && numeric(b)); }

DeclaredType literalType(const event::FieldValue& v) {
    switch (v.type()) {
        case event::FieldType::Number: return DeclaredType::Number;
        case event::FieldType::Integer: return DeclaredType::Integer;
        case event::FieldType::String: return DeclaredType::String;
        default: return DeclaredType::Boolean;
    }
}

}// namespace

event::EventSchema inferOutputSchema(const pattern::PatternDef& p, const event::SchemaRegistry& registry) {
    auto schemaOf = [&](const std::string& alias) -> const event::EventSchema& {
        const auto* b = p.binding(alias);
        return registry.get(b->stream);
    };
    auto fieldType = [&](const pattern::FieldPath& path) {
        auto type = schemaOf(path.alias).typeOf(path.field);
        if (!type) {
            fail(p, "stream " + p.binding(path.alias)->stream + " has no field '" + path.field + "'");
        }
        return *type;
    };

    for (const auto& b : p.bindings) {
        registry.get(b.stream);// throws UnknownStreamError
    }
    for (const auto& b : p.bindings) {
        for (const auto& pred : b.predicates) {
            const auto lhs = fieldType(pred.lhs);
            const auto rhs = std::holds_alternative<pattern::FieldPath>(pred.rhs)
                ? fieldType(std::get<pattern::FieldPath>(pred.rhs))
                : literalType(std::get<event::FieldValue>(pred.rhs));
            if (!comparable(lhs, rhs)) {
                fail(p, std::string("cannot compare ") + event::toString(lhs) + " field " + pred.lhs.alias + "."
                         + pred.lhs.field + " with " + event::toString(rhs));
            }
        }
    }
    for (const auto& path : p.groupBy) {
        fieldType(path);
    }

    event::EventSchema out;
    out.stream = p.insertInto;
    std::set<std::string> names;
    auto add = [&](const std::string& name, DeclaredType type) {
        if (!names.insert(name).second) {
            fail(p, "output field '" + name + "' produced twice");
        }
        out.fields.emplace_back(name, type);
    };
    for (const auto& item : p.select) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, pattern::select::FieldRef>) add(s.as, fieldType(s.path));
                else if constexpr (std::is_same_v<T, pattern::select::CurrentTimestamp>) add(s.as, DeclaredType::Integer);
                else if constexpr (std::is_same_v<T, pattern::select::Count>) {
                    fieldType(s.path);
                    add(s.as, DeclaredType::Integer);
                } else {
                    for (const auto& [name, type] : schemaOf(s.alias).fields) add(name, type);
                }
            },
            item);
    }
    return out;
}

void registerDerivedSchemas(const std::vector<pattern::PatternDef>& patterns, event::SchemaRegistry& registry) {
    std::vector<const pattern::PatternDef*> remaining;
    for (const auto& p : patterns) remaining.push_back(&p);
    bool progress = true;
    while (!remaining.empty() && progress) {
        progress = false;
        for (auto it = remaining.begin(); it != remaining.end();) {
            const auto& p = **it;
            bool ready = true;
            for (const auto& b : p.bindings) ready = ready && registry.contains(b.stream);
            if (!ready) {
                ++it;
                continue;
            }
            registry.add(inferOutputSchema(p, registry));
            it = remaining.erase(it);
            progress = true;
        }
    }
    if (!remaining.empty()) {
        // Surface the first unresolved input.
        for (const auto& b : remaining.front()->bindings) registry.get(b.stream);
    }
}

}// namespace atmosphere::cep
