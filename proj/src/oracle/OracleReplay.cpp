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

#include <atmosphere/oracle/OracleReplay.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace atmosphere::oracle {

using event::Event;
using event::FieldValue;
using pattern::PatternDef;

namespace {

struct Key {
    int64_t time;
    int phase;// 0 = boundary, 1 = raw event
    int64_t logIndex;
    int rank; // -1 for raw events
    int64_t seq;
    auto tie() const { return std::tie(time, phase, logIndex, rank, seq); }
    bool operator<(const Key& o) const { return tie() < o.tie(); }
};

struct Item {
    Key key;
    Event event;
};

FieldValue valueAt(const Event& e, const std::string& field) {
    for (const auto& [name, v] : e.fields) {
        if (name == field) return v;
    }
    return FieldValue::null();
}

bool test(const FieldValue& a, pattern::CompareOp op, const FieldValue& b) {
    if (a.isNull() || b.isNull()) return false;
    double x = 0, y = 0;
    int c;
    if (a.type() == event::FieldType::Integer && b.type() == event::FieldType::Integer) {
        c = a.asInteger() < b.asInteger() ? -1 : (a.asInteger() > b.asInteger() ? 1 : 0);
    } else if (a.isNumeric() && b.isNumeric()) {
        x = a.asNumber();
        y = b.asNumber();
        if (std::isnan(x) || std::isnan(y)) return op == pattern::CompareOp::Ne;
        c = x < y ? -1 : (x > y ? 1 : 0);
    } else if (a.type() == event::FieldType::String && b.type() == event::FieldType::String) {
        c = a.asString().compare(b.asString());
        c = c < 0 ? -1 : (c > 0 ? 1 : 0);
    } else if (a.type() == event::FieldType::Boolean && b.type() == event::FieldType::Boolean) {
        c = int(a.asBoolean()) - int(b.asBoolean());
    } else {
        throw TypeError("incomparable operands");
    }
    switch (op) {
        case pattern::CompareOp::Eq: return c == 0;
        case pattern::CompareOp::Ne: return c != 0;
        case pattern::CompareOp::Lt: return c < 0;
        case pattern::CompareOp::Le: return c <= 0;
        case pattern::CompareOp::Gt: return c > 0;
        case pattern::CompareOp::Ge: return c >= 0;
    }
    return false;
}

bool literalsHold(const pattern::Binding& b, const Event& e) {
    for (const auto& pred : b.predicates) {
        if (pred.isCorrelation()) continue;
        if (!test(valueAt(e, pred.lhs.field), pred.op, std::get<FieldValue>(pred.rhs))) return false;
    }
    return true;
}

int64_t batchOf(int64_t t, int64_t start, int64_t len) {
    int64_t d = t - start;
    return d >= 0 ? d / len : -((-d + len - 1) / len);
}

using Slots = std::map<std::string, Event>;

Event render(const PatternDef& p, const Slots& slots, int64_t count, int64_t time, const std::string& source) {
    Event out;
    out.stream = p.insertInto;
    out.timestamp = time;
    out.source = source;
    for (const auto& item : p.select) {
        if (auto f = std::get_if<pattern::select::FieldRef>(&item)) {
            out.fields.emplace_back(f->as, valueAt(slots.at(f->path.alias), f->path.field));
        } else if (auto t = std::get_if<pattern::select::CurrentTimestamp>(&item)) {
            out.fields.emplace_back(t->as, FieldValue(time));
        } else if (auto n = std::get_if<pattern::select::Count>(&item)) {
            out.fields.emplace_back(n->as, FieldValue(count));
        } else {
            const auto& star = std::get<pattern::select::StarOf>(item);
            for (const auto& f : slots.at(star.alias).fields) out.fields.push_back(f);
        }
    }
    return out;
}

std::vector<size_t> evaluationOrder(const std::vector<PatternDef>& patterns) {
    std::vector<size_t> order;
    std::vector<bool> placed(patterns.size(), false);
    while (order.size() < patterns.size()) {
        bool advanced = false;
        for (size_t i = 0; i < patterns.size() && !advanced; ++i) {
            if (placed[i]) continue;
            bool ready = true;
            for (size_t j = 0; j < patterns.size(); ++j) {
                if (placed[j] || j == i) continue;
                for (const auto& b : patterns[i].bindings) {
                    if (b.stream == patterns[j].insertInto) ready = false;
                }
            }
            for (const auto& b : patterns[i].bindings) {
                if (b.stream == patterns[i].insertInto) ready = false;
            }
            if (ready) {
                placed[i] = true;
                order.push_back(i);
                advanced = true;
            }
        }
        if (!advanced) throw AtmosphereError("oracle: pattern graph has a cycle");
    }
    return order;
}

}// namespace

std::vector<OracleEmission> oracleReplay(const std::vector<PatternDef>& patterns,
                                         const event::SchemaRegistry& inputs,
                                         const std::vector<Event>& log,
                                         int64_t horizonMs,
                                         const ReplayOptions& options) {
    std::set<std::string> names;
    std::set<std::string> known;
    for (const auto& [name, schema] : inputs.all()) known.insert(name);
    for (const auto& p : patterns) {
        if (!names.insert(p.name).second) throw AtmosphereError("oracle: duplicate pattern " + p.name);
        known.insert(p.insertInto);
    }
    for (const auto& p : patterns) {
        for (const auto& b : p.bindings) {
            if (!known.count(b.stream)) throw UnknownStreamError(b.stream);
        }
    }

    std::vector<Item> items;
    int64_t last = options.startMs;
    for (size_t i = 0; i < log.size(); ++i) {
        const auto* schema = inputs.find(log[i].stream);
        if (!schema) throw UnknownStreamError(log[i].stream);
        if (log[i].timestamp < last) throw AtmosphereError("oracle: log is not time-ordered");
        last = log[i].timestamp;
        event::validate(log[i], inputs);
        items.push_back({{log[i].timestamp, 1, static_cast<int64_t>(i), -1, 0}, event::canonicalize(log[i], *schema)});
    }

    std::vector<Item> produced;
    const auto order = evaluationOrder(patterns);
    for (size_t rank = 0; rank < order.size(); ++rank) {
        const PatternDef& p = patterns[order[rank]];
        std::set<std::string> streams;
        for (const auto& b : p.bindings) streams.insert(b.stream);

        std::vector<Item> in;
        for (const auto* pool : {&items, &produced}) {
            for (const auto& it : *pool) {
                if (streams.count(it.event.stream)) in.push_back(it);
            }
        }
        std::stable_sort(in.begin(), in.end(), [](const Item& a, const Item& b) { return a.key < b.key; });

        int64_t seq = 0;
        std::vector<Item> out;
        auto emit = [&](const Key& step, Event e) {
            out.push_back({{step.time, step.phase, step.logIndex, static_cast<int>(rank), seq++}, std::move(e)});
        };

        if (!p.isConjunction() && !p.window) {
            for (const auto& it : in) {
                if (literalsHold(p.bindings[0], it.event)) {
                    emit(it.key, render(p, {{p.bindings[0].alias, it.event}}, 0, it.key.time, options.sourceId));
                }
            }
        } else if (!p.isConjunction()) {
            const int64_t len = p.window->toMillis();
            std::map<int64_t, std::vector<const Item*>> batches;
            for (const auto& it : in) batches[batchOf(it.key.time, options.startMs, len)].push_back(&it);
            const pattern::select::Count* counted = nullptr;
            for (const auto& s : p.select) {
                if (auto c = std::get_if<pattern::select::Count>(&s)) counted = c;
            }
            const std::string& alias = p.bindings[0].alias;
            for (const auto& [k, members] : batches) {
                const int64_t end = options.startMs + (k + 1) * len;
                if (end > horizonMs) continue;
                const Key step{end, 0, 0, 0, 0};
                std::vector<std::pair<std::vector<FieldValue>, std::pair<Event, int64_t>>> groups;
                for (const Item* it : members) {
                    if (!literalsHold(p.bindings[0], it->event)) continue;
                    if (!counted && p.groupBy.empty()) {
                        emit(step, render(p, {{alias, it->event}}, 0, end, options.sourceId));
                        continue;
                    }
                    std::vector<FieldValue> key;
                    for (const auto& g : p.groupBy) key.push_back(valueAt(it->event, g.field));
                    auto g = std::find_if(groups.begin(), groups.end(), [&](const auto& x) { return x.first == key; });
                    if (g == groups.end()) {
                        groups.push_back({key, {it->event, 0}});
                        g = groups.end() - 1;
                    }
                    g->second.first = it->event;
                    if (counted && !valueAt(it->event, counted->path.field).isNull()) ++g->second.second;
                }
                for (const auto& [key, state] : groups) {
                    emit(step, render(p, {{alias, state.first}}, state.second, end, options.sourceId));
                }
            }
        } else {
            const int64_t len = p.window ? p.window->toMillis() : 0;
            std::vector<Slots> partials;
            std::vector<std::vector<FieldValue>> seen;
            std::optional<int64_t> currentBatch;

            auto correlationsHold = [&](const Slots& s) {
                for (const auto& b : p.bindings) {
                    for (const auto& pred : b.predicates) {
                        if (!pred.isCorrelation()) continue;
                        const auto& rhs = std::get<pattern::FieldPath>(pred.rhs);
                        if (!s.count(pred.lhs.alias) || !s.count(rhs.alias)) continue;
                        if (!test(valueAt(s.at(pred.lhs.alias), pred.lhs.field), pred.op,
                                  valueAt(s.at(rhs.alias), rhs.field))) {
                            return false;
                        }
                    }
                }
                return true;
            };

            for (const auto& it : in) {
                if (len) {
                    const int64_t k = batchOf(it.key.time, options.startMs, len);
                    if (currentBatch != k) {
                        partials.clear();
                        seen.clear();
                        currentBatch = k;
                    }
                }
                std::vector<std::string> eligible;
                for (const auto& b : p.bindings) {
                    if (b.stream == it.event.stream && literalsHold(b, it.event)) eligible.push_back(b.alias);
                }
                if (eligible.empty()) continue;

                std::optional<size_t> chosen;
                for (size_t m = 0; m < partials.size() && !chosen; ++m) {
                    for (const auto& alias : eligible) {
                        if (partials[m].count(alias)) continue;
                        Slots trial = partials[m];
                        trial.emplace(alias, it.event);
                        if (correlationsHold(trial)) {
                            partials[m] = std::move(trial);
                            chosen = m;
                            break;
                        }
                    }
                }
                if (!chosen) {
                    partials.push_back({{eligible.front(), it.event}});
                    continue;
                }
                if (partials[*chosen].size() < p.bindings.size()) continue;

                Slots match = std::move(partials[*chosen]);
                partials.erase(partials.begin() + static_cast<std::ptrdiff_t>(*chosen));
                if (len) {
                    std::vector<FieldValue> key;
                    for (const auto& b : p.bindings) {
                        for (const auto& pred : b.predicates) {
                            if (!pred.isCorrelation()) continue;
                            const auto& rhs = std::get<pattern::FieldPath>(pred.rhs);
                            key.push_back(valueAt(match.at(pred.lhs.alias), pred.lhs.field));
                            key.push_back(valueAt(match.at(rhs.alias), rhs.field));
                        }
                    }
                    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                    seen.push_back(std::move(key));
                }
                emit(it.key, render(p, match, 0, it.key.time, options.sourceId));
            }
        }
        for (auto& o : out) produced.push_back(std::move(o));
    }

    std::stable_sort(produced.begin(), produced.end(), [](const Item& a, const Item& b) { return a.key < b.key; });
    std::vector<OracleEmission> result;
    for (auto& it : produced) {
        const auto& producer = patterns[order[static_cast<size_t>(it.key.rank)]];
        result.push_back({std::move(it.event), producer.name});
    }
    return result;
}

}// namespace atmosphere::oracle
