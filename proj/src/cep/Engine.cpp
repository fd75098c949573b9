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

#include <atmosphere/cep/Engine.hpp>
#include <atmosphere/cep/SchemaInference.hpp>

#include <algorithm>
#include <list>
#include <set>

namespace atmosphere::cep {

using event::Event;
using event::FieldValue;
using pattern::PatternDef;

namespace {

int64_t floorDiv(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

bool holds(const FieldValue& lhs, pattern::CompareOp op, const FieldValue& rhs) {
    if (lhs.isNull() || rhs.isNull()) {
        return false;
    }
    const auto ord = event::compareValues(lhs, rhs);
    switch (op) {
        case pattern::CompareOp::Eq: return ord == 0;
        case pattern::CompareOp::Ne: return ord != 0;
        case pattern::CompareOp::Lt: return ord < 0;
        case pattern::CompareOp::Le: return ord <= 0;
        case pattern::CompareOp::Gt: return ord > 0;
        case pattern::CompareOp::Ge: return ord >= 0;
    }
    return false;
}

const FieldValue& fieldOf(const Event& e, const std::string& name) {
    static const FieldValue null;
    const auto* v = e.find(name);
    return v ? *v : null;
}

void appendKey(std::string& key, const FieldValue& v) {
    key += std::to_string(static_cast<int>(v.type()));
    key += ':';
    key += event::toDisplayString(v);
    key += '\x1f';
}

std::vector<std::vector<size_t>> dependents(const std::vector<const PatternDef*>& defs) {
    std::vector<std::vector<size_t>> out(defs.size());
    for (size_t p = 0; p < defs.size(); ++p) {
        for (size_t q = 0; q < defs.size(); ++q) {
            for (const auto& b : defs[q]->bindings) {
                if (b.stream == defs[p]->insertInto) {
                    out[p].push_back(q);
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<std::string> cycleIn(const std::vector<const PatternDef*>& defs) {
    const auto next = dependents(defs);
    std::vector<int> colour(defs.size(), 0);
    std::vector<size_t> stack;
    std::vector<std::string> found;
    std::function<bool(size_t)> visit = [&](size_t n) {
        colour[n] = 1;
        stack.push_back(n);
        for (size_t m : next[n]) {
            if (colour[m] == 1) {
                auto it = std::find(stack.begin(), stack.end(), m);
                for (; it != stack.end(); ++it) found.push_back(defs[*it]->name);
                return true;
            }
            if (colour[m] == 0 && visit(m)) return true;
        }
        colour[n] = 2;
        stack.pop_back();
        return false;
    };
    for (size_t n = 0; n < defs.size(); ++n) {
        if (colour[n] == 0 && visit(n)) break;
    }
    return found;
}

}// namespace

std::vector<std::string> findCycle(const std::vector<PatternDef>& patterns) {
    std::vector<const PatternDef*> defs;
    for (const auto& p : patterns) defs.push_back(&p);
    return cycleIn(defs);
}

struct Engine::Compiled {
    PatternDef def;
    std::optional<std::string> target;
    int64_t windowMs = 0;
    bool perEventRows = false;
    std::optional<std::string> countField;

    std::optional<int64_t> batch;

    struct Group {
        Event last;
        int64_t count = 0;
    };
    std::vector<Group> groups;
    std::map<std::string, size_t> groupIndex;
    std::vector<Event> rows;

    using Partial = std::vector<std::optional<Event>>;
    std::list<Partial> partials;
    std::set<std::string> completed;

    bool windowed() const { return windowMs > 0; }
    bool empty() const { return groups.empty() && rows.empty() && partials.empty() && completed.empty(); }
    void reset() {
        groups.clear();
        groupIndex.clear();
        rows.clear();
        partials.clear();
        completed.clear();
        batch.reset();
    }
    size_t slotOf(const std::string& alias) const {
        for (size_t i = 0; i < def.bindings.size(); ++i) {
            if (def.bindings[i].alias == alias) return i;
        }
        return 0;
    }
};

Engine::Engine(event::SchemaRegistry registry, EngineOptions options)
    : registry_(std::move(registry)), options_(std::move(options)), clock_(options_.startMs) {
    if (options_.mode == ClockMode::ProcessingTime && !options_.now) {
        throw ConfigError("processing_time engine needs a clock source");
    }
}

Engine::~Engine() = default;

void Engine::deploy(const PatternDef& p) {
    pattern::validatePattern(p);
    for (const auto& c : patterns_) {
        if (c->def.name == p.name) {
            throw DeployError(DeployError::Kind::DuplicateName, "pattern '" + p.name + "' is already deployed");
        }
    }
    std::vector<const PatternDef*> defs;
    for (const auto& c : patterns_) defs.push_back(&c->def);
    defs.push_back(&p);
    if (auto cycle = cycleIn(defs); !cycle.empty()) {
        std::string path;
        for (const auto& n : cycle) path += n + " -> ";
        throw DeployError(DeployError::Kind::Cycle, "deploying '" + p.name + "' creates a cycle: " + path + cycle.front());
    }
    for (const auto& b : p.bindings) {
        if (!registry_.contains(b.stream)) {
            throw DeployError(DeployError::Kind::UnknownStream,
                              "pattern '" + p.name + "' reads unknown stream '" + b.stream + "'");
        }
    }
    auto schema = inferOutputSchema(p, registry_);
    try {
        registry_.add(schema);
    } catch (const ConfigError& e) {
        throw DeployError(DeployError::Kind::Invalid, "pattern '" + p.name + "': " + e.what());
    }

    auto c = std::make_unique<Compiled>();
    c->def = p;
    c->target = p.target();
    if (p.window) {
        c->windowMs = p.window->toMillis();
    }
    for (const auto& item : p.select) {
        if (const auto* count = std::get_if<pattern::select::Count>(&item)) {
            c->countField = count->path.field;
        }
    }
    c->perEventRows = c->windowed() && !p.isConjunction() && !c->countField && p.groupBy.empty();
    patterns_.push_back(std::move(c));
    rebuildOrder();
}

void Engine::deployAll(const std::vector<PatternDef>& patterns) {
    if (auto cycle = findCycle(patterns); !cycle.empty()) {
        throw DeployError(DeployError::Kind::Cycle, "patterns form a cycle starting at '" + cycle.front() + "'");
    }
    std::vector<const PatternDef*> remaining;
    for (const auto& p : patterns) remaining.push_back(&p);
    while (!remaining.empty()) {
        auto ready = std::find_if(remaining.begin(), remaining.end(), [&](const PatternDef* p) {
            return std::all_of(p->bindings.begin(), p->bindings.end(),
                               [&](const auto& b) { return registry_.contains(b.stream); });
        });
        if (ready == remaining.end()) {
            deploy(*remaining.front());// reports the unknown stream
        }
        deploy(**ready);
        remaining.erase(ready);
    }
}

void Engine::rebuildOrder() {
    std::vector<const PatternDef*> defs;
    for (const auto& c : patterns_) defs.push_back(&c->def);
    const auto next = dependents(defs);
    std::vector<int> indegree(defs.size(), 0);
    for (const auto& edges : next) {
        for (size_t q : edges) ++indegree[q];
    }
    std::set<size_t> ready;
    for (size_t n = 0; n < defs.size(); ++n) {
        if (indegree[n] == 0) ready.insert(n);
    }
    order_.clear();
    while (!ready.empty()) {
        const size_t n = *ready.begin();
        ready.erase(ready.begin());
        order_.push_back(patterns_[n].get());
        for (size_t q : next[n]) {
            if (--indegree[q] == 0) ready.insert(q);
        }
    }
    readers_.clear();
    for (size_t r = 0; r < order_.size(); ++r) {
        for (const auto& b : order_[r]->def.bindings) {
            auto& list = readers_[b.stream];
            if (list.empty() || list.back() != r) list.push_back(r);
        }
    }
}

std::optional<int64_t> Engine::nextBoundary() const {
    std::optional<int64_t> best;
    for (const auto* c : order_) {
        if (!c->windowed() || c->empty() || !c->batch) continue;
        const int64_t end = options_.startMs + (*c->batch + 1) * c->windowMs;
        if (!best || end < *best) best = end;
    }
    return best;
}

Event Engine::makeOutput(const PatternDef& p) const {
    Event out;
    out.stream = p.insertInto;
    out.timestamp = clock_;
    out.source = options_.sourceId;
    return out;
}

namespace {

template<typename SlotFn>
void fillRow(Event& out, const PatternDef& p, SlotFn slot, int64_t count, int64_t clock) {
    for (const auto& item : p.select) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, pattern::select::FieldRef>) {
                    out.fields.emplace_back(s.as, fieldOf(slot(s.path.alias), s.path.field));
                } else if constexpr (std::is_same_v<T, pattern::select::CurrentTimestamp>) {
                    out.fields.emplace_back(s.as, FieldValue(clock));
                } else if constexpr (std::is_same_v<T, pattern::select::Count>) {
                    out.fields.emplace_back(s.as, FieldValue(count));
                } else {
                    for (const auto& f : slot(s.alias).fields) out.fields.push_back(f);
                }
            },
            item);
    }
}

}// namespace

std::vector<Emission> Engine::runStep(std::vector<std::vector<Event>> closed, const Event* raw) {
    std::vector<Emission> out;
    std::vector<std::vector<Event>> inbox(order_.size());
    closed.resize(order_.size());
    if (raw) {
        if (auto it = readers_.find(raw->stream); it != readers_.end()) {
            for (size_t r : it->second) inbox[r].push_back(*raw);
        }
    }
    for (size_t r = 0; r < order_.size(); ++r) {
        Compiled& c = *order_[r];
        const PatternDef& p = c.def;
        std::vector<Event> produced = std::move(closed[r]);

        for (const Event& e : inbox[r]) {
            if (c.windowed()) {
                const int64_t index = floorDiv(clock_ - options_.startMs, c.windowMs);
                if (c.batch != index) {
                    c.reset();
                    c.batch = index;
                }
            }
            if (!p.isConjunction()) {
                const auto& b = p.bindings.front();
                bool pass = true;
                for (const auto& pred : b.predicates) {
                    pass = pass && holds(fieldOf(e, pred.lhs.field), pred.op, std::get<FieldValue>(pred.rhs));
                }
                if (!pass) continue;
                if (!c.windowed()) {
                    Event row = makeOutput(p);
                    fillRow(row, p, [&](const std::string&) -> const Event& { return e; }, 0, clock_);
                    produced.push_back(std::move(row));
                } else if (c.perEventRows) {
                    c.rows.push_back(e);
                } else {
                    std::string key;
                    for (const auto& path : p.groupBy) appendKey(key, fieldOf(e, path.field));
                    auto [it, inserted] = c.groupIndex.emplace(key, c.groups.size());
                    if (inserted) c.groups.push_back({e, 0});
                    auto& g = c.groups[it->second];
                    g.last = e;
                    if (c.countField && !fieldOf(e, *c.countField).isNull()) ++g.count;
                }
                continue;
            }

            // Conjunction: try to extend the oldest compatible partial match.
            const size_t slots = p.bindings.size();
            std::vector<size_t> candidates;
            for (size_t i = 0; i < slots; ++i) {
                const auto& b = p.bindings[i];
                if (b.stream != e.stream) continue;
                bool pass = true;
                for (const auto& pred : b.predicates) {
                    if (!pred.isCorrelation()) {
                        pass = pass && holds(fieldOf(e, pred.lhs.field), pred.op, std::get<FieldValue>(pred.rhs));
                    }
                }
                if (pass) candidates.push_back(i);
            }
            if (candidates.empty()) continue;

            auto consistent = [&](const Compiled::Partial& partial, size_t i) {
                for (size_t j = 0; j < slots; ++j) {
                    for (const auto& pred : p.bindings[j].predicates) {
                        if (!pred.isCorrelation()) continue;
                        const auto& rhs = std::get<pattern::FieldPath>(pred.rhs);
                        const size_t m = c.slotOf(rhs.alias);
                        if (j != i && m != i) continue;
                        const Event* left = j == i ? &e : (partial[j] ? &*partial[j] : nullptr);
                        const Event* right = m == i ? &e : (partial[m] ? &*partial[m] : nullptr);
                        if (!left || !right) continue;
                        if (!holds(fieldOf(*left, pred.lhs.field), pred.op, fieldOf(*right, rhs.field))) return false;
                    }
                }
                return true;
            };

            bool placed = false;
            for (auto it = c.partials.begin(); it != c.partials.end() && !placed;) {
                auto current = it++;
                for (size_t i : candidates) {
                    if ((*current)[i] || !consistent(*current, i)) continue;
                    (*current)[i] = e;
                    placed = true;
                    const bool complete =
                        std::all_of(current->begin(), current->end(), [](const auto& s) { return s.has_value(); });
                    if (complete) {
                        Compiled::Partial match = std::move(*current);
                        c.partials.erase(current);
                        auto slot = [&](const std::string& alias) -> const Event& { return *match[c.slotOf(alias)]; };
                        bool fresh = true;
                        if (c.windowed()) {
                            std::string key;
                            for (const auto& b : p.bindings) {
                                for (const auto& pred : b.predicates) {
                                    if (!pred.isCorrelation()) continue;
                                    const auto& rhs = std::get<pattern::FieldPath>(pred.rhs);
                                    appendKey(key, fieldOf(slot(pred.lhs.alias), pred.lhs.field));
                                    appendKey(key, fieldOf(slot(rhs.alias), rhs.field));
                                }
                            }
                            fresh = c.completed.insert(key).second;
                        }
                        if (fresh) {
                            Event row = makeOutput(p);
                            fillRow(row, p, slot, 0, clock_);
                            produced.push_back(std::move(row));
                        }
                    }
                    break;
                }
            }
            if (!placed) {
                Compiled::Partial partial(slots);
                partial[candidates.front()] = e;
                c.partials.push_back(std::move(partial));
            }
        }

        for (auto& ev : produced) {
            if (auto it = readers_.find(ev.stream); it != readers_.end()) {
                for (size_t q : it->second) inbox[q].push_back(ev);
            }
            out.push_back(Emission{std::move(ev), p.name, c.target});
        }
    }
    emitted_ += out.size();
    return out;
}

std::vector<Emission> Engine::fireUntil(int64_t target) {
    std::vector<Emission> out;
    while (true) {
        const auto boundary = nextBoundary();
        if (!boundary || *boundary > target) break;
        clock_ = std::max(clock_, *boundary);
        std::vector<std::vector<Event>> closed(order_.size());
        for (size_t r = 0; r < order_.size(); ++r) {
            Compiled& c = *order_[r];
            if (!c.windowed() || c.empty() || !c.batch) continue;
            if (options_.startMs + (*c.batch + 1) * c.windowMs != *boundary) continue;
            const PatternDef& p = c.def;
            if (c.perEventRows) {
                for (const auto& e : c.rows) {
                    Event row = makeOutput(p);
                    fillRow(row, p, [&](const std::string&) -> const Event& { return e; }, 0, clock_);
                    closed[r].push_back(std::move(row));
                }
            } else {
                for (const auto& g : c.groups) {
                    Event row = makeOutput(p);
                    fillRow(row, p, [&](const std::string&) -> const Event& { return g.last; }, g.count, clock_);
                    closed[r].push_back(std::move(row));
                }
            }
            c.reset();
        }
        auto step = runStep(std::move(closed), nullptr);
        out.insert(out.end(), std::make_move_iterator(step.begin()), std::make_move_iterator(step.end()));
    }
    clock_ = std::max(clock_, target);
    return out;
}

std::vector<Emission> Engine::ingest(const Event& e) {
    const auto* schema = registry_.find(e.stream);
    if (!schema) {
        throw UnknownStreamError(e.stream);
    }
    event::validate(e, registry_);
    const Event canonical = event::canonicalize(e, *schema);

    int64_t target;
    if (options_.mode == ClockMode::EventTime) {
        if (e.timestamp < clock_) {
            throw TimeRegressionError("event at " + std::to_string(e.timestamp) + " ms precedes engine clock "
                                      + std::to_string(clock_) + " ms");
        }
        target = e.timestamp;
    } else {
        target = std::max(clock_, options_.now());
    }
    auto out = fireUntil(target);
    ++ingested_;
    auto step = runStep({}, &canonical);
    out.insert(out.end(), std::make_move_iterator(step.begin()), std::make_move_iterator(step.end()));
    return out;
}

std::vector<Emission> Engine::advanceClock(int64_t toMs) {
    if (toMs < clock_) {
        throw TimeRegressionError("cannot move engine clock back from " + std::to_string(clock_) + " to "
                                  + std::to_string(toMs) + " ms");
    }
    return fireUntil(toMs);
}

std::vector<std::string> Engine::topologicalOrder() const {
    std::vector<std::string> names;
    for (const auto* c : order_) names.push_back(c->def.name);
    return names;
}

std::vector<std::string> Engine::consumersOf(const std::string& stream) const {
    std::vector<std::string> names;
    if (auto it = readers_.find(stream); it != readers_.end()) {
        for (size_t r : it->second) names.push_back(order_[r]->def.name);
    }
    return names;
}

const PatternDef* Engine::pattern(const std::string& name) const {
    for (const auto& c : patterns_) {
        if (c->def.name == name) return &c->def;
    }
    return nullptr;
}

}// namespace atmosphere::cep
