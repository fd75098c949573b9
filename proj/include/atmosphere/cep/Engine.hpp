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

#ifndef ATMOSPHERE_CEP_ENGINE_HPP_
#define ATMOSPHERE_CEP_ENGINE_HPP_

#include <atmosphere/common/Errors.hpp>
#include <atmosphere/event/Event.hpp>
#include <atmosphere/event/Schema.hpp>
#include <atmosphere/pattern/PatternDef.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace atmosphere::cep {

enum class ClockMode { EventTime, ProcessingTime };

class DeployError : public AtmosphereError {
  public:
    enum class Kind { Cycle, UnknownStream, DuplicateName, Invalid };
    DeployError(Kind kind, const std::string& message) : AtmosphereError(message), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

class TimeRegressionError : public AtmosphereError {
  public:
    using AtmosphereError::AtmosphereError;
};

struct Emission {
    event::Event event;
    std::string producedBy;
    std::optional<std::string> target;
    bool operator==(const Emission&) const = default;
};

struct EngineOptions {
    ClockMode mode = ClockMode::EventTime;
    int64_t startMs = 0;
    std::string sourceId = "cep";
    /// Wall clock in milliseconds; required for ProcessingTime.
    std::function<int64_t()> now;
};

/**
 * Returns the names of patterns forming a cycle in the stream graph of the
 * given deployment, or an empty vector when the graph is acyclic.
 */
std::vector<std::string> findCycle(const std::vector<pattern::PatternDef>& patterns);

/**
 * Single-threaded CEP engine. Windows are tumbling and aligned to the start
 * time; boundary emissions carry the boundary instant as their timestamp.
 */
class Engine {
  public:
    Engine(event::SchemaRegistry registry, EngineOptions options = {});
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    void deploy(const pattern::PatternDef& pattern);
    /// Deploys a set of patterns in dependency order regardless of list order.
    void deployAll(const std::vector<pattern::PatternDef>& patterns);

    std::vector<Emission> ingest(const event::Event& event);
    std::vector<Emission> advanceClock(int64_t toMs);

    int64_t now() const { return clock_; }
    ClockMode mode() const { return options_.mode; }
    std::optional<int64_t> nextBoundary() const;

    /// Pattern names in evaluation order.
    std::vector<std::string> topologicalOrder() const;
    /// Names of patterns that read the given stream.
    std::vector<std::string> consumersOf(const std::string& stream) const;
    const pattern::PatternDef* pattern(const std::string& name) const;
    const event::SchemaRegistry& schemas() const { return registry_; }

    uint64_t ingestCount() const { return ingested_; }
    uint64_t emissionCount() const { return emitted_; }

  private:
    struct Compiled;

    void rebuildOrder();
    std::vector<Emission> fireUntil(int64_t target);
    std::vector<Emission> runStep(std::vector<std::vector<event::Event>> pending, const event::Event* raw);
    event::Event makeOutput(const pattern::PatternDef& p) const;

    event::SchemaRegistry registry_;
    EngineOptions options_;
    int64_t clock_;
    std::vector<std::unique_ptr<Compiled>> patterns_;// deployment order
    std::vector<Compiled*> order_;                   // topological order
    std::map<std::string, std::vector<size_t>> readers_;// stream -> ranks
    uint64_t ingested_ = 0;
    uint64_t emitted_ = 0;
};

}// namespace atmosphere::cep

#endif// ATMOSPHERE_CEP_ENGINE_HPP_
