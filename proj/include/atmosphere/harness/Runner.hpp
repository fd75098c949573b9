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


#ifndef ATMOSPHERE_HARNESS_RUNNER_HPP_
#define ATMOSPHERE_HARNESS_RUNNER_HPP_

#include <atmosphere/harness/Report.hpp>
#include <atmosphere/harness/ScenarioConfig.hpp>
#include <atmosphere/harness/Simulator.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace atmosphere::harness {

class RunError : public AtmosphereError {
  public:
    using AtmosphereError::AtmosphereError;
};

/// Command-line overrides of the scenario's run section.
struct RunOptions {
    std::optional<double> rate;
    std::optional<double> durationS;
    std::optional<double> warmupS;
    std::optional<int> qos;
    std::optional<runtime::RunMode> mode;
    std::optional<cep::ClockMode> clock;
    std::optional<std::uint64_t> seed;
    std::optional<Transport> transport;
    std::string outDir;
    bool processes = false;
    std::uint16_t basePort = 0;// 0 picks one
    std::string executable;    // binary started for each node with --processes

    /// The overrides as `run` command-line flags, for child processes.
    std::vector<std::string> flags() const;
};

/// Applies the overrides; `rate` only touches load simulators.
void applyOverrides(ScenarioConfig& config, const RunOptions& options);

/// Rate of the load simulators, 0 if there are none.
double loadRate(const ScenarioConfig& config);

/// The nodes of a scenario (or a subset of them) living on one loop.
class Deployment {
  public:
    Deployment(const ScenarioConfig& config, runtime::EventLoop& loop, runtime::Network& network,
               std::set<std::string> hosted = {});
    ~Deployment();
    Deployment(const Deployment&) = delete;
    Deployment& operator=(const Deployment&) = delete;

    void start();
    bool ready() const;
    /// Schedules the timeline and the simulators relative to `originUs`.
    void begin(std::int64_t originUs);
    void stopSimulators();
    /// Every simulator has emitted its full count.
    bool simulatorsDone() const;
    /// No pending round trip and no unacknowledged qos 1 message on hosted nodes.
    bool quiescent() const;
    void stop();

    std::size_t queuedBytes() const;
    RoundTrips roundTrips() const;
    std::vector<std::string> pendingIds() const;
    /// Copies records, counters and logs into `report`.
    void fill(RunReport& report) const;

    runtime::RunCounters& counters() { return runCounters; }
    runtime::Journal& journal() { return runJournal; }
    runtime::FogNode* fog(const std::string& id);
    runtime::CloudNode* cloud(const std::string& id);
    runtime::EdgeNode* edge(const std::string& id);
    runtime::UserNode* user(const std::string& id);

  private:
    struct Sim;
    bool hosts(const std::string& id) const;
    void fire(Sim& sim);
    void perform(const TimelineEntry& entry);

    const ScenarioConfig& config;
    runtime::EventLoop& loop;
    std::set<std::string> hosted;
    runtime::RunCounters runCounters;
    runtime::Journal runJournal;
    runtime::NodeContext context;
    std::map<std::string, std::unique_ptr<runtime::FogNode>> fogs;
    std::map<std::string, std::unique_ptr<runtime::CloudNode>> clouds;
    std::map<std::string, std::unique_ptr<runtime::EdgeNode>> edges;
    std::map<std::string, std::unique_ptr<runtime::UserNode>> users;
    std::vector<std::unique_ptr<Sim>> sims;
    std::vector<runtime::TimerId> scheduled;
    bool stopped = false;
};

/// Runs every node on one loop. Event time runs on virtual time and is deterministic for a seed.
RunReport runScenario(const ScenarioConfig& config);

/// Endpoint -> port for a multi-process run.
std::map<std::string, std::uint16_t> portMap(const ScenarioConfig& config, std::uint16_t basePort);

/// Starts one child process per node and merges their results.
RunReport runProcesses(const ScenarioConfig& config, const RunOptions& options);

struct NodeProcessOptions {
    std::string node;
    std::uint16_t basePort = 0;
    std::int64_t startAtMs = 0;// wall clock
    std::string outDir;
};

/// Body of a child process: hosts one node until SIGTERM and writes `<out>/node-<id>.json`.
int runNodeProcess(const ScenarioConfig& config, const NodeProcessOptions& options);

}// namespace atmosphere::harness

#endif// ATMOSPHERE_HARNESS_RUNNER_HPP_
