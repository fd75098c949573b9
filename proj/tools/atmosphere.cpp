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
#include <atmosphere/event/EventCodec.hpp>
#include <atmosphere/harness/Runner.hpp>
#include <atmosphere/oracle/OracleReplay.hpp>
#include <atmosphere/pattern/Parser.hpp>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>

using namespace atmosphere;
using harness::Json;

namespace {

struct Overrides {
    std::optional<double> rate;
    std::optional<double> duration;
    std::optional<double> warmup;
    std::optional<int> qos;
    std::optional<std::string> mode;
    std::optional<std::string> clock;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> transport;

    void attach(CLI::App* app) {
        app->add_option("--rate", rate, "Events per second of the load simulators");
        app->add_option("--qos", qos, "MQTT quality of service")->check(CLI::IsMember({0, 1}));
        app->add_option("--duration", duration, "Run length in seconds");
        app->add_option("--warmup", warmup, "Seconds excluded from the latency summary");
        app->add_option("--mode", mode, "full, cep-only or agents-only")->check(CLI::IsMember({"full", "cep-only", "agents-only"}));
        app->add_option("--clock", clock, "event or processing")
            ->check(CLI::IsMember({"event", "processing", "event_time", "processing_time"}));
        app->add_option("--seed", seed, "Seed for simulators and link loss");
        app->add_option("--transport", transport, "sim or tcp (in-process runs)")->check(CLI::IsMember({"sim", "tcp"}));
    }

    harness::RunOptions options() const {
        harness::RunOptions o;
        o.rate = rate;
        o.durationS = duration;
        o.warmupS = warmup;
        o.qos = qos;
        o.seed = seed;
        if (mode) {
            o.mode = *mode == "full" ? runtime::RunMode::Full
                     : *mode == "cep-only" ? runtime::RunMode::CepOnly
                                           : runtime::RunMode::AgentsOnly;
        }
        if (clock) o.clock = clock->rfind("event", 0) == 0 ? cep::ClockMode::EventTime : cep::ClockMode::ProcessingTime;
        if (transport) o.transport = *transport == "tcp" ? harness::Transport::Tcp : harness::Transport::Sim;
        return o;
    }
};

std::vector<event::Event> readLog(const std::string& path, const event::SchemaRegistry& schemas) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read log '" + path + "'");
    std::vector<event::Event> log;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            log.push_back(event::decodeEvent(line, schemas));
        } catch (const AtmosphereError& e) {
            throw ConfigError(path + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return log;
}

int runOracle(const harness::ScenarioConfig& config, const std::string& logPath, const std::string& node, bool compare) {
    std::vector<pattern::PatternDef> patterns;
    if (node.empty()) {
        patterns = config.allPatterns();
    } else {
        const auto* n = config.node(node);
        if (!n) throw ConfigError("unknown node '" + node + "'");
        if (const auto* f = std::get_if<runtime::FogNodeConfig>(&n->config)) patterns = f->patterns;
        if (const auto* c = std::get_if<runtime::CloudNodeConfig>(&n->config)) patterns = c->patterns;
    }
    const auto log = readLog(logPath, config.schemas);
    std::int64_t horizon = config.run.startMs;
    for (const auto& e : log) horizon = std::max(horizon, e.timestamp);
    horizon += 48LL * 3'600'000;
    oracle::ReplayOptions options;
    options.startMs = config.run.startMs;
    const auto expected = oracle::oracleReplay(patterns, config.schemas, log, horizon, options);
    for (const auto& e : expected) {
        Json line{{"pattern", e.producedBy}, {"event", Json::parse(event::encodeEvent(e.event, config.schemas))}};
        std::cout << line.dump() << '\n';
    }
    if (!compare) return 0;
    cep::Engine engine(config.schemas, {cep::ClockMode::EventTime, config.run.startMs, options.sourceId, nullptr});
    engine.deployAll(patterns);
    std::vector<oracle::OracleEmission> actual;
    auto collect = [&](const std::vector<cep::Emission>& out) {
        for (const auto& em : out) actual.push_back({em.event, em.producedBy});
    };
    for (const auto& e : log) collect(engine.ingest(e));
    collect(engine.advanceClock(horizon));
    const bool same = actual == expected;
    std::cerr << (same ? "engine matches oracle" : "engine differs from oracle") << " (" << expected.size() << " emissions)\n";
    return same ? 0 : 1;
}

}// namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge/fog/cloud event processing runtime and benchmark harness"};
    app.require_subcommand(1);
    spdlog::set_level(spdlog::level::warn);

    std::string scenario;
    Overrides overrides;
    std::string out = "out";
    bool processes = false;
    std::uint16_t basePort = 0;
    auto* run = app.add_subcommand("run", "Run a scenario and write a report");
    run->add_option("--scenario", scenario, "Scenario file")->required();
    run->add_option("--out", out, "Report directory");
    run->add_flag("--processes", processes, "One child process per node (processing time only)");
    run->add_option("--base-port", basePort, "First TCP port with --processes");
    overrides.attach(run);

    auto* validate = app.add_subcommand("validate", "Load and validate a scenario");
    validate->add_option("--scenario", scenario, "Scenario file")->required();

    std::string logPath;
    std::string oracleNode;
    bool compare = false;
    auto* oracleCmd = app.add_subcommand("oracle", "Replay an event log through the reference evaluator");
    oracleCmd->add_option("--scenario", scenario, "Scenario file")->required();
    oracleCmd->add_option("--log", logPath, "Encoded events, one per line")->required();
    oracleCmd->add_option("--node", oracleNode, "Only the patterns of this node");
    oracleCmd->add_flag("--compare", compare, "Also replay through the engine and compare");

    harness::NodeProcessOptions nodeOptions;
    auto* node = app.add_subcommand("node", "Host one node of a multi-process run");
    node->group("");
    node->add_option("--scenario", scenario)->required();
    node->add_option("--node", nodeOptions.node)->required();
    node->add_option("--base-port", nodeOptions.basePort)->required();
    node->add_option("--start-at", nodeOptions.startAtMs)->required();
    node->add_option("--out", nodeOptions.outDir)->required();
    overrides.attach(node);

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = harness::loadScenario(scenario);
        if (*validate) {
            std::cout << "ok: " << config.name << ", " << config.nodes.size() << " nodes, " << config.allPatterns().size()
                      << " patterns, " << config.simulators.size() << " simulators\n";
            return 0;
        }
        if (*oracleCmd) return runOracle(config, logPath, oracleNode, compare);
        auto options = overrides.options();
        harness::applyOverrides(config, options);
        if (*node) return harness::runNodeProcess(config, nodeOptions);

        options.outDir = out;
        options.processes = processes;
        options.basePort = basePort;
        const auto report = processes ? harness::runProcesses(config, options) : harness::runScenario(config);
        harness::writeReport(report, out);
        const auto summary = report.summary();
        std::cout << "round trips " << report.roundTrips.completed << "/" << report.roundTrips.initiated << ", mean latency "
                  << summary["latency"]["mean_ms"].get<double>() << " ms, counters " << report.counters.dump() << '\n';
        if (!report.error.empty()) {
            std::cerr << "error: " << report.error << '\n';
            return 1;
        }
        if (report.saturated) {
            std::cerr << "saturated: run aborted, partial report in " << out << '\n';
            return 3;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
