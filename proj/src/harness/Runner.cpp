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


#include <atmosphere/agent/Rule.hpp>
#include <atmosphere/harness/Runner.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

namespace atmosphere::harness {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using runtime::AsioLoop;
using runtime::EventLoop;
using runtime::SimLoop;

namespace {

constexpr std::int64_t kSampleUs = 500'000;
constexpr std::size_t kHighWaterBytes = 4u << 20;
constexpr std::int64_t kSaturationUs = 5'000'000;
constexpr auto kReadyTimeout = 10s;

std::int64_t wallMs() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

/// utime + stime of a process in clock ticks.
std::optional<std::uint64_t> cpuTicks(pid_t pid) {
    std::ifstream in("/proc/" + std::to_string(pid) + "/stat");
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    const auto close = line.rfind(')');
    if (close == std::string::npos) return std::nullopt;
    std::istringstream fields(line.substr(close + 2));
    std::string field;
    std::uint64_t utime = 0;
    std::uint64_t stime = 0;
    for (int i = 3; i <= 15 && fields >> field; ++i) {
        if (i == 14) utime = std::stoull(field);
        if (i == 15) stime = std::stoull(field);
    }
    return utime + stime;
}

class CpuMeter {
  public:
    CpuMeter(pid_t pid, std::string node) : pid(pid), node(std::move(node)) { sample(0); }

    std::optional<CpuSample> sample(std::int64_t nowMs) {
        const auto ticks = cpuTicks(pid);
        const auto wall = std::chrono::steady_clock::now();
        if (!ticks) return std::nullopt;
        std::optional<CpuSample> out;
        if (lastTicks) {
            const double seconds = std::chrono::duration<double>(wall - lastWall).count();
            const double used = static_cast<double>(*ticks - *lastTicks) / static_cast<double>(sysconf(_SC_CLK_TCK));
            if (seconds > 0) out = CpuSample{nowMs, node, 100.0 * used / seconds};
        }
        lastTicks = ticks;
        lastWall = wall;
        return out;
    }

  private:
    pid_t pid;
    std::string node;
    std::optional<std::uint64_t> lastTicks;
    std::chrono::steady_clock::time_point lastWall;
};

/// Periodic CPU sampling and send-queue saturation watch on a wall-clock loop.
class Monitor {
  public:
    Monitor(EventLoop& loop, Deployment& deployment, std::vector<CpuSample>& cpu, std::string label)
        : loop(loop), deployment(deployment), cpu(cpu), meter(getpid(), std::move(label)) {
        arm();
    }
    ~Monitor() { stop(); }

    void stop() {
        if (timer) loop.cancel(*timer);
        timer.reset();
    }

    bool saturated = false;

  private:
    void arm() {
        timer = loop.schedule(kSampleUs, [this] {
            timer.reset();
            if (auto s = meter.sample(loop.nowMs())) cpu.push_back(*s);
            if (deployment.queuedBytes() > kHighWaterBytes) {
                if (!overSince) overSince = loop.nowUs();
                if (loop.nowUs() - *overSince > kSaturationUs) saturated = true;
            } else {
                overSince.reset();
            }
            arm();
        });
    }

    EventLoop& loop;
    Deployment& deployment;
    std::vector<CpuSample>& cpu;
    CpuMeter meter;
    std::optional<runtime::TimerId> timer;
    std::optional<std::int64_t> overSince;
};

std::uint64_t countDeadLettered(const std::vector<std::string>& pending, const std::vector<Json>& deadLetters) {
    std::set<std::string> open(pending.begin(), pending.end());
    std::set<std::string> lost;
    for (const auto& d : deadLetters) {
        auto it = d.find("payload");
        if (it == d.end() || !it->is_string()) continue;
        Json payload = Json::parse(it->get<std::string>(), nullptr, false);
        if (!payload.is_object() || !payload.contains("seq")) continue;
        const auto& seq = payload["seq"];
        const auto key = seq.is_string() ? seq.get<std::string>() : seq.dump();
        if (open.count(key)) lost.insert(key);
    }
    return lost.size();
}

}// namespace

std::vector<std::string> RunOptions::flags() const {
    std::vector<std::string> out;
    auto number = [](double v) {
        std::ostringstream s;
        s << v;
        return s.str();
    };
    if (rate) out.insert(out.end(), {"--rate", number(*rate)});
    if (durationS) out.insert(out.end(), {"--duration", number(*durationS)});
    if (warmupS) out.insert(out.end(), {"--warmup", number(*warmupS)});
    if (qos) out.insert(out.end(), {"--qos", std::to_string(*qos)});
    if (mode) out.insert(out.end(), {"--mode", runtime::toString(*mode)});
    if (clock) out.insert(out.end(), {"--clock", *clock == cep::ClockMode::EventTime ? "event" : "processing"});
    if (seed) out.insert(out.end(), {"--seed", std::to_string(*seed)});
    return out;
}

void applyOverrides(ScenarioConfig& config, const RunOptions& options) {
    auto& run = config.run;
    if (options.durationS) run.durationS = *options.durationS;
    if (options.warmupS) run.warmupS = *options.warmupS;
    if (options.qos) run.qos = static_cast<std::uint8_t>(*options.qos);
    if (options.mode) run.mode = *options.mode;
    if (options.clock) run.clock = *options.clock;
    if (options.seed) run.seed = *options.seed;
    if (options.transport) run.transport = *options.transport;
    if (options.rate) {
        for (auto& s : config.simulators) {
            if (s.load) s.rate = *options.rate;
        }
    }
    if (run.durationS <= 0) throw ConfigError("/run/duration: must be positive");
    if (run.qos > 1) throw ConfigError("/run/qos: must be 0 or 1");
    for (const auto& s : config.simulators) {
        if (!(s.rate > 0)) throw ConfigError("--rate: must be positive");
    }
}

double loadRate(const ScenarioConfig& config) {
    double rate = 0;
    for (const auto& s : config.simulators) {
        if (s.load) rate += s.rate;
    }
    return rate;
}

struct Deployment::Sim {
    const SimulatorSpec* spec;
    FieldSampler sampler;
    std::int64_t originUs = 0;
    std::uint64_t total = 0;
    std::uint64_t emitted = 0;
    std::optional<runtime::TimerId> timer;
};

Deployment::Deployment(const ScenarioConfig& config, EventLoop& loop, runtime::Network& network, std::set<std::string> hosted)
    : config(config),
      loop(loop),
      hosted(std::move(hosted)),
      context{loop, network, runCounters, runJournal, config.schemas} {
    context.clock = config.run.clock;
    context.mode = config.run.mode;
    context.qos = config.run.qos;
    context.startMs = config.run.clock == cep::ClockMode::EventTime ? config.run.startMs : loop.nowMs();
    context.retry = {config.run.retryTimeoutMs, config.run.maxRetries};
}

Deployment::~Deployment() { stop(); }

bool Deployment::hosts(const std::string& id) const { return hosted.empty() || hosted.count(id) > 0; }

void Deployment::start() {
    for (Tier tier : {Tier::Cloud, Tier::Fog, Tier::Edge, Tier::User}) {
        for (const auto& n : config.nodes) {
            if (n.tier != tier || !hosts(n.id)) continue;
            switch (tier) {
                case Tier::Cloud:
                    clouds[n.id] = std::make_unique<runtime::CloudNode>(context, std::get<runtime::CloudNodeConfig>(n.config));
                    clouds[n.id]->start();
                    break;
                case Tier::Fog:
                    fogs[n.id] = std::make_unique<runtime::FogNode>(context, std::get<runtime::FogNodeConfig>(n.config));
                    fogs[n.id]->start();
                    break;
                case Tier::Edge:
                    edges[n.id] = std::make_unique<runtime::EdgeNode>(context, std::get<runtime::EdgeNodeConfig>(n.config));
                    edges[n.id]->start();
                    break;
                case Tier::User:
                    users[n.id] = std::make_unique<runtime::UserNode>(context, std::get<runtime::UserNodeConfig>(n.config));
                    users[n.id]->start();
                    break;
            }
        }
    }
}

bool Deployment::ready() const {
    auto all = [](const auto& nodes) {
        return std::all_of(nodes.begin(), nodes.end(), [](const auto& n) { return n.second->ready(); });
    };
    return all(clouds) && all(fogs) && all(edges) && all(users);
}

void Deployment::begin(std::int64_t originUs) {
    for (const auto& entry : config.timeline) {
        if (!hosts(entry.node)) continue;
        for (int r = 0; r < entry.repeat; ++r) {
            const auto due = originUs + (entry.atMs + r * entry.everyMs) * 1000;
            scheduled.push_back(loop.schedule(due - loop.nowUs(), [this, &entry] { perform(entry); }));
        }
    }
    for (const auto& spec : config.simulators) {
        if (!hosts(spec.target)) continue;
        auto sim = std::make_unique<Sim>(Sim{&spec, FieldSampler(spec, config.run.seed), originUs, 0, 0, std::nullopt});
        sim->total = static_cast<std::uint64_t>(std::llround(spec.rate * config.run.durationS));
        if (sim->total == 0) continue;
        auto* raw = sim.get();
        raw->timer = loop.schedule(originUs - loop.nowUs(), [this, raw] { fire(*raw); });
        sims.push_back(std::move(sim));
    }
}

void Deployment::fire(Sim& sim) {
    sim.timer.reset();
    auto* target = edge(sim.spec->target);
    if (!target) return;
    auto fields = sim.sampler.next();
    auto via = sim.spec->via;
    if (via == SimulatorSpec::Via::Mqtt && config.run.mode == runtime::RunMode::AgentsOnly) via = SimulatorSpec::Via::Acl;
    switch (via) {
        case SimulatorSpec::Via::Mqtt: target->publish(sim.spec->stream, fields); break;
        case SimulatorSpec::Via::Acl: target->request(sim.spec->stream, fields); break;
        case SimulatorSpec::Via::Sensor:
            target->sense(sim.spec->sensor, agent::scalarFrom(fields["value"], "/value"));
            break;
    }
    if (++sim.emitted >= sim.total) return;
    const auto due = sim.originUs + std::llround(static_cast<double>(sim.emitted) * 1e6 / sim.spec->rate);
    sim.timer = loop.schedule(due - loop.nowUs(), [this, &sim] { fire(sim); });
}

void Deployment::perform(const TimelineEntry& entry) {
    using Action = TimelineEntry::Action;
    switch (entry.action) {
        case Action::Sense:
            if (auto* e = edge(entry.node)) e->sense(entry.sensor, agent::scalarFrom(entry.value, "/sense/value"));
            break;
        case Action::Publish:
            if (auto* e = edge(entry.node)) e->publish(entry.stream, entry.payload);
            break;
        case Action::Request:
            if (auto* e = edge(entry.node)) e->request(entry.stream, entry.payload);
            break;
        case Action::Source:
            if (auto* c = cloud(entry.node)) {
                c->broker().publishLocal(runtime::cloudSourceTopic(entry.node, entry.source), entry.payload.dump(), config.run.qos);
            }
            break;
        case Action::UserPublish:
            if (auto* u = user(entry.node)) u->publish(entry.payload);
            break;
    }
}

void Deployment::stopSimulators() {
    for (auto& s : sims) {
        if (s->timer) loop.cancel(*s->timer);
        s->timer.reset();
    }
}

bool Deployment::simulatorsDone() const {
    return std::all_of(sims.begin(), sims.end(), [](const auto& s) { return s->emitted >= s->total; });
}

bool Deployment::quiescent() const {
    for (const auto& [id, e] : edges) {
        if (e->pendingRoundTrips() > 0 || e->inflight() > 0) return false;
    }
    for (const auto& [id, f] : fogs) {
        if (const_cast<runtime::FogNode&>(*f).broker().core().inflightCount() > 0) return false;
    }
    for (const auto& [id, c] : clouds) {
        if (const_cast<runtime::CloudNode&>(*c).broker().core().inflightCount() > 0) return false;
    }
    return true;
}

void Deployment::stop() {
    if (stopped) return;
    stopped = true;
    stopSimulators();
    for (auto id : scheduled) loop.cancel(id);
    scheduled.clear();
    for (auto& [id, u] : users) u->stop();
    for (auto& [id, e] : edges) e->stop();
    for (auto& [id, f] : fogs) f->stop();
    for (auto& [id, c] : clouds) c->stop();
}

std::size_t Deployment::queuedBytes() const {
    std::size_t total = 0;
    for (const auto& [id, f] : fogs) total += f->broker().queuedBytes();
    for (const auto& [id, c] : clouds) total += c->broker().queuedBytes();
    return total;
}

std::vector<std::string> Deployment::pendingIds() const {
    std::vector<std::string> pending;
    for (const auto& [id, e] : edges) {
        const auto ids = e->pendingIds();
        pending.insert(pending.end(), ids.begin(), ids.end());
    }
    return pending;
}

RoundTrips Deployment::roundTrips() const {
    RoundTrips rt;
    for (const auto& [id, e] : edges) {
        rt.initiated += e->initiated();
        rt.completed += e->completed();
    }
    const auto pending = pendingIds();
    rt.deadLettered = countDeadLettered(pending, runJournal.deadLetters());
    rt.inflight = pending.size() - rt.deadLettered;
    return rt;
}

runtime::FogNode* Deployment::fog(const std::string& id) {
    auto it = fogs.find(id);
    return it == fogs.end() ? nullptr : it->second.get();
}

runtime::CloudNode* Deployment::cloud(const std::string& id) {
    auto it = clouds.find(id);
    return it == clouds.end() ? nullptr : it->second.get();
}

runtime::EdgeNode* Deployment::edge(const std::string& id) {
    auto it = edges.find(id);
    return it == edges.end() ? nullptr : it->second.get();
}

runtime::UserNode* Deployment::user(const std::string& id) {
    auto it = users.find(id);
    return it == users.end() ? nullptr : it->second.get();
}

void Deployment::fill(RunReport& report) const {
    report.records = runJournal.latencies();
    report.counters = runCounters.toJson();
    report.alerts = runJournal.alerts();
    report.effects = runJournal.effects();
    report.emissions = runJournal.emissions();
    report.deadLetters = runJournal.deadLetters();
    report.roundTrips = roundTrips();
    for (const auto& [id, f] : fogs) {
        report.nodes[id] = {{"tier", "fog"},
                            {"cep_ingest", f->engine() ? f->engine()->ingestCount() : 0},
                            {"routed", f->routed()},
                            {"dead_lettered", f->deadLettered()},
                            {"clients", f->broker().clientCount()}};
    }
    for (const auto& [id, c] : clouds) {
        report.nodes[id] = {{"tier", "cloud"},
                            {"cep_ingest", c->engine() ? c->engine()->ingestCount() : 0},
                            {"dead_lettered", c->deadLettered()}};
    }
    for (const auto& [id, e] : edges) {
        Json actuators = Json::object();
        for (const auto& a : e->agents()) {
            for (const auto& [name, value] : a->actuators()) actuators[a->id()][name] = agent::scalarToJson(value);
        }
        report.nodes[id] = {{"tier", "edge"},
                            {"initiated", e->initiated()},
                            {"completed", e->completed()},
                            {"pending", e->pendingRoundTrips()},
                            {"abandoned", e->abandoned()},
                            {"actuators", actuators}};
    }
    for (const auto& [id, u] : users) report.nodes[id] = {{"tier", "user"}, {"received", u->received()}};
}

RunReport runScenario(const ScenarioConfig& config) {
    RunReport report;
    report.scenario = config.name;
    report.run = config.run;
    report.rate = loadRate(config);
    const auto& run = config.run;
    const auto durationUs = static_cast<std::int64_t>(run.durationS * 1e6);
    const auto drainUs = static_cast<std::int64_t>(run.drainTimeoutS * 1e6);

    if (run.clock == cep::ClockMode::EventTime) {
        SimLoop loop(run.startMs * 1000);
        runtime::SimNetwork network(loop, run.seed, {run.linkLatencyUs, 0.0});
        Deployment deployment(config, loop, network);
        deployment.start();
        if (!loop.runWhile([&] { return !deployment.ready(); }, loop.nowUs() + 10'000'000)) {
            throw RunError("nodes did not become ready");
        }
        const auto origin = (loop.nowUs() / 1'000'000 + 1) * 1'000'000;
        loop.runUntil(origin);
        report.startUs = origin;
        deployment.begin(origin);
        loop.runUntil(origin + durationUs);
        deployment.stopSimulators();
        report.drained = loop.runWhile([&] { return !deployment.quiescent(); }, loop.nowUs() + drainUs);
        deployment.fill(report);
        deployment.stop();
        return report;
    }

    AsioLoop loop;
    std::unique_ptr<runtime::Network> network;
    if (run.transport == Transport::Tcp) {
        network = std::make_unique<runtime::TcpNetwork>(loop);
    } else {
        network = std::make_unique<runtime::SimNetwork>(loop, run.seed, runtime::LinkProfile{run.linkLatencyUs, 0.0});
    }
    Deployment deployment(config, loop, *network);
    deployment.start();
    if (!loop.runWhile([&] { return !deployment.ready(); }, kReadyTimeout)) throw RunError("nodes did not become ready");
    const auto origin = loop.nowUs();
    report.startUs = origin;
    deployment.begin(origin);
    Monitor monitor(loop, deployment, report.cpu, "all");
    loop.runWhile([&] { return (loop.nowUs() < origin + durationUs || !deployment.simulatorsDone()) && !monitor.saturated; },
                  std::chrono::milliseconds(durationUs / 1000 + 5000));
    deployment.stopSimulators();
    report.drained = !monitor.saturated &&
                     loop.runWhile([&] { return !deployment.quiescent() && !monitor.saturated; },
                                   std::chrono::milliseconds(drainUs / 1000));
    monitor.stop();
    report.saturated = monitor.saturated;
    if (report.saturated) spdlog::warn("send queue above {} bytes for more than 5 s, run aborted", kHighWaterBytes);
    deployment.fill(report);
    deployment.stop();
    loop.runFor(50ms);
    return report;
}

std::map<std::string, std::uint16_t> portMap(const ScenarioConfig& config, std::uint16_t basePort) {
    std::vector<std::string> endpoints;
    for (const auto& n : config.nodes) {
        if (n.tier == Tier::Fog || n.tier == Tier::Cloud) endpoints.push_back(runtime::mqttEndpoint(n.id));
        if (n.tier == Tier::Fog) endpoints.push_back(runtime::gatewayEndpoint(n.id));
    }
    std::sort(endpoints.begin(), endpoints.end());
    std::map<std::string, std::uint16_t> ports;
    for (std::size_t i = 0; i < endpoints.size(); ++i) ports[endpoints[i]] = static_cast<std::uint16_t>(basePort + i);
    return ports;
}

namespace {

volatile std::sig_atomic_t terminateRequested = 0;

void onTerminate(int) { terminateRequested = 1; }

fs::path nodeFile(const std::string& dir, const std::string& node) { return fs::path(dir) / ("node-" + node + ".json"); }

void writeAtomically(const fs::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    std::ofstream(tmp) << content;
    fs::rename(tmp, path);
}

Json nodeResult(const Deployment& deployment, const RunReport& partial, bool final) {
    RunReport r = partial;
    deployment.fill(r);
    Json j;
    j["done"] = true;
    j["final"] = final;
    j["saturated"] = partial.saturated;
    j["drained"] = partial.drained;
    j["start_us"] = partial.startUs;
    j["counters"] = r.counters;
    j["round_trips"] = {{"initiated", r.roundTrips.initiated}, {"completed", r.roundTrips.completed}};
    Json records = Json::array();
    for (const auto& rec : r.records) records.push_back({rec.id, rec.sentAtUs, rec.receivedAtUs});
    j["records"] = records;
    j["alerts"] = r.alerts;
    j["effects"] = r.effects;
    j["emissions"] = r.emissions;
    j["dead_letters"] = r.deadLetters;
    j["nodes"] = r.nodes;
    j["pending"] = deployment.pendingIds();
    return j;
}

}// namespace

int runNodeProcess(const ScenarioConfig& config, const NodeProcessOptions& options) {
    if (!config.node(options.node)) throw ConfigError("unknown node '" + options.node + "'");
    if (config.run.clock != cep::ClockMode::ProcessingTime) throw ConfigError("--processes requires processing_time");
    std::signal(SIGTERM, onTerminate);
    std::signal(SIGINT, onTerminate);
    const auto& run = config.run;
    AsioLoop loop;
    runtime::TcpNetwork network(loop, portMap(config, options.basePort));
    Deployment deployment(config, loop, network, {options.node});
    RunReport partial;
    partial.run = run;
    deployment.start();
    const auto forever = std::chrono::hours(24);
    loop.runWhile([&] { return !terminateRequested && loop.nowMs() < options.startAtMs; }, forever);
    const auto origin = options.startAtMs * 1000;
    partial.startUs = origin;
    deployment.begin(origin);
    Monitor monitor(loop, deployment, partial.cpu, options.node);
    const auto durationUs = static_cast<std::int64_t>(run.durationS * 1e6);
    loop.runWhile([&] {
        return !terminateRequested && !monitor.saturated &&
               (loop.nowUs() < origin + durationUs || !deployment.simulatorsDone());
    }, forever);
    deployment.stopSimulators();
    partial.drained = loop.runWhile([&] { return !terminateRequested && !deployment.quiescent(); },
                                    std::chrono::milliseconds(static_cast<std::int64_t>(run.drainTimeoutS * 1000)));
    partial.drained = partial.drained && deployment.quiescent();
    partial.saturated = monitor.saturated;
    const auto file = nodeFile(options.outDir, options.node);
    writeAtomically(file, nodeResult(deployment, partial, false).dump());
    loop.runWhile([&] { return !terminateRequested; }, forever);
    monitor.stop();
    partial.saturated = monitor.saturated;
    writeAtomically(file, nodeResult(deployment, partial, true).dump());
    deployment.stop();
    loop.runFor(20ms);
    return 0;
}

RunReport runProcesses(const ScenarioConfig& config, const RunOptions& options) {
    if (config.run.clock != cep::ClockMode::ProcessingTime) throw ConfigError("--processes requires processing_time");
    if (config.path.empty()) throw ConfigError("--processes needs a scenario file");
    const std::string out = options.outDir.empty() ? "out" : options.outDir;
    fs::create_directories(out);
    const std::uint16_t basePort = options.basePort ? options.basePort : static_cast<std::uint16_t>(20000 + getpid() % 20000);
    const std::string exe = options.executable.empty() ? fs::read_symlink("/proc/self/exe").string() : options.executable;

    std::vector<std::string> order;
    for (Tier tier : {Tier::Cloud, Tier::Fog, Tier::Edge, Tier::User}) {
        for (const auto& id : config.idsOf(tier)) order.push_back(id);
    }
    const auto startAt = wallMs() + 2000 + 100 * static_cast<std::int64_t>(order.size());
    for (const auto& id : order) fs::remove(nodeFile(out, id));

    std::map<std::string, pid_t> children;
    for (const auto& id : order) {
        std::vector<std::string> args{exe,          "node", "--scenario", config.path, "--node", id, "--base-port",
                                      std::to_string(basePort), "--start-at", std::to_string(startAt), "--out", out};
        const auto flags = options.flags();
        args.insert(args.end(), flags.begin(), flags.end());
        const auto logPath = (fs::path(out) / ("node-" + id + ".log")).string();
        const pid_t pid = fork();
        if (pid < 0) throw RunError("fork failed");
        if (pid == 0) {
            if (FILE* log = std::fopen(logPath.c_str(), "w")) {
                dup2(fileno(log), STDOUT_FILENO);
                dup2(fileno(log), STDERR_FILENO);
            }
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            argv.push_back(nullptr);
            execv(exe.c_str(), argv.data());
            _exit(127);
        }
        children[id] = pid;
    }

    RunReport report;
    report.scenario = config.name;
    report.run = config.run;
    report.rate = loadRate(config);
    report.processes = true;
    report.startUs = startAt * 1000;

    std::vector<CpuMeter> meters;
    for (const auto& [id, pid] : children) meters.emplace_back(pid, id);
    const auto deadline = startAt + static_cast<std::int64_t>((config.run.durationS + config.run.drainTimeoutS) * 1000) + 15000;
    auto allDone = [&] {
        for (const auto& id : order) {
            std::ifstream in(nodeFile(out, id));
            if (!in) return false;
        }
        return true;
    };
    std::string failure;
    while (!allDone() && wallMs() < deadline && failure.empty()) {
        std::this_thread::sleep_for(std::chrono::microseconds(kSampleUs));
        for (auto& m : meters) {
            if (auto s = m.sample(wallMs())) report.cpu.push_back(*s);
        }
        for (const auto& [id, pid] : children) {
            int status = 0;
            if (waitpid(pid, &status, WNOHANG) == pid) {
                failure = "node " + id + " exited early, see node-" + id + ".log";
                children[id] = 0;
                break;
            }
        }
    }
    if (failure.empty() && !allDone()) failure = "timed out waiting for nodes";
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (children[*it] > 0) kill(children[*it], SIGTERM);
    }
    for (const auto& [id, pid] : children) {
        if (pid <= 0) continue;
        int status = 0;
        for (int i = 0; i < 100 && waitpid(pid, &status, WNOHANG) == 0; ++i) std::this_thread::sleep_for(50ms);
        if (waitpid(pid, &status, WNOHANG) == 0) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
        }
    }

    Json counters = Json::object();
    std::vector<std::string> pending;
    for (const auto& id : order) {
        std::ifstream in(nodeFile(out, id));
        if (!in) continue;
        Json j = Json::parse(in, nullptr, false);
        if (j.is_discarded()) continue;
        if (!j.value("final", false) && failure.empty()) failure = "node " + id + " did not write a final result";
        for (const auto& [k, v] : j["counters"].items()) counters[k] = counters.value(k, std::uint64_t{0}) + v.get<std::uint64_t>();
        report.roundTrips.initiated += j["round_trips"]["initiated"].get<std::uint64_t>();
        report.roundTrips.completed += j["round_trips"]["completed"].get<std::uint64_t>();
        for (const auto& r : j["records"]) {
            report.records.push_back({r[0].get<std::string>(), r[1].get<std::int64_t>(), r[2].get<std::int64_t>()});
        }
        for (const auto& [k, v] : j["nodes"].items()) report.nodes[k] = v;
        for (const auto& p : j["pending"]) pending.push_back(p.get<std::string>());
        for (const auto& [key, target] : {std::pair{"alerts", &report.alerts}, std::pair{"effects", &report.effects},
                                          std::pair{"emissions", &report.emissions},
                                          std::pair{"dead_letters", &report.deadLetters}}) {
            for (const auto& line : j[key]) target->push_back(line);
        }
        report.saturated = report.saturated || j.value("saturated", false);
        report.drained = report.drained && j.value("drained", false);
    }
    auto byTime = [](const Json& a, const Json& b) { return a.value("t", std::int64_t{0}) < b.value("t", std::int64_t{0}); };
    for (auto* lines : {&report.alerts, &report.effects, &report.emissions, &report.deadLetters}) {
        std::stable_sort(lines->begin(), lines->end(), byTime);
    }
    std::sort(report.records.begin(), report.records.end(),
              [](const auto& a, const auto& b) { return a.sentAtUs < b.sentAtUs; });
    report.counters = counters;
    report.roundTrips.deadLettered = countDeadLettered(pending, report.deadLetters);
    report.roundTrips.inflight = pending.size() - report.roundTrips.deadLettered;
    report.error = failure;
    return report;
}

}// namespace atmosphere::harness
