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


#include <atmosphere/harness/Buckets.hpp>
#include <atmosphere/harness/Report.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>

namespace atmosphere::harness {

std::vector<double> RunReport::latenciesMs(bool afterWarmup) const {
    const auto from = startUs + static_cast<std::int64_t>(run.warmupS * 1e6);
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (afterWarmup && r.sentAtUs < from) continue;
        out.push_back(r.latencyMs());
    }
    return out;
}

LatencySummary summarize(const std::vector<double>& latenciesMs) {
    LatencySummary s;
    s.count = latenciesMs.size();
    if (latenciesMs.empty()) return s;
    s.mean = std::accumulate(latenciesMs.begin(), latenciesMs.end(), 0.0) / static_cast<double>(s.count);
    const auto [lo, hi] = std::minmax_element(latenciesMs.begin(), latenciesMs.end());
    s.min = *lo;
    s.max = *hi;
    s.buckets = bucketize(latenciesMs);
    return s;
}

Json RunReport::summary() const {
    Json j;
    j["scenario"] = scenario;
    j["mode"] = runtime::toString(run.mode);
    j["qos"] = run.qos;
    j["clock"] = run.clock == cep::ClockMode::EventTime ? "event_time" : "processing_time";
    j["transport"] = processes ? "processes" : (run.transport == Transport::Tcp ? "tcp" : "sim");
    j["seed"] = run.seed;
    j["duration_s"] = run.durationS;
    j["rate"] = rate;
    j["warmup_s"] = run.warmupS;

    auto latency = [](const LatencySummary& s) {
        Json l;
        l["count"] = s.count;
        l["mean_ms"] = s.mean;
        l["min_ms"] = s.min;
        l["max_ms"] = s.max;
        Json b = Json::object();
        if (s.count > 0) {
            for (std::size_t i = 0; i < kBucketLabels.size(); ++i) b[kBucketLabels[i]] = s.buckets[i];
        }
        l["buckets_pct"] = b;
        return l;
    };
    j["latency"] = latency(summarize(latenciesMs(true)));
    j["latency_all"] = latency(summarize(latenciesMs(false)));
    j["latency_skew_affected"] = false;

    Json rt;
    rt["initiated"] = roundTrips.initiated;
    rt["completed"] = roundTrips.completed;
    rt["inflight"] = roundTrips.inflight;
    rt["dead_lettered"] = roundTrips.deadLettered;
    j["round_trips"] = rt;
    j["sustained_rate"] = static_cast<double>(roundTrips.completed) / run.durationS;
    j["counters"] = counters;
    if (roundTrips.completed > 0) {
        Json per;
        for (const auto& [k, v] : counters.items()) per[k] = v.get<double>() / static_cast<double>(roundTrips.completed);
        j["per_round_trip"] = per;
    }

    std::map<std::string, std::pair<double, std::size_t>> cpuByNode;
    for (const auto& s : cpu) {
        auto& [sum, n] = cpuByNode[s.node];
        sum += s.percent;
        ++n;
    }
    Json c = Json::object();
    for (const auto& [node, agg] : cpuByNode) c[node] = {{"samples", agg.second}, {"mean_pct", agg.first / static_cast<double>(agg.second)}};
    j["cpu"] = c;
    j["alerts"] = alerts.size();
    j["emissions"] = emissions.size();
    j["dead_letters"] = deadLetters.size();
    j["nodes"] = nodes;
    j["saturated"] = saturated;
    j["drained"] = drained;
    if (!error.empty()) j["error"] = error;
    return j;
}

std::string toJsonLines(const std::vector<Json>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l.dump();
        out += '\n';
    }
    return out;
}

void writeReport(const RunReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);
    {
        std::ofstream out(base / "summary.json");
        out << report.summary().dump(2) << '\n';
    }
    {
        std::ofstream out(base / "latency.csv");
        out << "round_trip_id,sent_at,received_at,latency_ms\n";
        out << std::fixed << std::setprecision(3);
        for (const auto& r : report.records) {
            out << r.id << ',' << r.sentAtUs / 1000 << ',' << r.receivedAtUs / 1000 << ',' << r.latencyMs() << '\n';
        }
    }
    {
        std::ofstream out(base / "cpu.csv");
        out << "t_ms,node_id,cpu_pct\n";
        out << std::fixed << std::setprecision(2);
        for (const auto& s : report.cpu) out << s.tMs << ',' << s.node << ',' << s.percent << '\n';
    }
    std::ofstream(base / "alerts.jsonl") << toJsonLines(report.alerts);
    std::ofstream(base / "effects.jsonl") << toJsonLines(report.effects);
    std::ofstream(base / "emissions.jsonl") << toJsonLines(report.emissions);
    std::ofstream(base / "dead_letters.jsonl") << toJsonLines(report.deadLetters);
}

}// namespace atmosphere::harness
