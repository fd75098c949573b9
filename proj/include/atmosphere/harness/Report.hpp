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


#ifndef ATMOSPHERE_HARNESS_REPORT_HPP_
#define ATMOSPHERE_HARNESS_REPORT_HPP_

#include <atmosphere/harness/ScenarioConfig.hpp>
#include <atmosphere/runtime/Journal.hpp>

#include <array>
#include <string>
#include <vector>

namespace atmosphere::harness {

struct CpuSample {
    std::int64_t tMs = 0;
    std::string node;
    double percent = 0;
};

struct RoundTrips {
    std::uint64_t initiated = 0;
    std::uint64_t completed = 0;
    std::uint64_t inflight = 0;// pending at shutdown
    std::uint64_t deadLettered = 0;
};

struct LatencySummary {
    std::size_t count = 0;
    double mean = 0;
    double min = 0;
    double max = 0;
    std::array<double, 5> buckets{};
};

struct RunReport {
    std::string scenario;
    RunSpec run;
    bool processes = false;
    double rate = 0;// configured load rate, 0 without load simulators
    std::int64_t startUs = 0;
    std::vector<runtime::LatencyRecord> records;
    RoundTrips roundTrips;
    Json counters;
    Json nodes = Json::object();// per-node details
    std::vector<CpuSample> cpu;
    std::vector<Json> alerts;
    std::vector<Json> effects;
    std::vector<Json> emissions;
    std::vector<Json> deadLetters;
    bool saturated = false;
    bool drained = true;
    std::string error;

    /// Records sent after the warm-up window.
    std::vector<double> latenciesMs(bool afterWarmup = true) const;
    Json summary() const;
};

LatencySummary summarize(const std::vector<double>& latenciesMs);

/// Writes summary.json, latency.csv, cpu.csv and the jsonl logs into `dir`.
void writeReport(const RunReport& report, const std::string& dir);

/// One JSON document per line, in order.
std::string toJsonLines(const std::vector<Json>& lines);

}// namespace atmosphere::harness

#endif// ATMOSPHERE_HARNESS_REPORT_HPP_
