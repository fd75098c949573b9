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

#include <cmath>
#include <stdexcept>

namespace atmosphere::harness {

std::size_t bucketOf(double latencyMs) {
    const auto ms = std::llround(latencyMs);
    if (ms <= 5) return 0;
    if (ms <= 10) return 1;
    if (ms <= 50) return 2;
    if (ms <= 100) return 3;
    return 4;
}

std::array<double, 5> bucketize(const std::vector<double>& latenciesMs) {
    if (latenciesMs.empty()) throw std::invalid_argument("bucketize: no latencies");
    std::array<std::size_t, 5> counts{};
    for (double l : latenciesMs) ++counts[bucketOf(l)];
    std::array<double, 5> percent{};
    for (std::size_t i = 0; i < counts.size(); ++i) {
        percent[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(latenciesMs.size());
    }
    return percent;
}

}// namespace atmosphere::harness
