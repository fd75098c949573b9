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


#ifndef ATMOSPHERE_HARNESS_BUCKETS_HPP_
#define ATMOSPHERE_HARNESS_BUCKETS_HPP_

#include <array>
#include <string>
#include <vector>

namespace atmosphere::harness {

inline constexpr std::array<const char*, 5> kBucketLabels = {"<=5", "6-10", "11-50", "51-100", ">100"};

/// Index of the response-time bucket of one latency, rounded to the nearest millisecond.
std::size_t bucketOf(double latencyMs);

/// Percentage of latencies per bucket. Throws std::invalid_argument on empty input.
std::array<double, 5> bucketize(const std::vector<double>& latenciesMs);

}// namespace atmosphere::harness

#endif// ATMOSPHERE_HARNESS_BUCKETS_HPP_
