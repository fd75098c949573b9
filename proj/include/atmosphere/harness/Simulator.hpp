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


#ifndef ATMOSPHERE_HARNESS_SIMULATOR_HPP_
#define ATMOSPHERE_HARNESS_SIMULATOR_HPP_

#include <atmosphere/harness/ScenarioConfig.hpp>

#include <random>

namespace atmosphere::harness {

/// Draws event fields for one simulator. Sequence fields yield `<target>-<n>`.
class FieldSampler {
  public:
    FieldSampler(const SimulatorSpec& spec, std::uint64_t runSeed);

    Json next();
    std::uint64_t produced() const { return count; }

  private:
    Json draw(const Generator& g);

    const SimulatorSpec& spec;
    std::mt19937_64 rng;
    std::uint64_t count = 0;
};

}// namespace atmosphere::harness

#endif// ATMOSPHERE_HARNESS_SIMULATOR_HPP_
