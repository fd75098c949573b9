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


#include <atmosphere/harness/Simulator.hpp>

namespace atmosphere::harness {

FieldSampler::FieldSampler(const SimulatorSpec& spec, std::uint64_t runSeed) : spec(spec) {
    std::seed_seq seq{runSeed, spec.seed};
    rng.seed(seq);
}

Json FieldSampler::draw(const Generator& g) {
    switch (g.kind) {
        case Generator::Kind::Constant: return g.constant;
        case Generator::Kind::Uniform: return std::uniform_int_distribution<std::int64_t>(g.low, g.high)(rng);
        case Generator::Kind::Choice: return g.choices[std::uniform_int_distribution<std::size_t>(0, g.choices.size() - 1)(rng)];
        case Generator::Kind::Bernoulli: return std::bernoulli_distribution(g.probability)(rng);
        case Generator::Kind::Sequence: return spec.target + "-" + std::to_string(count);
    }
    return nullptr;
}

Json FieldSampler::next() {
    Json fields = Json::object();
    for (const auto& [name, g] : spec.fields) fields[name] = draw(g);
    ++count;
    return fields;
}

}// namespace atmosphere::harness
