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

#ifndef ATMOSPHERE_ORACLE_ORACLEREPLAY_HPP_
#define ATMOSPHERE_ORACLE_ORACLEREPLAY_HPP_

#include <atmosphere/event/Event.hpp>
#include <atmosphere/event/Schema.hpp>
#include <atmosphere/pattern/PatternDef.hpp>

#include <string>
#include <vector>

namespace atmosphere::oracle {

struct OracleEmission {
    event::Event event;
    std::string producedBy;
    bool operator==(const OracleEmission&) const = default;
};

struct ReplayOptions {
    int64_t startMs = 0;
    std::string sourceId = "cep";
};

/**
 * Reference evaluation of a deployment over a complete, time-ordered log.
 * Each pattern is evaluated over its entire input in one pass; every batch is
 * materialised independently and closed when its end is at or before the
 * horizon.
 */
std::vector<OracleEmission> oracleReplay(const std::vector<pattern::PatternDef>& patterns,
                                         const event::SchemaRegistry& inputs,
                                         const std::vector<event::Event>& log,
                                         int64_t horizonMs,
                                         const ReplayOptions& options = {});

}// namespace atmosphere::oracle

#endif// ATMOSPHERE_ORACLE_ORACLEREPLAY_HPP_
