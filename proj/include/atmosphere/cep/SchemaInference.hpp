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

#ifndef ATMOSPHERE_CEP_SCHEMAINFERENCE_HPP_
#define ATMOSPHERE_CEP_SCHEMAINFERENCE_HPP_

#include <atmosphere/event/Schema.hpp>
#include <atmosphere/pattern/PatternDef.hpp>

namespace atmosphere::cep {

/**
 * Type-checks a pattern against the schemas of the streams it reads and
 * returns the schema of its output stream.
 *
 * Throws UnknownStreamError for unregistered inputs and PatternError(Semantic)
 * for unknown fields, ill-typed predicates or clashing output names.
 */
event::EventSchema inferOutputSchema(const pattern::PatternDef& pattern, const event::SchemaRegistry& registry);

/**
 * Registers output schemas for every pattern whose inputs become resolvable,
 * iterating until a fixpoint. Patterns may be listed in any order.
 */
void registerDerivedSchemas(const std::vector<pattern::PatternDef>& patterns, event::SchemaRegistry& registry);

}// namespace atmosphere::cep

#endif// ATMOSPHERE_CEP_SCHEMAINFERENCE_HPP_
