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

#ifndef ATMOSPHERE_AGENT_EXPRESSION_HPP_
#define ATMOSPHERE_AGENT_EXPRESSION_HPP_

#include <atmosphere/common/Errors.hpp>
#include <atmosphere/event/FieldValue.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace atmosphere::agent {

using ValueMap = std::map<std::string, event::FieldValue>;

/// Variables visible to guards and setState expressions.
struct Scope {
    event::FieldValue value;
    const ValueMap* attributes = nullptr;
    const ValueMap* state = nullptr;
    const ValueMap* fields = nullptr;
};

class ExpressionError : public AtmosphereError {
  public:
    using AtmosphereError::AtmosphereError;
};

/**
 * Small expression language for rule guards:
 * `or`, `and`, `not`, comparisons (`= == != <> < <= > >=`), `+ - * /`,
 * number/string/boolean/null literals and the variables `value`,
 * `attr.<name>`, `state.<name>` and `field.<name>`.
 */
class Expression {
  public:
    struct Node;

    /// Throws ExpressionError on malformed input.
    static Expression parse(const std::string& text);

    /// Throws TypeError on ill-typed operands.
    event::FieldValue evaluate(const Scope& scope) const;
    bool test(const Scope& scope) const;

    /// Every variable reference as `value`, `attr.x`, `state.x` or `field.x`.
    std::vector<std::string> variables() const;
    const std::string& text() const { return source; }

  private:
    std::string source;
    std::shared_ptr<const Node> root;
};

}// namespace atmosphere::agent

#endif// ATMOSPHERE_AGENT_EXPRESSION_HPP_
