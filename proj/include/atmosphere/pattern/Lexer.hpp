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

#ifndef ATMOSPHERE_PATTERN_LEXER_HPP_
#define ATMOSPHERE_PATTERN_LEXER_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace atmosphere::pattern {

enum class TokenKind { Word, Number, SingleQuoted, DoubleQuoted, Symbol, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;// unescaped content for quoted strings
    int line = 1;
    int column = 1;
};

/// Splits pattern text into tokens. `//` starts a line comment.
std::vector<Token> tokenize(std::string_view text);

}// namespace atmosphere::pattern

#endif// ATMOSPHERE_PATTERN_LEXER_HPP_
