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

#include <atmosphere/pattern/Lexer.hpp>
#include <atmosphere/pattern/PatternDef.hpp>

#include <cctype>

namespace atmosphere::pattern {

namespace {

bool isWordStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isWordChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool isDigit(char c) { return c >= '0' && c <= '9'; }

}// namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    int line = 1;
    int column = 1;
    auto advance = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance();
            continue;
        }
        Token token;
        token.line = line;
        token.column = column;
        if (isWordStart(c)) {
            std::size_t j = i;
            while (j < text.size() && isWordChar(text[j])) ++j;
            token.kind = TokenKind::Word;
            token.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (isDigit(c) || (c == '-' && i + 1 < text.size() && isDigit(text[i + 1]))) {
            std::size_t j = i + 1;
            while (j < text.size() && isDigit(text[j])) ++j;
            if (j + 1 < text.size() && text[j] == '.' && isDigit(text[j + 1])) {
                ++j;
                while (j < text.size() && isDigit(text[j])) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && isDigit(text[k])) {
                    while (k < text.size() && isDigit(text[k])) ++k;
                    j = k;
                }
            }
            token.kind = TokenKind::Number;
            token.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (c == '\'' || c == '"') {
            token.kind = c == '\'' ? TokenKind::SingleQuoted : TokenKind::DoubleQuoted;
            advance();
            bool closed = false;
            while (i < text.size()) {
                char d = text[i];
                if (d == '\\' && i + 1 < text.size()) {
                    token.text.push_back(text[i + 1]);
                    advance(2);
                    continue;
                }
                advance();
                if (d == c) {
                    closed = true;
                    break;
                }
                token.text.push_back(d);
            }
            if (!closed) {
                throw PatternError(PatternError::Kind::Syntax, "unterminated string literal", token.line, token.column);
            }
        } else {
            static constexpr std::string_view twoChar[] = {"!=", "<=", ">=", "<>", "->"};
            token.kind = TokenKind::Symbol;
            token.text = std::string(1, c);
            for (auto candidate : twoChar) {
                if (text.substr(i, 2) == candidate) {
                    token.text = std::string(candidate);
                    break;
                }
            }
            advance(token.text.size());
        }
        tokens.push_back(std::move(token));
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line;
    end.column = column;
    tokens.push_back(end);
    return tokens;
}

}// namespace atmosphere::pattern
