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
#include <atmosphere/pattern/Parser.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace atmosphere::pattern {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

// Constructs outside the frozen subset; reported as unsupported rather than as syntax errors.
const std::set<std::string> kUnsupportedWords = {
    "or",     "not",   "where",  "within", "having", "order", "output", "limit", "join",    "distinct", "unidirectional",
    "sum",    "avg",   "min",    "max",    "median", "stddev", "first",  "last",  "window", "delete",   "update",
    "on",     "until", "timer",  "match_recognize", "prior", "prev", "case", "in", "between", "like", "regexp", "is",
    "std",   "ext",    "length", "time",  "length_batch", "ext_timed", "keepall", "firstevent", "lastevent",
    "every_distinct"};

bool isUnsupportedWord(std::string_view word) {
    std::string lower(word);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return kUnsupportedWords.contains(lower);
}

class Parser {
  public:
    explicit Parser(std::string_view text) : tokens(tokenize(text)) {}

    bool atEnd() const { return peek().kind == TokenKind::End; }

    void skipSeparators() {
        while (isSymbol(";")) ++position;
    }

    PatternDef parseOne() {
        PatternDef p;
        while (isSymbol("@")) parseAnnotation(p);
        expectKeyword("insert");
        expectKeyword("into");
        p.insertInto = expectIdentifier("stream name after 'insert into'");
        expectKeyword("select");
        p.select.push_back(parseSelectItem());
        while (isSymbol(",")) {
            ++position;
            p.select.push_back(parseSelectItem());
        }
        expectKeyword("from");
        if (!isKeyword("pattern")) {
            if (peek().kind == TokenKind::Word) {
                unsupported("stream source '" + peek().text + "' (only 'from pattern [...]' is supported)");
            }
            syntax("expected 'pattern'");
        }
        ++position;
        expectSymbol("[");
        p.bindings = parsePatternExpr();
        expectSymbol("]");
        if (isSymbol(".")) {
            p.window = parseWindow();
        }
        if (isKeyword("group")) {
            ++position;
            expectKeyword("by");
            p.groupBy.push_back(parseFieldPath());
            while (isSymbol(",")) {
                ++position;
                p.groupBy.push_back(parseFieldPath());
            }
        }
        if (!atEnd() && !isSymbol("@") && !isSymbol(";") && !isKeyword("insert")) {
            rejectToken("after pattern");
        }
        for (auto& b : p.bindings) {
            b.selectAll = std::any_of(p.select.begin(), p.select.end(), [&](const SelectItem& item) {
                const auto* star = std::get_if<select::StarOf>(&item);
                return star && star->alias == b.alias;
            });
        }
        validatePattern(p);
        return p;
    }

  private:
    const Token& peek(std::size_t offset = 0) const {
        return tokens[std::min(position + offset, tokens.size() - 1)];
    }

    bool isSymbol(std::string_view s, std::size_t offset = 0) const {
        return peek(offset).kind == TokenKind::Symbol && peek(offset).text == s;
    }
    bool isKeyword(std::string_view k, std::size_t offset = 0) const {
        return peek(offset).kind == TokenKind::Word && iequals(peek(offset).text, k);
    }

    [[noreturn]] void syntax(const std::string& message) const {
        const auto& t = peek();
        std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
        throw PatternError(PatternError::Kind::Syntax, message + ", found " + found, t.line, t.column);
    }
    [[noreturn]] void unsupported(const std::string& construct) const {
        const auto& t = peek();
        throw PatternError(PatternError::Kind::Unsupported, "unsupported construct: " + construct, t.line, t.column);
    }
    [[noreturn]] void rejectToken(const std::string& context) const {
        const auto& t = peek();
        if (t.kind == TokenKind::Word && isUnsupportedWord(t.text)) unsupported("'" + t.text + "'");
        if (t.kind == TokenKind::Symbol && (t.text == "->" || t.text == "<>")) unsupported("'" + t.text + "'");
        syntax("unexpected token " + context);
    }

    void expectSymbol(std::string_view s) {
        if (!isSymbol(s)) rejectToken("(expected '" + std::string(s) + "')");
        ++position;
    }
    void expectKeyword(std::string_view k) {
        if (!isKeyword(k)) rejectToken("(expected '" + std::string(k) + "')");
        ++position;
    }
    std::string expectIdentifier(const std::string& what) {
        if (peek().kind != TokenKind::Word) syntax("expected " + what);
        return tokens[position++].text;
    }
    std::string expectQuoted() {
        if (peek().kind != TokenKind::DoubleQuoted) syntax("expected double-quoted string");
        return tokens[position++].text;
    }

    void parseAnnotation(PatternDef& p) {
        expectSymbol("@");
        if (isKeyword("Name")) {
            ++position;
            expectSymbol("(");
            p.name = expectQuoted();
            expectSymbol(")");
        } else if (isKeyword("Tag")) {
            ++position;
            expectSymbol("(");
            expectKeyword("name");
            expectSymbol("=");
            auto key = expectQuoted();
            expectSymbol(",");
            expectKeyword("value");
            expectSymbol("=");
            auto value = expectQuoted();
            expectSymbol(")");
            p.tags[key] = value;
        } else if (peek().kind == TokenKind::Word) {
            unsupported("annotation @" + peek().text);
        } else {
            syntax("expected annotation name");
        }
    }

    FieldPath parseFieldPath() {
        FieldPath path;
        path.alias = expectIdentifier("alias");
        expectSymbol(".");
        path.field = expectIdentifier("field name");
        return path;
    }

    std::string parseAs() {
        expectKeyword("as");
        return expectIdentifier("output name after 'as'");
    }

    SelectItem parseSelectItem() {
        if (isSymbol("*")) unsupported("select *");
        if (isKeyword("distinct")) unsupported("distinct");
        if (isKeyword("current_timestamp") && isSymbol("(", 1)) {
            position += 2;
            expectSymbol(")");
            return select::CurrentTimestamp{parseAs()};
        }
        if (peek().kind == TokenKind::Word && isSymbol("(", 1)) {
            if (isKeyword("count")) {
                position += 2;
                if (isSymbol("*")) unsupported("count(*)");
                auto path = parseFieldPath();
                expectSymbol(")");
                return select::Count{std::move(path), parseAs()};
            }
            unsupported("function " + peek().text + "()");
        }
        auto alias = expectIdentifier("select item");
        expectSymbol(".");
        if (isSymbol("*")) {
            ++position;
            return select::StarOf{std::move(alias)};
        }
        auto field = expectIdentifier("field name");
        return select::FieldRef{FieldPath{std::move(alias), std::move(field)}, parseAs()};
    }

    std::vector<Binding> parsePatternExpr() {
        if (isSymbol("(")) {
            ++position;
            auto inner = parsePatternExpr();
            expectSymbol(")");
            return inner;
        }
        if (!isKeyword("every")) {
            if (peek().kind == TokenKind::Word && isUnsupportedWord(peek().text)) unsupported("'" + peek().text + "'");
            unsupported("pattern expression without 'every'");
        }
        ++position;
        std::vector<Binding> bindings;
        if (isSymbol("(")) {
            ++position;
            bindings.push_back(parseBinding());
            while (isKeyword("and")) {
                ++position;
                bindings.push_back(parseBinding());
            }
            expectSymbol(")");
        } else {
            bindings.push_back(parseBinding());
        }
        if (isKeyword("and") || isKeyword("or") || isSymbol("->") || isKeyword("where")) {
            unsupported("'" + peek().text + "' between pattern expressions");
        }
        return bindings;
    }

    Binding parseBinding() {
        Binding b;
        if (isKeyword("not")) unsupported("'not'");
        b.alias = expectIdentifier("binding alias");
        expectSymbol("=");
        b.stream = expectIdentifier("stream name");
        if (isSymbol("(")) {
            ++position;
            b.predicates.push_back(parsePredicate());
            while (isKeyword("and")) {
                ++position;
                b.predicates.push_back(parsePredicate());
            }
            expectSymbol(")");
        }
        return b;
    }

    Predicate parsePredicate() {
        Predicate pred;
        pred.lhs = parseFieldPath();
        static const std::pair<std::string_view, CompareOp> ops[] = {
            {"=", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
            {"<=", CompareOp::Le}, {">", CompareOp::Gt}, {">=", CompareOp::Ge}};
        bool found = false;
        for (const auto& [text, op] : ops) {
            if (isSymbol(text)) {
                pred.op = op;
                found = true;
                break;
            }
        }
        if (!found) rejectToken("(expected comparison operator)");
        ++position;
        const auto& t = peek();
        if (t.kind == TokenKind::Number) {
            pred.rhs = parseNumber(t);
            ++position;
        } else if (t.kind == TokenKind::SingleQuoted) {
            pred.rhs = event::FieldValue(t.text);
            ++position;
        } else if (t.kind == TokenKind::Word && (iequals(t.text, "true") || iequals(t.text, "false"))) {
            pred.rhs = event::FieldValue(iequals(t.text, "true"));
            ++position;
        } else if (t.kind == TokenKind::Word && iequals(t.text, "null")) {
            unsupported("null literal");
        } else if (t.kind == TokenKind::Word) {
            pred.rhs = parseFieldPath();
        } else {
            syntax("expected literal or field path");
        }
        if (isKeyword("or")) unsupported("'or'");
        return pred;
    }

    event::FieldValue parseNumber(const Token& t) const {
        const bool isDecimal = t.text.find_first_of(".eE") != std::string::npos;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        if (isDecimal) {
            double value = 0;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last) syntax("invalid number");
            return event::FieldValue(value);
        }
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) syntax("integer out of range");
        return event::FieldValue(value);
    }

    Duration parseWindow() {
        expectSymbol(".");
        if (!isKeyword("win")) {
            if (peek().kind == TokenKind::Word) unsupported("view namespace '" + peek().text + "'");
            syntax("expected 'win'");
        }
        ++position;
        expectSymbol(":");
        if (!isKeyword("time_batch")) {
            if (peek().kind == TokenKind::Word) unsupported("window win:" + peek().text);
            syntax("expected window name");
        }
        ++position;
        expectSymbol("(");
        const auto& t = peek();
        if (t.kind != TokenKind::Number || t.text.find_first_of(".eE-") != std::string::npos) {
            syntax("expected positive integer window length");
        }
        Duration d;
        d.magnitude = std::get<std::int64_t>(parseNumber(t).storage());
        ++position;
        if (isKeyword("seconds") || isKeyword("second") || isKeyword("sec")) {
            d.unit = TimeUnit::Seconds;
        } else if (isKeyword("minutes") || isKeyword("minute") || isKeyword("min")) {
            d.unit = TimeUnit::Minutes;
        } else if (isKeyword("hours") || isKeyword("hour")) {
            d.unit = TimeUnit::Hours;
        } else if (peek().kind == TokenKind::Word) {
            unsupported("time unit '" + peek().text + "'");
        } else {
            syntax("expected time unit");
        }
        ++position;
        expectSymbol(")");
        if (isSymbol(".")) unsupported("chained views");
        return d;
    }

    std::vector<Token> tokens;
    std::size_t position = 0;
};

}// namespace

PatternDef parsePattern(std::string_view text) {
    Parser parser(text);
    parser.skipSeparators();
    auto p = parser.parseOne();
    parser.skipSeparators();
    if (!parser.atEnd()) {
        throw PatternError(PatternError::Kind::Syntax, "trailing input after pattern " + p.name);
    }
    return p;
}

std::vector<PatternDef> parsePatternFile(std::string_view text) {
    Parser parser(text);
    std::vector<PatternDef> patterns;
    parser.skipSeparators();
    while (!parser.atEnd()) {
        patterns.push_back(parser.parseOne());
        parser.skipSeparators();
    }
    return patterns;
}

}// namespace atmosphere::pattern
