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

#include <atmosphere/agent/Expression.hpp>

#include <cctype>
#include <charconv>
#include <cmath>

namespace atmosphere::agent {

using event::FieldType;
using event::FieldValue;

struct Expression::Node {
    enum class Kind { Literal, Variable, Unary, Binary } kind;
    std::string op;  // operator, or variable scope ("value", "attr", "state", "field")
    std::string name;// variable name within scope
    FieldValue literal;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Token {
    enum class Kind { Number, String, Ident, Symbol, End } kind;
    std::string text;
    size_t pos;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c))
                   || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                ++j;
                if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            out.push_back({Token::Kind::Number, s.substr(i, j - i), i});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Token::Kind::Ident, s.substr(i, j - i), i});
            i = j;
        } else if (c == '\'' || c == '"') {
            std::string text;
            size_t j = i + 1;
            while (j < s.size() && s[j] != c) {
                if (s[j] == '\\' && j + 1 < s.size()) ++j;
                text.push_back(s[j++]);
            }
            if (j >= s.size()) throw ExpressionError("unterminated string at offset " + std::to_string(i));
            out.push_back({Token::Kind::String, text, i});
            i = j + 1;
        } else {
            static const char* two[] = {"<=", ">=", "==", "!=", "<>"};
            std::string sym(1, c);
            for (const char* t : two) {
                if (s.compare(i, 2, t) == 0) sym = t;
            }
            if (sym.size() == 1 && std::string("<>=+-*/().").find(c) == std::string::npos) {
                throw ExpressionError(std::string("unexpected character '") + c + "' at offset " + std::to_string(i));
            }
            out.push_back({Token::Kind::Symbol, sym, i});
            i += sym.size();
        }
    }
    out.push_back({Token::Kind::End, "", s.size()});
    return out;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : tokens(tokenize(text)) {}

    NodePtr parse() {
        auto n = parseOr();
        if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
        return n;
    }

  private:
    const Token& peek() const { return tokens[index]; }
    [[noreturn]] void fail(const std::string& message) const {
        throw ExpressionError(message + " at offset " + std::to_string(peek().pos));
    }
    bool keyword(const char* word) {
        if (peek().kind == Token::Kind::Ident && peek().text == word) {
            ++index;
            return true;
        }
        return false;
    }
    bool symbol(const char* s) {
        if (peek().kind == Token::Kind::Symbol && peek().text == s) {
            ++index;
            return true;
        }
        return false;
    }
    static NodePtr binary(std::string op, NodePtr l, NodePtr r) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Kind::Binary;
        n->op = std::move(op);
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr parseOr() {
        auto n = parseAnd();
        while (keyword("or")) n = binary("or", n, parseAnd());
        return n;
    }
    NodePtr parseAnd() {
        auto n = parseNot();
        while (keyword("and")) n = binary("and", n, parseNot());
        return n;
    }
    NodePtr parseNot() {
        if (keyword("not")) {
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Kind::Unary;
            n->op = "not";
            n->lhs = parseNot();
            return n;
        }
        return parseComparison();
    }
    NodePtr parseComparison() {
        auto n = parseSum();
        for (const char* op : {"<=", ">=", "==", "!=", "<>", "<", ">", "="}) {
            if (symbol(op)) {
                std::string canonical = op;
                if (canonical == "=") canonical = "==";
                if (canonical == "<>") canonical = "!=";
                return binary(canonical, n, parseSum());
            }
        }
        return n;
    }
    NodePtr parseSum() {
        auto n = parseProduct();
        while (true) {
            if (symbol("+")) {
                n = binary("+", n, parseProduct());
            } else if (symbol("-")) {
                n = binary("-", n, parseProduct());
            } else {
                return n;
            }
        }
    }
    NodePtr parseProduct() {
        auto n = parseUnary();
        while (true) {
            if (symbol("*")) {
                n = binary("*", n, parseUnary());
            } else if (symbol("/")) {
                n = binary("/", n, parseUnary());
            } else {
                return n;
            }
        }
    }
    NodePtr parseUnary() {
        if (symbol("-")) {
            auto n = std::make_shared<Expression::Node>();
            n->kind = Expression::Node::Kind::Unary;
            n->op = "-";
            n->lhs = parseUnary();
            return n;
        }
        return parsePrimary();
    }
    NodePtr parsePrimary() {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Kind::Literal;
        const Token t = peek();
        if (symbol("(")) {
            auto inner = parseOr();
            if (!symbol(")")) fail("expected ')'");
            return inner;
        }
        if (t.kind == Token::Kind::Number) {
            ++index;
            const bool isReal = t.text.find_first_of(".eE") != std::string::npos;
            if (isReal) {
                double d = 0;
                auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
                if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail("bad number '" + t.text + "'");
                n->literal = FieldValue(d);
            } else {
                std::int64_t v = 0;
                auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
                if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail("bad number '" + t.text + "'");
                n->literal = FieldValue(v);
            }
            return n;
        }
        if (t.kind == Token::Kind::String) {
            ++index;
            n->literal = FieldValue(t.text);
            return n;
        }
        if (t.kind == Token::Kind::Ident) {
            ++index;
            if (t.text == "true" || t.text == "false") {
                n->literal = FieldValue(t.text == "true");
                return n;
            }
            if (t.text == "null") return n;
            n->kind = Expression::Node::Kind::Variable;
            if (t.text == "value") {
                n->op = "value";
                return n;
            }
            if (t.text != "attr" && t.text != "state" && t.text != "field") {
                throw ExpressionError("unknown variable '" + t.text + "' at offset " + std::to_string(t.pos));
            }
            n->op = t.text;
            if (!symbol(".") || peek().kind != Token::Kind::Ident) fail("expected '" + t.text + ".<name>'");
            n->name = tokens[index++].text;
            return n;
        }
        fail(t.kind == Token::Kind::End ? "unexpected end of expression" : "unexpected '" + t.text + "'");
    }

    std::vector<Token> tokens;
    size_t index = 0;
};

FieldValue lookup(const ValueMap* map, const std::string& name) {
    if (!map) return {};
    auto it = map->find(name);
    return it == map->end() ? FieldValue() : it->second;
}

bool truth(const FieldValue& v, const char* where) {
    if (v.type() != FieldType::Boolean) throw TypeError(std::string("operand of '") + where + "' is not boolean");
    return v.asBoolean();
}

FieldValue arithmetic(const std::string& op, const FieldValue& a, const FieldValue& b) {
    if (!a.isNumeric() || !b.isNumeric()) {
        if (op == "+" && a.type() == FieldType::String && b.type() == FieldType::String) {
            return FieldValue(a.asString() + b.asString());
        }
        throw TypeError("arithmetic '" + op + "' needs numeric operands");
    }
    if (op != "/" && a.type() == FieldType::Integer && b.type() == FieldType::Integer) {
        const std::int64_t x = a.asInteger(), y = b.asInteger();
        std::int64_t r = 0;
        bool overflow = op == "+" ? __builtin_add_overflow(x, y, &r)
            : op == "-"           ? __builtin_sub_overflow(x, y, &r)
                                  : __builtin_mul_overflow(x, y, &r);
        if (!overflow) return FieldValue(r);
    }
    const double x = a.asNumber(), y = b.asNumber();
    if (op == "+") return FieldValue(x + y);
    if (op == "-") return FieldValue(x - y);
    if (op == "*") return FieldValue(x * y);
    if (y == 0) throw TypeError("division by zero");
    return FieldValue(x / y);
}

FieldValue eval(const Expression::Node& n, const Scope& scope) {
    using Kind = Expression::Node::Kind;
    switch (n.kind) {
        case Kind::Literal: return n.literal;
        case Kind::Variable:
            if (n.op == "value") return scope.value;
            if (n.op == "attr") return lookup(scope.attributes, n.name);
            if (n.op == "state") return lookup(scope.state, n.name);
            return lookup(scope.fields, n.name);
        case Kind::Unary: {
            const FieldValue v = eval(*n.lhs, scope);
            if (n.op == "not") return FieldValue(!truth(v, "not"));
            if (v.type() == FieldType::Integer) return FieldValue(-v.asInteger());
            if (v.type() == FieldType::Number) return FieldValue(-v.asNumber());
            throw TypeError("unary '-' needs a numeric operand");
        }
        case Kind::Binary: break;
    }
    if (n.op == "and") {
        return FieldValue(truth(eval(*n.lhs, scope), "and") && truth(eval(*n.rhs, scope), "and"));
    }
    if (n.op == "or") {
        return FieldValue(truth(eval(*n.lhs, scope), "or") || truth(eval(*n.rhs, scope), "or"));
    }
    const FieldValue a = eval(*n.lhs, scope);
    const FieldValue b = eval(*n.rhs, scope);
    if (n.op == "+" || n.op == "-" || n.op == "*" || n.op == "/") return arithmetic(n.op, a, b);
    if (a.isNull() || b.isNull()) {
        if (n.op == "==") return FieldValue(a.isNull() && b.isNull());
        if (n.op == "!=") return FieldValue(!(a.isNull() && b.isNull()));
        return FieldValue(false);
    }
    const auto ord = event::compareValues(a, b);
    if (n.op == "==") return FieldValue(ord == 0);
    if (n.op == "!=") return FieldValue(ord != 0);
    if (n.op == "<") return FieldValue(ord < 0);
    if (n.op == "<=") return FieldValue(ord <= 0);
    if (n.op == ">") return FieldValue(ord > 0);
    return FieldValue(ord >= 0);
}

void collect(const Expression::Node* n, std::vector<std::string>& out) {
    if (!n) return;
    if (n->kind == Expression::Node::Kind::Variable) {
        out.push_back(n->op == "value" ? n->op : n->op + "." + n->name);
    }
    collect(n->lhs.get(), out);
    collect(n->rhs.get(), out);
}

}// namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.source = text;
    e.root = Parser(text).parse();
    return e;
}

FieldValue Expression::evaluate(const Scope& scope) const { return eval(*root, scope); }

bool Expression::test(const Scope& scope) const { return truth(evaluate(scope), "guard"); }

std::vector<std::string> Expression::variables() const {
    std::vector<std::string> out;
    collect(root.get(), out);
    return out;
}

}// namespace atmosphere::agent
