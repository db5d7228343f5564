#pragma once

// ISO 10303-21 (STEP Part 21) reading: token stream, instance model, parser.
// The entity subset needed for sheet-metal B-reps is resolved downstream;
// everything else is kept as opaque instances.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bendgraph/core.hpp"

namespace bendgraph::step {

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int col)
        : Error("STEP parse error at " + std::to_string(line) + ":" +
                std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    int line, col;
};

// One attribute value of an instance record.
struct Value {
    enum class Kind { Unset, Derived, Int, Real, Str, Enum, Ref, List };
    Kind kind = Kind::Unset;
    double real = 0;
    long long integer = 0;
    std::string text;          // Str payload or Enum token without dots
    std::vector<Value> list;

    static Value unset() { return {}; }
    static Value derived() { Value v; v.kind = Kind::Derived; return v; }
    static Value of_int(long long i) {
        Value v; v.kind = Kind::Int; v.integer = i; v.real = double(i); return v;
    }
    static Value of_real(double d) { Value v; v.kind = Kind::Real; v.real = d; return v; }
    static Value of_str(std::string s) { Value v; v.kind = Kind::Str; v.text = std::move(s); return v; }
    static Value of_enum(std::string s) { Value v; v.kind = Kind::Enum; v.text = std::move(s); return v; }
    static Value of_ref(long long id) { Value v; v.kind = Kind::Ref; v.integer = id; return v; }
    static Value of_list(std::vector<Value> xs) {
        Value v; v.kind = Kind::List; v.list = std::move(xs); return v;
    }

    bool is_number() const { return kind == Kind::Int || kind == Kind::Real; }
    double as_real() const {
        if (!is_number()) throw Error("STEP value is not a number");
        return kind == Kind::Int ? double(integer) : real;
    }
    long long as_int() const {
        if (kind != Kind::Int) throw Error("STEP value is not an integer");
        return integer;
    }
    long long as_ref() const {
        if (kind != Kind::Ref) throw Error("STEP value is not a reference");
        return integer;
    }
    const std::string& as_str() const {
        if (kind != Kind::Str) throw Error("STEP value is not a string");
        return text;
    }
    bool as_bool() const {
        if (kind == Kind::Enum) {
            if (text == "T") return true;
            if (text == "F") return false;
        }
        throw Error("STEP value is not a boolean enum");
    }
    const std::vector<Value>& as_list() const {
        if (kind != Kind::List) throw Error("STEP value is not a list");
        return list;
    }
};

struct StepInstance {
    long long id = 0;
    std::string entity_type;    // uppercase keyword
    std::vector<Value> args;    // source order
};

struct StepHeader {
    std::string description;
    std::string name;
    std::string schema;
};

struct StepModel {
    StepHeader header;
    std::map<long long, StepInstance> instances;

    const StepInstance& at(long long id) const {
        auto it = instances.find(id);
        if (it == instances.end())
            throw Error("dangling STEP reference #" + std::to_string(id));
        return it->second;
    }
    std::vector<const StepInstance*> of_type(std::string_view type) const {
        std::vector<const StepInstance*> out;
        for (const auto& [id, inst] : instances)
            if (inst.entity_type == type) out.push_back(&inst);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    enum class Kind {
        Ref, Int, Real, Str, Enum, Keyword, Unset, Derived,
        LParen, RParen, Comma, Semicolon, Equals, End
    };
    Kind kind;
    std::string text;
    long long integer = 0;
    double real = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) { t.kind = Token::Kind::End; return t; }
        char c = src_[pos_];
        switch (c) {
            case '(': advance(); t.kind = Token::Kind::LParen; return t;
            case ')': advance(); t.kind = Token::Kind::RParen; return t;
            case ',': advance(); t.kind = Token::Kind::Comma; return t;
            case ';': advance(); t.kind = Token::Kind::Semicolon; return t;
            case '=': advance(); t.kind = Token::Kind::Equals; return t;
            case '$': advance(); t.kind = Token::Kind::Unset; return t;
            case '*': advance(); t.kind = Token::Kind::Derived; return t;
            case '#': return lex_ref(t);
            case '\'': return lex_string(t);
            case '.': return lex_enum_or_number(t);
            default:
                if (c == '+' || c == '-' || std::isdigit((unsigned char)c))
                    return lex_number(t);
                if (std::isalpha((unsigned char)c) || c == '_')
                    return lex_keyword(t);
                fail(std::string("unexpected character '") + c + "'");
        }
        return t;  // unreachable
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, col_);
    }

private:
    void advance() {
        if (src_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                advance(); advance();
                while (pos_ < src_.size() &&
                       !(src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/'))
                    advance();
                if (pos_ >= src_.size()) fail("unterminated comment");
                advance(); advance();
            } else if (std::isspace((unsigned char)c)) {
                advance();
            } else {
                break;
            }
        }
    }

    Token lex_ref(Token t) {
        advance();  // '#'
        if (pos_ >= src_.size() || !std::isdigit((unsigned char)src_[pos_]))
            fail("expected instance id after '#'");
        long long id = 0;
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) {
            id = id * 10 + (src_[pos_] - '0');
            advance();
        }
        t.kind = Token::Kind::Ref;
        t.integer = id;
        return t;
    }

    Token lex_string(Token t) {
        advance();  // opening quote
        std::string out;
        while (true) {
            if (pos_ >= src_.size()) fail("unterminated string");
            char c = src_[pos_];
            if (c == '\'') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
                    out.push_back('\'');
                    advance(); advance();
                    continue;
                }
                advance();
                break;
            }
            // \X\, \S\ and similar directives are retained verbatim.
            out.push_back(c);
            advance();
        }
        t.kind = Token::Kind::Str;
        t.text = std::move(out);
        return t;
    }

    Token lex_enum_or_number(Token t) {
        // '.' can open an enum token (.T.) or a real like .5 — Part 21 reals
        // always carry a leading digit, so '.' means enum here.
        advance();
        std::string name;
        while (pos_ < src_.size() && src_[pos_] != '.') {
            char c = src_[pos_];
            if (!std::isalnum((unsigned char)c) && c != '_')
                fail("malformed enumeration token");
            name.push_back(c);
            advance();
        }
        if (pos_ >= src_.size()) fail("unterminated enumeration token");
        advance();  // closing '.'
        t.kind = Token::Kind::Enum;
        t.text = std::move(name);
        return t;
    }

    Token lex_number(Token t) {
        size_t start = pos_;
        bool is_real = false;
        if (src_[pos_] == '+' || src_[pos_] == '-') advance();
        if (pos_ >= src_.size() || !std::isdigit((unsigned char)src_[pos_]))
            fail("malformed number");
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) advance();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            is_real = true;
            advance();
            while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            is_real = true;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            if (pos_ >= src_.size() || !std::isdigit((unsigned char)src_[pos_]))
                fail("malformed exponent");
            while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) advance();
        }
        std::string_view text = src_.substr(start, pos_ - start);
        if (is_real) {
            t.kind = Token::Kind::Real;
            t.real = std::strtod(std::string(text).c_str(), nullptr);
        } else {
            t.kind = Token::Kind::Int;
            t.integer = std::strtoll(std::string(text).c_str(), nullptr, 10);
        }
        return t;
    }

    Token lex_keyword(Token t) {
        std::string name;
        while (pos_ < src_.size() &&
               (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_' ||
                src_[pos_] == '-')) {
            name.push_back(char(std::toupper((unsigned char)src_[pos_])));
            advance();
        }
        t.kind = Token::Kind::Keyword;
        t.text = std::move(name);
        return t;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { shift(); }

    StepModel parse() {
        expect_keyword("ISO-10303-21");
        expect(detail::Token::Kind::Semicolon);
        expect_keyword("HEADER");
        expect(detail::Token::Kind::Semicolon);
        parse_header();
        expect_keyword("DATA");
        expect(detail::Token::Kind::Semicolon);
        parse_data();
        expect_keyword("END-ISO-10303-21");
        expect(detail::Token::Kind::Semicolon);
        check_references();
        return std::move(model_);
    }

private:
    using Tok = detail::Token;

    void shift() { cur_ = lex_.next(); }

    void expect(Tok::Kind kind) {
        if (cur_.kind != kind) lex_.fail("unexpected token");
        shift();
    }

    void expect_keyword(const std::string& kw) {
        if (cur_.kind != Tok::Kind::Keyword || cur_.text != kw)
            lex_.fail("expected " + kw);
        shift();
    }

    void parse_header() {
        while (!(cur_.kind == Tok::Kind::Keyword && cur_.text == "ENDSEC")) {
            if (cur_.kind != Tok::Kind::Keyword) lex_.fail("expected header entity");
            std::string kw = cur_.text;
            shift();
            Value args = parse_value_list();
            expect(Tok::Kind::Semicolon);
            if (kw == "FILE_DESCRIPTION" && !args.list.empty() &&
                args.list[0].kind == Value::Kind::List && !args.list[0].list.empty())
                model_.header.description = args.list[0].list[0].text;
            else if (kw == "FILE_NAME" && !args.list.empty())
                model_.header.name = args.list[0].text;
            else if (kw == "FILE_SCHEMA" && !args.list.empty() &&
                     args.list[0].kind == Value::Kind::List && !args.list[0].list.empty())
                model_.header.schema = args.list[0].list[0].text;
        }
        shift();  // ENDSEC
        expect(Tok::Kind::Semicolon);
    }

    void parse_data() {
        while (!(cur_.kind == Tok::Kind::Keyword && cur_.text == "ENDSEC")) {
            if (cur_.kind != Tok::Kind::Ref) lex_.fail("expected instance definition");
            long long id = cur_.integer;
            int line = cur_.line, col = cur_.col;
            shift();
            expect(Tok::Kind::Equals);
            if (cur_.kind == Tok::Kind::LParen)
                throw ParseError("complex (multi-type) instance #" + std::to_string(id) +
                                 " is not supported", cur_.line, cur_.col);
            if (cur_.kind != Tok::Kind::Keyword) lex_.fail("expected entity keyword");
            StepInstance inst;
            inst.id = id;
            inst.entity_type = cur_.text;
            shift();
            inst.args = parse_value_list().list;
            expect(Tok::Kind::Semicolon);
            if (model_.instances.count(id))
                throw ParseError("duplicate instance id #" + std::to_string(id), line, col);
            model_.instances.emplace(id, std::move(inst));
        }
        shift();  // ENDSEC
        expect(Tok::Kind::Semicolon);
    }

    Value parse_value_list() {
        expect(Tok::Kind::LParen);
        std::vector<Value> items;
        if (cur_.kind != Tok::Kind::RParen) {
            items.push_back(parse_value());
            while (cur_.kind == Tok::Kind::Comma) {
                shift();
                items.push_back(parse_value());
            }
        }
        expect(Tok::Kind::RParen);
        return Value::of_list(std::move(items));
    }

    Value parse_value() {
        switch (cur_.kind) {
            case Tok::Kind::Unset: shift(); return Value::unset();
            case Tok::Kind::Derived: shift(); return Value::derived();
            case Tok::Kind::Int: { auto v = Value::of_int(cur_.integer); shift(); return v; }
            case Tok::Kind::Real: { auto v = Value::of_real(cur_.real); shift(); return v; }
            case Tok::Kind::Str: { auto v = Value::of_str(cur_.text); shift(); return v; }
            case Tok::Kind::Enum: { auto v = Value::of_enum(cur_.text); shift(); return v; }
            case Tok::Kind::Ref: { auto v = Value::of_ref(cur_.integer); shift(); return v; }
            case Tok::Kind::LParen: return parse_value_list();
            case Tok::Kind::Keyword: {
                // Typed value, e.g. PARAMETER_VALUE(1.0) — unwrap the payload.
                shift();
                Value inner = parse_value_list();
                return inner.list.size() == 1 ? inner.list[0] : inner;
            }
            default:
                lex_.fail("unexpected token in value position");
        }
    }

    void check_references() const {
        for (const auto& [id, inst] : model_.instances)
            for (const Value& v : inst.args) check_value(v);
    }

    void check_value(const Value& v) const {
        if (v.kind == Value::Kind::Ref && !model_.instances.count(v.integer))
            throw Error("dangling STEP reference #" + std::to_string(v.integer));
        if (v.kind == Value::Kind::List)
            for (const Value& c : v.list) check_value(c);
    }

    detail::Lexer lex_;
    detail::Token cur_;
    StepModel model_;
};

inline StepModel parse_step(std::string_view text) {
    return Parser(text).parse();
}

}  // namespace bendgraph::step
