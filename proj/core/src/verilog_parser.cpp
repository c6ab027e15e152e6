// Recursive-descent parser for the accepted Verilog subset, lowering straight
// to WordNetlist operators.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>

#include "rtlt/word_netlist.hpp"

namespace rtlt {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 0;
    int col = 0;
};

const std::set<std::string, std::less<>> kUnsupportedKeywords = {
    "parameter", "localparam", "generate", "endgenerate", "genvar",   "integer", "initial", "function",
    "task",      "inout",      "supply0",  "supply1",     "defparam", "specify", "real",    "time",
    "signed",    "for",        "while",    "repeat",      "forever",  "case",    "casez",   "casex",
    "realtime",  "tri",        "wand",     "wor",         "event",    "fork",    "assert",  "always_ff",
    "always_comb", "logic",    "interface", "package",    "typedef",  "struct",  "enum",    "primitive",
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '$'))
                    t.text += advance();
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
                t.kind = Tok::Number;
                lex_number(t);
            } else if (c == '\\') {
                throw FrontendError::unsupported("escaped identifier", line_);
            } else if (c == '`') {
                lex_directive();
                continue;
            } else if (c == '$') {
                throw FrontendError::unsupported("system task", line_);
            } else {
                t.kind = Tok::Punct;
                static const char* kMulti[] = {"<=", ">=", "==", "!=", "===", "!==", "&&", "||", "~^", "^~",
                                               "<<", ">>", "~&", "~|", "+:", "-:", "**"};
                std::string best(1, c);
                for (const char* m : kMulti) {
                    const std::string_view mv(m);
                    if (src_.substr(pos_, mv.size()) == mv && mv.size() > best.size()) best = std::string(mv);
                }
                for (std::size_t i = 0; i < best.size(); ++i) advance();
                t.text = best;
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (src_.substr(pos_, 2) == "/*") {
                const int l = line_, cl = col_;
                advance();
                advance();
                while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
                if (pos_ >= src_.size()) throw FrontendError::syntax("unterminated block comment", l, cl);
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    void lex_directive() {
        const int l = line_;
        std::string word;
        advance();
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) word += advance();
        if (word != "timescale") throw FrontendError::unsupported("`" + word, l);
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
    }

    void lex_number(Token& t) {
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            t.text += advance();
        if (pos_ < src_.size() && src_[pos_] == '\'') {
            t.text += advance();
            if (pos_ < src_.size() && (src_[pos_] == 's' || src_[pos_] == 'S'))
                throw FrontendError::unsupported("signed literal", line_);
            if (pos_ >= src_.size()) throw FrontendError::syntax("truncated literal", t.line, t.col);
            t.text += advance();  // base
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '?'))
                t.text += advance();
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Literals
// ---------------------------------------------------------------------------

struct Literal {
    std::vector<bool> bits;  // LSB first, minimal length >= 1 when unsized
    bool sized = false;
};

Literal parse_literal(const Token& t) {
    std::string text;
    for (char c : t.text)
        if (c != '_') text += c;
    Literal lit;
    const auto tick = text.find('\'');
    if (tick == std::string::npos) {
        // plain decimal
        std::vector<int> dec;
        for (char c : text) dec.push_back(c - '0');
        // repeated halving to binary
        while (!(dec.empty() || (dec.size() == 1 && dec[0] == 0))) {
            int rem = 0;
            std::vector<int> next;
            for (int d : dec) {
                const int cur = rem * 10 + d;
                if (!next.empty() || cur / 2 != 0) next.push_back(cur / 2);
                rem = cur % 2;
            }
            lit.bits.push_back(rem != 0);
            dec = std::move(next);
        }
        if (lit.bits.empty()) lit.bits.push_back(false);
        return lit;
    }
    int size = 0;
    if (tick > 0) {
        size = std::stoi(text.substr(0, tick));
        if (size <= 0) throw FrontendError::syntax("literal size must be positive", t.line, t.col);
        lit.sized = true;
    }
    const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text.at(tick + 1))));
    const std::string digits = text.substr(tick + 2);
    if (digits.empty()) throw FrontendError::syntax("literal without digits", t.line, t.col);
    std::vector<bool> bits;
    auto push_digit = [&](int value, int nbits) {
        // prepend nbits of value (MSB side grows as we read left to right)
        std::vector<bool> chunk;
        for (int i = 0; i < nbits; ++i) chunk.push_back(((value >> i) & 1) != 0);
        bits.insert(bits.begin(), chunk.begin(), chunk.end());
    };
    if (base == 'd') {
        Token dec{Tok::Number, digits, t.line, t.col};
        if (digits.find_first_not_of("0123456789") != std::string::npos)
            throw FrontendError::unsupported("x/z literal digits", t.line);
        bits = parse_literal(dec).bits;
    } else {
        const int per = base == 'b' ? 1 : base == 'o' ? 3 : base == 'h' ? 4 : 0;
        if (per == 0) throw FrontendError::syntax(std::string("unknown literal base '") + base + "'", t.line, t.col);
        for (char c : digits) {
            const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (lc == 'x' || lc == 'z' || lc == '?') throw FrontendError::unsupported("x/z literal digits", t.line);
            int v = -1;
            if (lc >= '0' && lc <= '9') v = lc - '0';
            if (lc >= 'a' && lc <= 'f') v = lc - 'a' + 10;
            if (v < 0 || v >= (1 << per)) throw FrontendError::syntax("bad digit in literal", t.line, t.col);
            push_digit(v, per);
        }
    }
    // strip leading zeros down to minimal length
    while (bits.size() > 1 && !bits.back()) bits.pop_back();
    if (bits.empty()) bits.push_back(false);
    if (lit.sized) {
        if (static_cast<int>(bits.size()) > size && !(bits.size() == 1 && !bits[0]))
            throw FrontendError::width_mismatch(t.text, size, static_cast<int>(bits.size()), t.line);
        bits.resize(static_cast<std::size_t>(size), false);
    }
    lit.bits = std::move(bits);
    return lit;
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Ident, ConstSlice, DynIndex, Number, Not, Binary, Ternary, Concat } kind = Kind::Ident;
    std::string name;     // Ident/ConstSlice/DynIndex
    int msb = 0, lsb = 0;  // ConstSlice (normalized)
    std::string op;        // Binary
    Literal lit;           // Number
    std::vector<ExprPtr> kids;
    int line = 0, col = 0;
};

struct SigDecl {
    int width = 1;
    int offset = 0;  // declared lsb
    bool is_reg = false;
    bool has_range = false;
    std::optional<PortDir> dir;
    int line = 0, col = 0;
    std::size_t order = 0;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::string_view file) : toks_(std::move(toks)), file_(file) {}

    WordNetlist run() {
        parse_module();
        return build();
    }

private:
    // --- token helpers -----------------------------------------------------
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(std::string_view text) const {
        const auto& t = peek();
        return (t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == text;
    }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& what) const {
        const auto& t = peek();
        throw FrontendError::syntax(what + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"),
                                    t.line, t.col);
    }
    void expect(std::string_view text) {
        if (!at(text)) fail("expected '" + std::string(text) + "'");
        next();
    }
    const Token& expect_ident() {
        if (peek().kind != Tok::Ident) fail("expected identifier");
        check_keyword(peek());
        return next();
    }
    static void check_keyword(const Token& t) {
        if (t.kind == Tok::Ident && kUnsupportedKeywords.count(t.text)) throw FrontendError::unsupported(t.text, t.line);
    }
    int expect_int() {
        if (peek().kind != Tok::Number) fail("expected integer");
        const Token& t = next();
        const Literal lit = parse_literal(t);
        if (lit.bits.size() > 30) throw FrontendError::syntax("index too large", t.line, t.col);
        int v = 0;
        for (std::size_t i = 0; i < lit.bits.size(); ++i) v |= (lit.bits[i] ? 1 : 0) << i;
        return v;
    }

    // --- declarations ------------------------------------------------------
    SigDecl& declare(const Token& name, std::optional<std::pair<int, int>> range, bool is_reg,
                     std::optional<PortDir> dir) {
        auto [it, fresh] = decls_.try_emplace(name.text);
        SigDecl& d = it->second;
        if (fresh) {
            d.order = decl_order_++;
            d.line = name.line;
            d.col = name.col;
        }
        if (range) {
            const int width = range->first - range->second + 1;
            if (d.has_range && (width != d.width || range->second != d.offset))
                throw FrontendError::width_mismatch(name.text, d.width, width, name.line);
            d.width = width;
            d.offset = range->second;
            d.has_range = true;
        }
        if (is_reg) d.is_reg = true;
        if (dir) {
            if (d.dir && *d.dir != *dir) throw FrontendError::syntax("conflicting port direction", name.line, name.col);
            d.dir = dir;
        }
        return d;
    }

    std::optional<std::pair<int, int>> parse_range() {
        if (!at("[")) return std::nullopt;
        const int line = peek().line;
        next();
        const int msb = expect_int();
        expect(":");
        const int lsb = expect_int();
        expect("]");
        if (msb < lsb) throw FrontendError::unsupported("ascending range", line);
        return std::make_pair(msb, lsb);
    }

    void parse_module() {
        if (!at("module")) fail("expected 'module'");
        next();
        name_ = expect_ident().text;
        if (at("#")) throw FrontendError::unsupported("parameter", peek().line);
        if (at("(")) {
            next();
            if (!at(")")) {
                if (at("input") || at("output") || at("inout")) {
                    parse_ansi_ports();
                } else {
                    while (true) {
                        const Token& t = expect_ident();
                        port_order_.push_back(t.text);
                        if (at(",")) {
                            next();
                            continue;
                        }
                        break;
                    }
                }
            }
            expect(")");
        }
        expect(";");
        while (!at("endmodule")) {
            if (peek().kind == Tok::End) fail("missing 'endmodule'");
            parse_item();
        }
        next();
        if (peek().kind != Tok::End) {
            if (at("module")) throw FrontendError::unsupported("multiple modules", peek().line);
            fail("unexpected text after 'endmodule'");
        }
    }

    void parse_ansi_ports() {
        std::optional<PortDir> dir;
        bool is_reg = false;
        std::optional<std::pair<int, int>> range;
        while (true) {
            if (at("input") || at("output") || at("inout")) {
                if (at("inout")) throw FrontendError::unsupported("inout", peek().line);
                dir = at("input") ? PortDir::In : PortDir::Out;
                next();
                is_reg = false;
                if (at("wire")) next();
                if (at("reg")) {
                    is_reg = true;
                    next();
                }
                check_keyword(peek());
                range = parse_range();
            }
            const Token& t = expect_ident();
            if (at("[")) throw FrontendError::unsupported("memory", t.line);
            declare(t, range, is_reg, dir);
            port_order_.push_back(t.text);
            if (!at(",")) break;
            next();
        }
    }

    void parse_item() {
        const Token& t = peek();
        check_keyword(t);
        if (t.kind != Tok::Ident) fail("expected module item");
        if (t.text == "input" || t.text == "output" || t.text == "wire" || t.text == "reg") {
            parse_declaration();
        } else if (t.text == "assign") {
            parse_assign();
        } else if (t.text == "always") {
            parse_always();
        } else if (peek(1).kind == Tok::Ident || at("#") || peek(1).text == "#") {
            throw FrontendError::unsupported("module instantiation", t.line);
        } else {
            fail("expected module item");
        }
    }

    void parse_declaration() {
        std::optional<PortDir> dir;
        bool is_reg = false;
        const Token& kw = next();
        if (kw.text == "input" || kw.text == "output") {
            dir = kw.text == "input" ? PortDir::In : PortDir::Out;
            if (at("wire")) next();
            if (at("reg")) {
                is_reg = true;
                next();
            }
        } else if (kw.text == "reg") {
            is_reg = true;
        }
        check_keyword(peek());
        const auto range = parse_range();
        while (true) {
            const Token& t = expect_ident();
            if (at("[")) throw FrontendError::unsupported("memory", t.line);
            declare(t, range, is_reg, dir);
            if (at("=")) {
                if (is_reg) throw FrontendError::unsupported("reg initializer", t.line);
                next();
                assigns_.push_back({t, parse_expr()});
            }
            if (!at(",")) break;
            next();
        }
        expect(";");
    }

    void parse_assign() {
        next();
        while (true) {
            const Token& t = expect_ident();
            if (at("[")) throw FrontendError::unsupported("partial assignment", t.line);
            expect("=");
            assigns_.push_back({t, parse_expr()});
            if (!at(",")) break;
            next();
        }
        expect(";");
    }

    void parse_always() {
        const int line = next().line;
        expect("@");
        if (at("*")) throw FrontendError::unsupported("combinational always", line);
        expect("(");
        if (at("*")) throw FrontendError::unsupported("combinational always", line);
        if (at("negedge")) throw FrontendError::unsupported("negedge clock", line);
        if (!at("posedge")) throw FrontendError::unsupported("combinational always", line);
        next();
        const Token& clk = expect_ident();
        if (at("or") || at(",")) throw FrontendError::unsupported("asynchronous reset", line);
        expect(")");
        if (clock_.empty()) {
            clock_ = clk.text;
        } else if (clock_ != clk.text) {
            throw FrontendError::unsupported("multiple clocks", line);
        }
        Env env;
        parse_stmt(env);
        for (auto& [reg, e] : env) {
            if (next_state_.count(reg))
                throw FrontendError(FrontendErrorKind::MultipleDrivers, "register '" + reg + "' assigned in two blocks",
                                    e->line);
            next_state_[reg] = e;
        }
    }

    using Env = std::map<std::string, ExprPtr>;

    ExprPtr current(const Env& env, const std::string& reg, int line, int col) {
        if (const auto it = env.find(reg); it != env.end()) return it->second;
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Ident;
        e->name = reg;
        e->line = line;
        e->col = col;
        return e;
    }

    void parse_stmt(Env& env) {
        const Token& t = peek();
        check_keyword(t);
        if (at("begin")) {
            next();
            if (at(":")) {
                next();
                expect_ident();
            }
            while (!at("end")) {
                if (peek().kind == Tok::End) fail("missing 'end'");
                parse_stmt(env);
            }
            next();
        } else if (at("if")) {
            next();
            expect("(");
            ExprPtr cond = parse_expr();
            expect(")");
            Env then_env = env, else_env = env;
            parse_stmt(then_env);
            if (at("else")) {
                next();
                parse_stmt(else_env);
            }
            std::set<std::string> touched;
            for (const auto& [k, v] : then_env) touched.insert(k);
            for (const auto& [k, v] : else_env) touched.insert(k);
            for (const auto& reg : touched) {
                ExprPtr a = current(then_env, reg, t.line, t.col);
                ExprPtr b = current(else_env, reg, t.line, t.col);
                if (a == b) {
                    env[reg] = a;
                    continue;
                }
                auto m = std::make_shared<Expr>();
                m->kind = Expr::Kind::Ternary;
                m->kids = {cond, a, b};
                m->line = t.line;
                m->col = t.col;
                env[reg] = m;
            }
        } else if (at(";")) {
            next();
        } else if (t.kind == Tok::Ident) {
            const Token& lhs = next();
            if (at("[")) throw FrontendError::unsupported("partial register assignment", lhs.line);
            if (at("=")) throw FrontendError::unsupported("blocking assignment", lhs.line);
            expect("<=");
            ExprPtr rhs = parse_expr();
            expect(";");
            reg_lines_.try_emplace(lhs.text, lhs.line);
            env[lhs.text] = rhs;
        } else {
            fail("expected statement");
        }
    }

    // --- expressions ------------------------------------------------------
    std::shared_ptr<Expr> make(Expr::Kind k, const Token& at_tok) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->line = at_tok.line;
        e->col = at_tok.col;
        return e;
    }

    ExprPtr parse_expr() {
        ExprPtr cond = parse_binary(0);
        if (at("?")) {
            const Token& q = next();
            ExprPtr a = parse_expr();
            expect(":");
            ExprPtr b = parse_expr();
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Ternary;
            e->kids = {cond, a, b};
            e->line = q.line;
            e->col = q.col;
            return e;
        }
        return cond;
    }

    // precedence levels, low to high: | ^ & == < + -
    static int precedence(std::string_view op) {
        if (op == "|") return 1;
        if (op == "^") return 2;
        if (op == "&") return 3;
        if (op == "==") return 4;
        if (op == "<") return 5;
        if (op == "+" || op == "-") return 6;
        return -1;
    }
    static bool is_rejected_binary(std::string_view op) {
        static const std::set<std::string, std::less<>> rejected = {
            "||", "&&", "!=", "===", "!==", "<=", ">", ">=", "<<", ">>", "*", "/", "%", "**", "~^", "^~"};
        return rejected.count(op) > 0;
    }

    ExprPtr parse_binary(int min_prec) {
        ExprPtr lhs = parse_unary();
        while (true) {
            const Token& t = peek();
            if (t.kind != Tok::Punct) break;
            if (is_rejected_binary(t.text)) throw FrontendError::unsupported("operator " + t.text, t.line);
            const int p = precedence(t.text);
            if (p < 0 || p < min_prec) break;
            next();
            ExprPtr rhs = parse_binary(p + 1);
            auto e = make(Expr::Kind::Binary, t);
            e->op = t.text;
            e->kids = {lhs, rhs};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        const Token& t = peek();
        if (t.kind == Tok::Punct) {
            if (t.text == "~") {
                next();
                auto e = make(Expr::Kind::Not, t);
                e->kids = {parse_unary()};
                return e;
            }
            if (t.text == "!" || t.text == "-" || t.text == "&" || t.text == "|" || t.text == "^" || t.text == "~&" ||
                t.text == "~|" || t.text == "~^" || t.text == "^~" || t.text == "+")
                throw FrontendError::unsupported("unary operator " + t.text, t.line);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            next();
            auto e = make(Expr::Kind::Number, t);
            e->lit = parse_literal(t);
            return e;
        }
        if (at("(")) {
            next();
            ExprPtr e = parse_expr();
            expect(")");
            return e;
        }
        if (at("{")) {
            next();
            auto e = make(Expr::Kind::Concat, t);
            while (true) {
                ExprPtr item = parse_expr();
                if (at("{")) throw FrontendError::unsupported("replication", t.line);
                e->kids.push_back(item);
                if (!at(",")) break;
                next();
            }
            expect("}");
            return e;
        }
        if (t.kind == Tok::Ident) {
            check_keyword(t);
            const Token& id = next();
            if (at("(")) throw FrontendError::unsupported("function call", id.line);
            if (!at("[")) {
                auto e = make(Expr::Kind::Ident, id);
                e->name = id.text;
                return e;
            }
            next();
            if (peek().kind == Tok::Number && (peek(1).text == "]" || peek(1).text == ":")) {
                const int hi = expect_int();
                int lo = hi;
                if (at(":")) {
                    next();
                    lo = expect_int();
                }
                if (at("+:") || at("-:")) throw FrontendError::unsupported("indexed part-select", id.line);
                expect("]");
                auto e = make(Expr::Kind::ConstSlice, id);
                e->name = id.text;
                e->msb = hi;
                e->lsb = lo;
                return e;
            }
            ExprPtr sel = parse_expr();
            if (at(":") || at("+:") || at("-:")) throw FrontendError::unsupported("variable part-select", id.line);
            expect("]");
            auto e = make(Expr::Kind::DynIndex, id);
            e->name = id.text;
            e->kids = {sel};
            return e;
        }
        fail("expected expression");
    }

    // --- elaboration -------------------------------------------------------
    const SigDecl& decl_of(const std::string& name, int line, int col) const {
        const auto it = decls_.find(name);
        if (it == decls_.end()) throw FrontendError::syntax("undeclared signal '" + name + "'", line, col);
        return it->second;
    }

    SignalSlice const_slice(const Expr& e) const {
        const SigDecl& d = decl_of(e.name, e.line, e.col);
        if (e.kind == Expr::Kind::Ident) return SignalSlice{e.name, d.width - 1, 0};
        const int hi = e.msb - d.offset, lo = e.lsb - d.offset;
        if (hi < lo) throw FrontendError::unsupported("reversed part-select", e.line);
        if (lo < 0 || hi >= d.width)
            throw FrontendError(FrontendErrorKind::WidthMismatch,
                                "select [" + std::to_string(e.msb) + ":" + std::to_string(e.lsb) + "] outside '" +
                                    e.name + "'",
                                e.line, e.col);
        return SignalSlice{e.name, hi, lo};
    }

    std::optional<int> self_width(const Expr& e) const {
        switch (e.kind) {
            case Expr::Kind::Ident:
            case Expr::Kind::ConstSlice:
                return const_slice(e).width();
            case Expr::Kind::DynIndex:
                return 1;
            case Expr::Kind::Number:
                if (e.lit.sized) return static_cast<int>(e.lit.bits.size());
                return std::nullopt;
            case Expr::Kind::Not:
                return self_width(*e.kids[0]);
            case Expr::Kind::Binary: {
                if (e.op == "==" || e.op == "<") return 1;
                auto l = self_width(*e.kids[0]);
                return l ? l : self_width(*e.kids[1]);
            }
            case Expr::Kind::Ternary: {
                auto l = self_width(*e.kids[1]);
                return l ? l : self_width(*e.kids[2]);
            }
            case Expr::Kind::Concat: {
                int total = 0;
                for (const auto& k : e.kids) {
                    auto w = self_width(*k);
                    if (!w) throw FrontendError::unsupported("unsized literal in concatenation", k->line);
                    total += *w;
                }
                return total;
            }
        }
        return std::nullopt;
    }

    std::string new_temp(int width) {
        std::string name = "$t" + std::to_string(temp_counter_++);
        temps_.push_back(Signal{name, width, SignalKind::Wire});
        return name;
    }

    SignalSlice emit(WordOpKind kind, std::vector<SignalSlice> inputs, int width, const std::optional<std::string>& dest,
                     std::string value = {}) {
        const std::string out = dest ? *dest : new_temp(width);
        WordOp op;
        op.kind = kind;
        op.inputs = std::move(inputs);
        op.output = SignalSlice{out, width - 1, 0};
        op.value = std::move(value);
        ops_.push_back(std::move(op));
        return ops_.back().output;
    }

    SignalSlice zero_bit() {
        if (!zero_) zero_ = emit(WordOpKind::Const, {}, 1, std::nullopt, "0");
        return *zero_;
    }

    /// Lowers `e` to a value of exactly `width` bits; writes it to `dest` when given.
    SignalSlice lower(const ExprPtr& ep, int width, const std::optional<std::string>& dest) {
        const Expr& e = *ep;
        if (!dest) {
            if (const auto it = cache_.find({ep.get(), width}); it != cache_.end()) return it->second;
        }
        SignalSlice result = lower_uncached(e, width, dest);
        if (!dest) cache_[{ep.get(), width}] = result;
        return result;
    }

    void require_width(const Expr& e, int expected, int actual) const {
        if (expected != actual) {
            const std::string what = e.name.empty() ? "expression" : e.name;
            throw FrontendError::width_mismatch(what, expected, actual, e.line);
        }
    }

    SignalSlice lower_uncached(const Expr& e, int width, const std::optional<std::string>& dest) {
        switch (e.kind) {
            case Expr::Kind::Ident:
            case Expr::Kind::ConstSlice: {
                const SignalSlice s = const_slice(e);
                require_width(e, width, s.width());
                if (!dest) return s;
                return emit(WordOpKind::Slice, {s}, width, dest);
            }
            case Expr::Kind::DynIndex: {
                require_width(e, width, 1);
                const SigDecl& d = decl_of(e.name, e.line, e.col);
                const int sel_width = self_width(*e.kids[0]).value_or(0);
                if (sel_width <= 0 || sel_width > 20) throw FrontendError::unsupported("index select width", e.line);
                const SignalSlice sel = lower(e.kids[0], sel_width, std::nullopt);
                std::vector<std::optional<SignalSlice>> items;
                for (int i = 0; i < d.width && i < (1 << sel_width); ++i) items.push_back(SignalSlice{e.name, i, i});
                for (int k = 0; k < sel_width; ++k) {
                    std::vector<std::optional<SignalSlice>> up;
                    for (std::size_t j = 0; j < items.size(); j += 2) {
                        const auto lo = items[j];
                        const auto hi = j + 1 < items.size() ? items[j + 1] : std::nullopt;
                        if (!lo && !hi) {
                            up.push_back(std::nullopt);
                            continue;
                        }
                        const SignalSlice bit{sel.signal, sel.lsb + k, sel.lsb + k};
                        const SignalSlice a = hi ? *hi : zero_bit();
                        const SignalSlice b = lo ? *lo : zero_bit();
                        const bool last = k + 1 == sel_width;
                        up.push_back(emit(WordOpKind::Mux, {bit, a, b}, 1, last ? dest : std::nullopt));
                    }
                    items = std::move(up);
                }
                if (!items[0]) return emit(WordOpKind::Const, {}, 1, dest, "0");
                if (dest && items[0]->signal != *dest) return emit(WordOpKind::Slice, {*items[0]}, 1, dest);
                return *items[0];
            }
            case Expr::Kind::Number: {
                const int n = static_cast<int>(e.lit.bits.size());
                if (e.lit.sized) {
                    require_width(e, width, n);
                } else if (n > width && !(n == 1 && !e.lit.bits[0])) {
                    require_width(e, width, n);
                }
                std::string value(static_cast<std::size_t>(width), '0');
                for (int i = 0; i < width && i < n; ++i)
                    if (e.lit.bits[static_cast<std::size_t>(i)]) value[static_cast<std::size_t>(width - 1 - i)] = '1';
                return emit(WordOpKind::Const, {}, width, dest, value);
            }
            case Expr::Kind::Not: {
                const auto w = self_width(*e.kids[0]);
                if (w) require_width(e, width, *w);
                const SignalSlice a = lower(e.kids[0], width, std::nullopt);
                return emit(WordOpKind::Not, {a}, width, dest);
            }
            case Expr::Kind::Binary: {
                const auto lw = self_width(*e.kids[0]);
                const auto rw = self_width(*e.kids[1]);
                if (lw && rw && *lw != *rw) throw FrontendError::width_mismatch("operand of " + e.op, *lw, *rw, e.line);
                if (e.op == "==" || e.op == "<") {
                    require_width(e, width, 1);
                    const int ow = lw ? *lw : rw ? *rw : 32;
                    const SignalSlice a = lower(e.kids[0], ow, std::nullopt);
                    const SignalSlice b = lower(e.kids[1], ow, std::nullopt);
                    return emit(e.op == "==" ? WordOpKind::Eq : WordOpKind::Lt, {a, b}, 1, dest);
                }
                const int w = lw ? *lw : rw ? *rw : width;
                require_width(e, width, w);
                const SignalSlice a = lower(e.kids[0], width, std::nullopt);
                const SignalSlice b = lower(e.kids[1], width, std::nullopt);
                WordOpKind kind = WordOpKind::And;
                if (e.op == "|") kind = WordOpKind::Or;
                if (e.op == "^") kind = WordOpKind::Xor;
                if (e.op == "+") kind = WordOpKind::Add;
                if (e.op == "-") kind = WordOpKind::Sub;
                return emit(kind, {a, b}, width, dest);
            }
            case Expr::Kind::Ternary: {
                const auto cw = self_width(*e.kids[0]).value_or(1);
                if (cw != 1) throw FrontendError::width_mismatch("condition", 1, cw, e.line);
                const auto aw = self_width(*e.kids[1]);
                const auto bw = self_width(*e.kids[2]);
                if (aw && bw && *aw != *bw) throw FrontendError::width_mismatch("branch of ?:", *aw, *bw, e.line);
                const int w = aw ? *aw : bw ? *bw : width;
                require_width(e, width, w);
                const SignalSlice c = lower(e.kids[0], 1, std::nullopt);
                const SignalSlice a = lower(e.kids[1], width, std::nullopt);
                const SignalSlice b = lower(e.kids[2], width, std::nullopt);
                return emit(WordOpKind::Mux, {c, a, b}, width, dest);
            }
            case Expr::Kind::Concat: {
                const int total = *self_width(e);
                require_width(e, width, total);
                std::vector<SignalSlice> parts;
                for (const auto& k : e.kids) parts.push_back(lower(k, *self_width(*k), std::nullopt));
                if (parts.size() == 1) return dest ? emit(WordOpKind::Slice, parts, width, dest) : parts[0];
                return emit(WordOpKind::Concat, parts, width, dest);
            }
        }
        fail("internal: unhandled expression");
    }

    WordNetlist build() {
        WordNetlist net;
        net.name = name_;
        net.clock = clock_;

        // ports in header order (non-ANSI ports need a direction declaration)
        for (const auto& p : port_order_) {
            const auto it = decls_.find(p);
            if (it == decls_.end() || !it->second.dir) throw FrontendError::syntax("port '" + p + "' has no direction", 0, 0);
            net.ports.push_back(Port{p, *it->second.dir, it->second.width});
        }
        for (const auto& [name, d] : decls_) {
            if (d.dir && std::find(port_order_.begin(), port_order_.end(), name) == port_order_.end())
                throw FrontendError::syntax("'" + name + "' declared as port but missing from port list", d.line, d.col);
        }

        std::vector<std::pair<std::string, const SigDecl*>> ordered;
        for (const auto& [name, d] : decls_) ordered.emplace_back(name, &d);
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.second->order < b.second->order; });
        for (const auto& [name, d] : ordered) {
            if (d->is_reg && d->dir == PortDir::In)
                throw FrontendError::syntax("input '" + name + "' declared reg", d->line, d->col);
            net.signals.push_back(Signal{name, d->width, d->is_reg ? SignalKind::Reg : SignalKind::Wire});
            net.source_spans[name] = SourceSpan{std::string(file_), d->line, d->col};
        }

        if (!clock_.empty()) {
            const auto it = decls_.find(clock_);
            if (it == decls_.end() || it->second.dir != PortDir::In || it->second.width != 1)
                throw FrontendError::syntax("clock '" + clock_ + "' must be a 1-bit input", 0, 0);
        }

        for (const auto& [tok, expr] : assigns_) {
            const SigDecl& d = decl_of(tok.text, tok.line, tok.col);
            if (d.is_reg) throw FrontendError::syntax("continuous assignment to reg '" + tok.text + "'", tok.line, tok.col);
            if (d.dir == PortDir::In)
                throw FrontendError(FrontendErrorKind::MultipleDrivers, "assignment to input '" + tok.text + "'",
                                    tok.line, tok.col);
            const int w = self_width(*expr).value_or(d.width);
            if (w != d.width) throw FrontendError::width_mismatch(tok.text, d.width, w, tok.line);
            lower(expr, d.width, tok.text);
        }

        std::vector<std::pair<std::string, ExprPtr>> regs(next_state_.begin(), next_state_.end());
        std::sort(regs.begin(), regs.end(),
                  [&](const auto& a, const auto& b) { return decls_.at(a.first).order < decls_.at(b.first).order; });
        for (const auto& [reg, expr] : regs) {
            const auto it = decls_.find(reg);
            const int line = reg_lines_.count(reg) ? reg_lines_.at(reg) : 0;
            if (it == decls_.end()) throw FrontendError::syntax("undeclared register '" + reg + "'", line, 0);
            if (!it->second.is_reg)
                throw FrontendError::syntax("procedural assignment to non-reg '" + reg + "'", line, 0);
            const int width = it->second.width;
            const int w = self_width(*expr).value_or(width);
            if (w != width) throw FrontendError::width_mismatch(reg, width, w, expr->line);
            SignalSlice d;
            if (expr->kind == Expr::Kind::Ident || expr->kind == Expr::Kind::ConstSlice) {
                d = const_slice(*expr);
            } else {
                d = lower(expr, width, std::nullopt);
            }
            net.registers.push_back(Register{reg, d, clock_});
        }
        for (const auto& [name, dcl] : decls_) {
            if (dcl.is_reg && !next_state_.count(name))
                throw FrontendError(FrontendErrorKind::Undriven, "reg '" + name + "' is never assigned", dcl.line,
                                    dcl.col);
        }

        for (auto& t : temps_) net.signals.push_back(std::move(t));
        net.operators = std::move(ops_);
        validate(net);
        return net;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string_view file_;
    std::string name_;
    std::string clock_;
    std::vector<std::string> port_order_;
    std::map<std::string, SigDecl> decls_;
    std::size_t decl_order_ = 0;
    std::vector<std::pair<Token, ExprPtr>> assigns_;
    std::map<std::string, ExprPtr> next_state_;
    std::map<std::string, int> reg_lines_;

    std::vector<Signal> temps_;
    int temp_counter_ = 0;
    std::vector<WordOp> ops_;
    std::optional<SignalSlice> zero_;
    std::map<std::pair<const Expr*, int>, SignalSlice> cache_;
};

}  // namespace

WordNetlist parse_verilog_subset(std::string_view source, std::string_view file) {
    Parser parser(Lexer(source).run(), file);
    return parser.run();
}

}  // namespace rtlt
