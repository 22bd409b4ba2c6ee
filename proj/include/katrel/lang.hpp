// The C-like mini language: statements are skip, assignment, event call
// (any call to an undeclared function), assume, fail, sequence, if and
// while. Integer expressions are linear (+, -, nondet()); conditions are
// boolean combinations of integer comparisons. A benchmark file holds
// one or two top-level fragments plus an optional front-matter config
// block in leading `//!` comment lines.

#ifndef KATREL_LANG_HPP
#define KATREL_LANG_HPP

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "katrel/symbols.hpp"

namespace katrel {

struct LangSyntaxError : std::runtime_error {
    int line;
    LangSyntaxError(const std::string& msg, int ln)
        : std::runtime_error("line " + std::to_string(ln) + ": " + msg),
          line(ln) {}
};

struct UnknownLocation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Statement positions are assigned in preorder at parse time and stay
// stable under instrumentation: a statement inserted before anchor
// ordinal n gets path {n, k}. Comparison orders an inserted statement
// just before its anchor.
struct Location {
    ProgramSide side = ProgramSide::C1;
    std::vector<uint32_t> path;
    int line = 0;  // source line of the anchor, for display only

    friend bool operator==(const Location& a, const Location& b) {
        return a.side == b.side && a.path == b.path;
    }
    friend bool operator<(const Location& a, const Location& b) {
        if (a.side != b.side) return a.side < b.side;
        size_t n = std::min(a.path.size(), b.path.size());
        for (size_t i = 0; i < n; ++i)
            if (a.path[i] != b.path[i]) return a.path[i] < b.path[i];
        // longer path = inserted before the shared anchor
        return a.path.size() > b.path.size();
    }

    std::string str() const {
        std::string s = std::string(side_name(side)) + ":";
        s += std::to_string(line);
        return s;
    }
};

// --- integer expressions ---

enum class IntOp : uint8_t { Const, Var, Add, Sub, Neg, Nondet };

struct IntExprNode;
using IntExpr = std::shared_ptr<const IntExprNode>;

struct IntExprNode {
    IntOp op;
    int64_t value = 0;     // Const
    std::string var;       // Var
    IntExpr lhs, rhs;
};

inline IntExpr int_const(int64_t v) {
    auto n = std::make_shared<IntExprNode>();
    n->op = IntOp::Const;
    n->value = v;
    return n;
}
inline IntExpr int_var(std::string name) {
    auto n = std::make_shared<IntExprNode>();
    n->op = IntOp::Var;
    n->var = std::move(name);
    return n;
}
inline IntExpr int_nondet() {
    auto n = std::make_shared<IntExprNode>();
    n->op = IntOp::Nondet;
    return n;
}
inline IntExpr int_bin(IntOp op, IntExpr a, IntExpr b) {
    auto n = std::make_shared<IntExprNode>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}
inline IntExpr int_neg(IntExpr a) {
    auto n = std::make_shared<IntExprNode>();
    n->op = IntOp::Neg;
    n->lhs = std::move(a);
    return n;
}

// --- boolean conditions ---

enum class RelOp : uint8_t { Lt, Le, Eq, Ne, Ge, Gt };
enum class CondOp : uint8_t { True, False, Cmp, And, Or, Not };

struct BoolCondNode;
using BoolCond = std::shared_ptr<const BoolCondNode>;

struct BoolCondNode {
    CondOp op;
    RelOp rel = RelOp::Eq;  // Cmp
    IntExpr cl, cr;         // Cmp
    BoolCond lhs, rhs;      // Not uses lhs only
};

inline BoolCond cond_const(bool v) {
    auto n = std::make_shared<BoolCondNode>();
    n->op = v ? CondOp::True : CondOp::False;
    return n;
}
inline BoolCond cond_cmp(RelOp r, IntExpr a, IntExpr b) {
    auto n = std::make_shared<BoolCondNode>();
    n->op = CondOp::Cmp;
    n->rel = r;
    n->cl = std::move(a);
    n->cr = std::move(b);
    return n;
}
inline BoolCond cond_and(BoolCond a, BoolCond b) {
    auto n = std::make_shared<BoolCondNode>();
    n->op = CondOp::And;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}
inline BoolCond cond_or(BoolCond a, BoolCond b) {
    auto n = std::make_shared<BoolCondNode>();
    n->op = CondOp::Or;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}
inline BoolCond cond_not(BoolCond a) {
    auto n = std::make_shared<BoolCondNode>();
    n->op = CondOp::Not;
    n->lhs = std::move(a);
    return n;
}

inline RelOp rel_complement(RelOp r) {
    switch (r) {
    case RelOp::Lt: return RelOp::Ge;
    case RelOp::Le: return RelOp::Gt;
    case RelOp::Eq: return RelOp::Ne;
    case RelOp::Ne: return RelOp::Eq;
    case RelOp::Ge: return RelOp::Lt;
    case RelOp::Gt: return RelOp::Le;
    }
    return RelOp::Eq;
}

// Negation pushed onto comparisons via the complementary operator.
inline BoolCond cond_negate(const BoolCond& c) {
    switch (c->op) {
    case CondOp::True: return cond_const(false);
    case CondOp::False: return cond_const(true);
    case CondOp::Cmp: return cond_cmp(rel_complement(c->rel), c->cl, c->cr);
    case CondOp::And: return cond_or(cond_negate(c->lhs), cond_negate(c->rhs));
    case CondOp::Or: return cond_and(cond_negate(c->lhs), cond_negate(c->rhs));
    case CondOp::Not: return c->lhs;
    }
    return c;
}

// --- statements ---

enum class StmtKind : uint8_t {
    Skip,
    Assign,
    EventCall,
    Assume,
    Fail,
    Seq,
    If,
    While
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    StmtKind kind = StmtKind::Skip;
    Location loc;
    // Assign
    std::string var;
    IntExpr rhs;
    // EventCall: callee + args, optional result binding in `var`
    std::string callee;
    std::vector<IntExpr> args;
    bool has_binding = false;
    // Assume / If / While
    BoolCond cond;
    // Seq / If / While bodies
    std::vector<StmtPtr> stmts;  // Seq
    StmtPtr then_branch, else_branch, body;
};

struct Program {
    ProgramSide side = ProgramSide::C1;
    std::string name;
    std::vector<std::string> params;
    StmtPtr body;  // a Seq
};

struct BenchmarkFile {
    std::vector<Program> fragments;
    std::map<std::string, std::string> config;  // front matter
};

// --- printing ---

namespace detail {

inline std::string int_str(const IntExpr& e, int prec = 0) {
    switch (e->op) {
    case IntOp::Const: return std::to_string(e->value);
    case IntOp::Var: return e->var;
    case IntOp::Nondet: return "nondet()";
    case IntOp::Add: {
        std::string s = int_str(e->lhs, 0) + " + " + int_str(e->rhs, 1);
        return prec > 0 ? "(" + s + ")" : s;
    }
    case IntOp::Sub: {
        std::string s = int_str(e->lhs, 0) + " - " + int_str(e->rhs, 1);
        return prec > 0 ? "(" + s + ")" : s;
    }
    case IntOp::Neg: return "-" + int_str(e->lhs, 1);
    }
    return "?";
}

inline const char* rel_str(RelOp r) {
    switch (r) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Ge: return ">=";
    case RelOp::Gt: return ">";
    }
    return "?";
}

inline std::string cond_str(const BoolCond& c, int prec = 0) {
    switch (c->op) {
    case CondOp::True: return "true";
    case CondOp::False: return "false";
    case CondOp::Cmp:
        return int_str(c->cl) + " " + rel_str(c->rel) + " " + int_str(c->cr);
    case CondOp::And: {
        std::string s = cond_str(c->lhs, 1) + " && " + cond_str(c->rhs, 1);
        return prec > 1 ? "(" + s + ")" : s;
    }
    case CondOp::Or: {
        std::string s = cond_str(c->lhs, 0) + " || " + cond_str(c->rhs, 0);
        return prec > 0 ? "(" + s + ")" : s;
    }
    case CondOp::Not: {
        std::string inner = cond_str(c->lhs, 2);
        if (c->lhs->op != CondOp::Cmp && c->lhs->op != CondOp::True &&
            c->lhs->op != CondOp::False)
            return "!(" + cond_str(c->lhs, 0) + ")";
        return "!(" + inner + ")";
    }
    }
    return "?";
}

}  // namespace detail

inline std::string to_string(const IntExpr& e) { return detail::int_str(e); }
inline std::string to_string(const BoolCond& c) { return detail::cond_str(c); }

// Canonical one-line rendering of a statement, used as the symbol key
// for actions.
inline std::string stmt_text(const Stmt& s) {
    switch (s.kind) {
    case StmtKind::Skip: return "skip;";
    case StmtKind::Fail: return "fail;";
    case StmtKind::Assign:
        return s.var + " = " + detail::int_str(s.rhs) + ";";
    case StmtKind::EventCall: {
        std::string t = s.has_binding ? s.var + " = " : "";
        t += s.callee + "(";
        for (size_t i = 0; i < s.args.size(); ++i) {
            if (i) t += ", ";
            t += detail::int_str(s.args[i]);
        }
        return t + ");";
    }
    case StmtKind::Assume:
        return "assume(" + detail::cond_str(s.cond) + ");";
    default: return "<compound>";
    }
}

inline bool is_effectively_skip(const StmtPtr& s) {
    if (!s) return true;
    if (s->kind == StmtKind::Skip) return true;
    if (s->kind == StmtKind::Seq && s->stmts.size() == 1)
        return is_effectively_skip(s->stmts[0]);
    return false;
}

namespace detail {

inline void pretty_stmt(const StmtPtr& s, std::ostringstream& os, int indent) {
    auto pad = [&]() { os << std::string(indent * 2, ' '); };
    switch (s->kind) {
    case StmtKind::Seq:
        for (const auto& c : s->stmts) pretty_stmt(c, os, indent);
        return;
    case StmtKind::If:
        pad();
        os << "if (" << cond_str(s->cond) << ") {\n";
        pretty_stmt(s->then_branch, os, indent + 1);
        if (!is_effectively_skip(s->else_branch)) {
            pad();
            os << "} else {\n";
            pretty_stmt(s->else_branch, os, indent + 1);
        }
        pad();
        os << "}\n";
        return;
    case StmtKind::While:
        pad();
        os << "while (" << cond_str(s->cond) << ") {\n";
        pretty_stmt(s->body, os, indent + 1);
        pad();
        os << "}\n";
        return;
    default:
        pad();
        os << stmt_text(*s) << "\n";
        return;
    }
}

}  // namespace detail

inline std::string pretty(const Program& p) {
    std::ostringstream os;
    os << "void " << p.name << "(";
    for (size_t i = 0; i < p.params.size(); ++i) {
        if (i) os << ", ";
        os << "int " << p.params[i];
    }
    os << ") {\n";
    detail::pretty_stmt(p.body, os, 1);
    os << "}\n";
    return os.str();
}

// --- structural equality (ignoring locations on request) ---

inline bool int_equal(const IntExpr& a, const IntExpr& b) {
    if (a->op != b->op) return false;
    switch (a->op) {
    case IntOp::Const: return a->value == b->value;
    case IntOp::Var: return a->var == b->var;
    case IntOp::Nondet: return true;
    case IntOp::Neg: return int_equal(a->lhs, b->lhs);
    default: return int_equal(a->lhs, b->lhs) && int_equal(a->rhs, b->rhs);
    }
}

inline bool cond_equal(const BoolCond& a, const BoolCond& b) {
    if (a->op != b->op) return false;
    switch (a->op) {
    case CondOp::True:
    case CondOp::False: return true;
    case CondOp::Cmp:
        return a->rel == b->rel && int_equal(a->cl, b->cl) &&
               int_equal(a->cr, b->cr);
    case CondOp::Not: return cond_equal(a->lhs, b->lhs);
    default: return cond_equal(a->lhs, b->lhs) && cond_equal(a->rhs, b->rhs);
    }
}

inline bool stmt_equal(const StmtPtr& a, const StmtPtr& b,
                       bool compare_locations = true) {
    if (a->kind != b->kind) return false;
    if (compare_locations && !(a->loc == b->loc)) return false;
    switch (a->kind) {
    case StmtKind::Skip:
    case StmtKind::Fail: return true;
    case StmtKind::Assign:
        return a->var == b->var && int_equal(a->rhs, b->rhs);
    case StmtKind::EventCall: {
        if (a->callee != b->callee || a->has_binding != b->has_binding ||
            a->var != b->var || a->args.size() != b->args.size())
            return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!int_equal(a->args[i], b->args[i])) return false;
        return true;
    }
    case StmtKind::Assume: return cond_equal(a->cond, b->cond);
    case StmtKind::Seq: {
        if (a->stmts.size() != b->stmts.size()) return false;
        for (size_t i = 0; i < a->stmts.size(); ++i)
            if (!stmt_equal(a->stmts[i], b->stmts[i], compare_locations))
                return false;
        return true;
    }
    case StmtKind::If:
        return cond_equal(a->cond, b->cond) &&
               stmt_equal(a->then_branch, b->then_branch, compare_locations) &&
               stmt_equal(a->else_branch, b->else_branch, compare_locations);
    case StmtKind::While:
        return cond_equal(a->cond, b->cond) &&
               stmt_equal(a->body, b->body, compare_locations);
    }
    return false;
}

// --- canonical conditions ---

// Linear normal form of an atomic comparison. Complementary comparisons
// (x > 0 versus x <= 0, and integer-tightened variants such as x >= 1)
// share one key and differ only in polarity, so negation maps to the
// same test symbol.
struct CanonicalTest {
    std::string key;       // e.g. "x<=0" or "d==0"
    bool positive = true;  // polarity of this occurrence
};

namespace detail {

struct LinForm {
    std::map<std::string, int64_t> coeffs;
    int64_t constant = 0;

    void add(const LinForm& o, int64_t sign) {
        for (auto& [v, c] : o.coeffs) {
            coeffs[v] += sign * c;
            if (coeffs[v] == 0) coeffs.erase(v);
        }
        constant += sign * o.constant;
    }
};

inline LinForm linearize(const IntExpr& e) {
    LinForm f;
    switch (e->op) {
    case IntOp::Const: f.constant = e->value; return f;
    case IntOp::Var: f.coeffs[e->var] = 1; return f;
    case IntOp::Nondet:
        throw std::logic_error("nondet() not allowed inside conditions");
    case IntOp::Add: {
        f = linearize(e->lhs);
        f.add(linearize(e->rhs), 1);
        return f;
    }
    case IntOp::Sub: {
        f = linearize(e->lhs);
        f.add(linearize(e->rhs), -1);
        return f;
    }
    case IntOp::Neg: {
        LinForm g = linearize(e->lhs);
        f.add(g, -1);
        return f;
    }
    }
    return f;
}

inline std::string lin_str(const LinForm& f) {
    std::string s;
    for (auto& [v, c] : f.coeffs) {
        if (!s.empty() || c < 0) s += c < 0 ? "-" : "+";
        if (std::abs(c) != 1) s += std::to_string(std::abs(c)) + "*";
        s += v;
    }
    if (s.empty()) s = "0";
    if (f.constant > 0) s += "+" + std::to_string(f.constant);
    if (f.constant < 0) s += std::to_string(f.constant);
    return s;
}

}  // namespace detail

// Canonicalize an atomic comparison; constant comparisons fold and are
// reported through `constant`.
struct CanonResult {
    bool is_constant = false;
    bool constant = false;
    CanonicalTest test;
};

inline CanonResult canonical_cmp(RelOp rel, const IntExpr& l,
                                 const IntExpr& r) {
    detail::LinForm f = detail::linearize(l);
    f.add(detail::linearize(r), -1);  // l - r REL 0
    CanonResult res;
    if (f.coeffs.empty()) {
        res.is_constant = true;
        int64_t v = f.constant;
        switch (rel) {
        case RelOp::Lt: res.constant = v < 0; break;
        case RelOp::Le: res.constant = v <= 0; break;
        case RelOp::Eq: res.constant = v == 0; break;
        case RelOp::Ne: res.constant = v != 0; break;
        case RelOp::Ge: res.constant = v >= 0; break;
        case RelOp::Gt: res.constant = v > 0; break;
        }
        return res;
    }
    bool positive = true;
    bool is_eq = false;
    switch (rel) {
    case RelOp::Le: break;
    case RelOp::Lt: f.constant += 1; break;           // l-r+1 <= 0
    case RelOp::Gt: positive = false; break;          // !(l-r <= 0)
    case RelOp::Ge: positive = false; f.constant += 1; break;
    case RelOp::Eq: is_eq = true; break;
    case RelOp::Ne: is_eq = true; positive = false; break;
    }
    if (f.coeffs.begin()->second < 0) {
        // sign-normalize: leading coefficient positive. For inequalities
        // -L <= 0 is the complement of L+1 <= 0 over the integers.
        for (auto& [v, c] : f.coeffs) c = -c;
        f.constant = -f.constant;
        if (!is_eq) {
            f.constant += 1;
            positive = !positive;
        }
    }
    res.test.key = detail::lin_str(f) + (is_eq ? "==0" : "<=0");
    res.test.positive = positive;
    return res;
}

// --- parsing ---

namespace detail {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind = End;
    std::string text;
    int line = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& cur() const { return cur_; }

    void advance() {
        skip_ws_comments();
        cur_.line = line_;
        if (pos_ >= src_.size()) {
            cur_.kind = Token::End;
            cur_.text.clear();
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_'))
                ++pos_;
            cur_.kind = Token::Ident;
            cur_.text = src_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            cur_.kind = Token::Number;
            cur_.text = src_.substr(start, pos_ - start);
            return;
        }
        static const char* two[] = {"==", "!=", "<=", ">=", "&&",
                                    "||", "++", "--"};
        for (const char* t : two) {
            if (src_.compare(pos_, 2, t) == 0) {
                cur_.kind = Token::Punct;
                cur_.text = t;
                pos_ += 2;
                return;
            }
        }
        cur_.kind = Token::Punct;
        cur_.text = std::string(1, c);
        ++pos_;
    }

    struct State {
        size_t pos;
        int line;
        Token cur;
    };
    State save() const { return {pos_, line_, cur_}; }
    void restore(const State& s) {
        pos_ = s.pos;
        line_ = s.line;
        cur_ = s.cur;
    }

    int line() const { return line_; }

private:
    void skip_ws_comments() {
        for (;;) {
            while (pos_ < src_.size() &&
                   std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                if (src_[pos_] == '\n') ++line_;
                ++pos_;
            }
            if (src_.compare(pos_, 2, "//") == 0) {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            if (src_.compare(pos_, 2, "/*") == 0) {
                pos_ += 2;
                while (pos_ + 1 < src_.size() &&
                       !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
                    if (src_[pos_] == '\n') ++line_;
                    ++pos_;
                }
                pos_ = std::min(pos_ + 2, src_.size());
                continue;
            }
            return;
        }
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1;
    Token cur_;
};

class ProgramParser {
public:
    ProgramParser(const std::string& src, ProgramSide side)
        : lex_(src), side_(side) {}

    Program parse_fragment() {
        Program p;
        p.side = side_;
        if (is_ident("void") || is_ident("int")) eat();
        p.name = expect_ident();
        expect("(");
        while (!is_punct(")")) {
            if (is_ident("int")) eat();
            p.params.push_back(expect_ident());
            if (is_punct(",")) eat();
        }
        expect(")");
        p.body = parse_block();
        return p;
    }

    bool at_end() { return lex_.cur().kind == Token::End; }

private:
    StmtPtr parse_block() {
        expect("{");
        auto seq = std::make_shared<Stmt>();
        seq->kind = StmtKind::Seq;
        seq->loc = fresh_loc();
        std::vector<StmtPtr> stmts;
        while (!is_punct("}")) stmts.push_back(parse_stmt());
        expect("}");
        seq->stmts = std::move(stmts);
        if (seq->stmts.empty()) {
            auto sk = std::make_shared<Stmt>();
            sk->kind = StmtKind::Skip;
            sk->loc = fresh_loc();
            seq->stmts.push_back(sk);
        }
        return seq;
    }

    StmtPtr parse_stmt() {
        int line = lex_.cur().line;
        if (is_punct("{")) return parse_block();
        if (is_punct(";")) {
            eat();
            return simple(StmtKind::Skip, line);
        }
        if (is_ident("skip")) {
            eat();
            expect(";");
            return simple(StmtKind::Skip, line);
        }
        if (is_ident("fail")) {
            eat();
            expect(";");
            return simple(StmtKind::Fail, line);
        }
        if (is_ident("assume")) {
            eat();
            expect("(");
            BoolCond c = parse_cond();
            expect(")");
            expect(";");
            auto s = std::make_shared<Stmt>();
            s->kind = StmtKind::Assume;
            s->cond = c;
            s->loc = fresh_loc(line);
            return s;
        }
        if (is_ident("if")) {
            eat();
            auto s = std::make_shared<Stmt>();
            s->kind = StmtKind::If;
            s->loc = fresh_loc(line);
            expect("(");
            s->cond = parse_cond();
            expect(")");
            s->then_branch = parse_branch();
            if (is_ident("else")) {
                eat();
                s->else_branch = parse_branch();
            } else {
                s->else_branch = empty_branch(line);
            }
            return s;
        }
        if (is_ident("while")) {
            eat();
            auto s = std::make_shared<Stmt>();
            s->kind = StmtKind::While;
            s->loc = fresh_loc(line);
            expect("(");
            s->cond = parse_cond();
            expect(")");
            s->body = parse_branch();
            return s;
        }
        // assignment, event call, x++ / x--
        std::string name = expect_ident();
        if (is_punct("++") || is_punct("--")) {
            bool inc = lex_.cur().text == "++";
            eat();
            expect(";");
            auto s = std::make_shared<Stmt>();
            s->kind = StmtKind::Assign;
            s->var = name;
            s->rhs = int_bin(inc ? IntOp::Add : IntOp::Sub, int_var(name),
                             int_const(1));
            s->loc = fresh_loc(line);
            return s;
        }
        if (is_punct("(")) {
            auto s = std::make_shared<Stmt>();
            s->kind = StmtKind::EventCall;
            s->callee = name;
            s->args = parse_args();
            expect(";");
            s->loc = fresh_loc(line);
            return s;
        }
        expect("=");
        auto s = std::make_shared<Stmt>();
        s->loc = fresh_loc(line);
        // call on the right-hand side = event with result binding
        auto st = lex_.save();
        if (lex_.cur().kind == Token::Ident) {
            std::string callee = lex_.cur().text;
            eat();
            if (is_punct("(") && callee != "nondet") {
                s->kind = StmtKind::EventCall;
                s->callee = callee;
                s->var = name;
                s->has_binding = true;
                s->args = parse_args();
                expect(";");
                return s;
            }
            lex_.restore(st);
        }
        s->kind = StmtKind::Assign;
        s->var = name;
        s->rhs = parse_intexpr();
        expect(";");
        return s;
    }

    std::vector<IntExpr> parse_args() {
        expect("(");
        std::vector<IntExpr> args;
        while (!is_punct(")")) {
            args.push_back(parse_intexpr());
            if (is_punct(",")) eat();
        }
        expect(")");
        return args;
    }

    BoolCond parse_cond() { return parse_or(); }

    BoolCond parse_or() {
        BoolCond c = parse_and();
        while (is_punct("||")) {
            eat();
            c = cond_or(c, parse_and());
        }
        return c;
    }

    BoolCond parse_and() {
        BoolCond c = parse_not();
        while (is_punct("&&")) {
            eat();
            c = cond_and(c, parse_not());
        }
        return c;
    }

    BoolCond parse_not() {
        if (is_punct("!")) {
            eat();
            return cond_negate(parse_not());
        }
        return parse_cond_prim();
    }

    BoolCond parse_cond_prim() {
        if (is_ident("true")) {
            eat();
            return cond_const(true);
        }
        if (is_ident("false")) {
            eat();
            return cond_const(false);
        }
        // try comparison first, fall back to parenthesized condition
        auto st = lex_.save();
        try {
            IntExpr l = parse_intexpr();
            if (auto r = try_relop()) {
                IntExpr rr = parse_intexpr();
                return cond_cmp(*r, l, rr);
            }
            // bare integer expression: nonzero test
            return cond_cmp(RelOp::Ne, l, int_const(0));
        } catch (const LangSyntaxError&) {
            lex_.restore(st);
        }
        expect("(");
        BoolCond c = parse_cond();
        expect(")");
        return c;
    }

    std::optional<RelOp> try_relop() {
        static const std::pair<const char*, RelOp> ops[] = {
            {"<=", RelOp::Le}, {">=", RelOp::Ge}, {"==", RelOp::Eq},
            {"!=", RelOp::Ne}, {"<", RelOp::Lt},  {">", RelOp::Gt}};
        for (auto& [t, r] : ops)
            if (is_punct(t)) {
                eat();
                return r;
            }
        return std::nullopt;
    }

    IntExpr parse_intexpr() {
        IntExpr e = parse_term();
        for (;;) {
            if (is_punct("+")) {
                eat();
                e = int_bin(IntOp::Add, e, parse_term());
            } else if (is_punct("-")) {
                eat();
                e = int_bin(IntOp::Sub, e, parse_term());
            } else {
                return e;
            }
        }
    }

    IntExpr parse_term() {
        if (is_punct("-")) {
            eat();
            return int_neg(parse_term());
        }
        if (is_punct("(")) {
            eat();
            IntExpr e = parse_intexpr();
            expect(")");
            return e;
        }
        if (lex_.cur().kind == Token::Number) {
            int64_t v = std::stoll(lex_.cur().text);
            eat();
            return int_const(v);
        }
        if (lex_.cur().kind == Token::Ident) {
            std::string name = lex_.cur().text;
            eat();
            if (name == "nondet") {
                expect("(");
                expect(")");
                return int_nondet();
            }
            if (name == "true" || name == "false")
                fail("boolean constant in integer context");
            return int_var(name);
        }
        fail("expected an integer expression");
        return nullptr;
    }

    StmtPtr simple(StmtKind k, int line) {
        auto s = std::make_shared<Stmt>();
        s->kind = k;
        s->loc = fresh_loc(line);
        return s;
    }

    // Branches are normalized to blocks so that `if (c) s;` and
    // `if (c) { s; }` parse identically.
    StmtPtr parse_branch() {
        if (is_punct("{")) return parse_block();
        auto seq = std::make_shared<Stmt>();
        seq->kind = StmtKind::Seq;
        seq->loc = fresh_loc();
        seq->stmts.push_back(parse_stmt());
        return seq;
    }

    StmtPtr empty_branch(int line) {
        auto seq = std::make_shared<Stmt>();
        seq->kind = StmtKind::Seq;
        seq->loc = fresh_loc(line);
        seq->stmts.push_back(simple(StmtKind::Skip, line));
        return seq;
    }

    Location fresh_loc(int line = 0) {
        Location l;
        l.side = side_;
        l.path = {next_ord_++};
        l.line = line ? line : lex_.cur().line;
        return l;
    }

    bool is_ident(const char* s) {
        return lex_.cur().kind == Token::Ident && lex_.cur().text == s;
    }
    bool is_punct(const char* s) {
        return lex_.cur().kind == Token::Punct && lex_.cur().text == s;
    }
    void eat() { lex_.advance(); }
    std::string expect_ident() {
        if (lex_.cur().kind != Token::Ident) fail("expected identifier");
        std::string t = lex_.cur().text;
        eat();
        return t;
    }
    void expect(const char* s) {
        if (!is_punct(s))
            fail("expected '" + std::string(s) + "', found '" +
                 lex_.cur().text + "'");
        eat();
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw LangSyntaxError(msg, lex_.cur().line);
    }

    Lexer lex_;
    ProgramSide side_;
    uint32_t next_ord_ = 1;
};

}  // namespace detail

inline Program parse_fragment(const std::string& src,
                              ProgramSide side = ProgramSide::C1) {
    detail::ProgramParser p(src, side);
    return p.parse_fragment();
}

// Front matter: leading lines of the form `//! key: value`.
inline std::map<std::string, std::string> parse_front_matter(
    const std::string& src) {
    std::map<std::string, std::string> out;
    std::istringstream is(src);
    std::string line;
    while (std::getline(is, line)) {
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (line.compare(b, 3, "//!") != 0) break;
        std::string body = line.substr(b + 3);
        auto colon = body.find(':');
        if (colon == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t x = s.find_first_not_of(" \t\r");
            size_t y = s.find_last_not_of(" \t\r");
            return x == std::string::npos ? std::string()
                                          : s.substr(x, y - x + 1);
        };
        out[trim(body.substr(0, colon))] = trim(body.substr(colon + 1));
    }
    return out;
}

inline BenchmarkFile parse_benchmark(const std::string& src) {
    BenchmarkFile f;
    f.config = parse_front_matter(src);
    detail::ProgramParser p1(src, ProgramSide::C1);
    f.fragments.push_back(p1.parse_fragment());
    if (!p1.at_end()) {
        // reparse the remainder as the second fragment; simplest is to
        // track progress with a second parser over the same text
        // (fragments are separated only by whitespace/comments)
        size_t split = src.size();
        // locate the end of the first fragment: brace matching
        int depth = 0;
        bool seen = false;
        for (size_t i = 0; i < src.size(); ++i) {
            if (src[i] == '{') {
                ++depth;
                seen = true;
            } else if (src[i] == '}') {
                --depth;
                if (seen && depth == 0) {
                    split = i + 1;
                    break;
                }
            }
        }
        std::string rest = src.substr(split);
        detail::ProgramParser p2(rest, ProgramSide::C2);
        f.fragments.push_back(p2.parse_fragment());
    }
    return f;
}

// --- instrumentation ---

namespace detail {

inline StmtPtr find_stmt(const StmtPtr& s, const Location& loc) {
    if (s->loc == loc) return s;
    switch (s->kind) {
    case StmtKind::Seq:
        for (const auto& c : s->stmts)
            if (auto r = find_stmt(c, loc)) return r;
        return nullptr;
    case StmtKind::If:
        if (auto r = find_stmt(s->then_branch, loc)) return r;
        return find_stmt(s->else_branch, loc);
    case StmtKind::While: return find_stmt(s->body, loc);
    default: return nullptr;
    }
}

}  // namespace detail

inline StmtPtr find_stmt(const Program& p, const Location& loc) {
    return detail::find_stmt(p.body, loc);
}

namespace detail {

// Inserted assumes carry path = anchor path + sub index; recover the
// anchor by dropping the last component.
inline void collect_inserted(const StmtPtr& s,
                             std::vector<std::pair<Location, BoolCond>>& out,
                             std::map<std::vector<uint32_t>, uint32_t>& subs) {
    if (s->kind == StmtKind::Assume && s->loc.path.size() >= 2) {
        Location anchor = s->loc;
        uint32_t sub = anchor.path.back();
        anchor.path.pop_back();
        out.emplace_back(anchor, s->cond);
        auto& next = subs[anchor.path];
        next = std::max(next, sub + 1);
    }
    switch (s->kind) {
    case StmtKind::Seq:
        for (const auto& c : s->stmts) collect_inserted(c, out, subs);
        break;
    case StmtKind::If:
        collect_inserted(s->then_branch, out, subs);
        collect_inserted(s->else_branch, out, subs);
        break;
    case StmtKind::While: collect_inserted(s->body, out, subs); break;
    default: break;
    }
}

}  // namespace detail

// Inserts assume(cond) immediately at each location: in front of the
// anchored statement, or at the loop-body head when the anchor is a
// while loop. Original locations are preserved; inserted statements get
// fresh sub-locations under their anchor. Re-instrumenting an identical
// (location, cond) pair is a no-op.
inline Program instrument(
    const Program& p,
    const std::vector<std::pair<Location, BoolCond>>& asms) {
    std::vector<std::pair<Location, BoolCond>> existing;
    std::map<std::vector<uint32_t>, uint32_t> next_sub;
    detail::collect_inserted(p.body, existing, next_sub);

    std::vector<std::pair<Location, BoolCond>> todo;
    for (const auto& [loc, cond] : asms) {
        if (!find_stmt(p, loc))
            throw UnknownLocation("no statement at " + loc.str());
        if (loc.side != p.side)
            throw UnknownLocation("location " + loc.str() +
                                  " names the other fragment");
        bool dup = false;
        for (const auto& [l2, c2] : existing)
            if (l2 == loc && cond_equal(c2, cond)) dup = true;
        for (const auto& [l2, c2] : todo)
            if (l2 == loc && cond_equal(c2, cond)) dup = true;
        if (!dup) todo.emplace_back(loc, cond);
    }
    if (todo.empty()) return p;

    std::function<StmtPtr(const StmtPtr&)> walk =
        [&](const StmtPtr& s) -> StmtPtr {
        auto make_assume = [&](const BoolCond& c, const Location& anchor) {
            auto a = std::make_shared<Stmt>();
            a->kind = StmtKind::Assume;
            a->cond = c;
            a->loc = anchor;
            a->loc.line = anchor.line;
            a->loc.path.push_back(next_sub[anchor.path]++);
            return a;
        };
        std::vector<BoolCond> here;
        for (const auto& [loc, cond] : todo)
            if (loc == s->loc) here.push_back(cond);

        StmtPtr rewritten;
        switch (s->kind) {
        case StmtKind::Seq: {
            auto n = std::make_shared<Stmt>(*s);
            n->stmts.clear();
            for (const auto& c : s->stmts) {
                StmtPtr w = walk(c);
                if (w->kind == StmtKind::Seq && c->kind != StmtKind::Seq)
                    for (const auto& x : w->stmts) n->stmts.push_back(x);
                else
                    n->stmts.push_back(w);
            }
            rewritten = n;
            break;
        }
        case StmtKind::If: {
            auto n = std::make_shared<Stmt>(*s);
            n->then_branch = walk(s->then_branch);
            n->else_branch = walk(s->else_branch);
            rewritten = n;
            break;
        }
        case StmtKind::While: {
            auto n = std::make_shared<Stmt>(*s);
            StmtPtr body = walk(s->body);
            if (!here.empty()) {
                // loop anchor: assumes go to the body head
                auto seq = std::make_shared<Stmt>();
                seq->kind = StmtKind::Seq;
                seq->loc = body->loc;
                for (const auto& c : here)
                    seq->stmts.push_back(make_assume(c, s->loc));
                if (body->kind == StmtKind::Seq)
                    for (const auto& x : body->stmts) seq->stmts.push_back(x);
                else
                    seq->stmts.push_back(body);
                n->body = seq;
                here.clear();
            } else {
                n->body = body;
            }
            rewritten = n;
            break;
        }
        default: rewritten = s; break;
        }

        if (here.empty()) return rewritten;
        auto seq = std::make_shared<Stmt>();
        seq->kind = StmtKind::Seq;
        seq->loc = s->loc;
        seq->loc.path.push_back(1000000);  // container node, ordered after
        for (const auto& c : here) seq->stmts.push_back(make_assume(c, s->loc));
        seq->stmts.push_back(rewritten);
        return seq;
    };

    Program out = p;
    out.body = walk(p.body);
    return out;
}

}  // namespace katrel

#endif
