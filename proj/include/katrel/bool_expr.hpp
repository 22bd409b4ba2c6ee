// Boolean test expressions: the boolean subalgebra of the KAT term
// language. Immutable trees with smart constructors that normalize the
// unit/absorption cases and double negation.

#ifndef KATREL_BOOL_EXPR_HPP
#define KATREL_BOOL_EXPR_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "katrel/symbols.hpp"

namespace katrel {

enum class BoolOp : uint8_t { Zero, One, Var, Not, And, Or };

class BoolNode;
using BoolExpr = std::shared_ptr<const BoolNode>;

class BoolNode {
public:
    BoolOp op;
    SymbolRef var;        // Var
    BoolExpr lhs, rhs;    // Not uses lhs only
    size_t hash;

    BoolNode(BoolOp o, SymbolRef v, BoolExpr l, BoolExpr r)
        : op(o), var(v), lhs(std::move(l)), rhs(std::move(r)) {
        size_t h = static_cast<size_t>(op) * 0x9e3779b97f4a7c15ull;
        h ^= static_cast<size_t>(var.id) + 0x517cc1b727220a95ull;
        if (lhs) h = h * 31 + lhs->hash;
        if (rhs) h = h * 37 + rhs->hash;
        hash = h;
    }
};

inline bool bool_equal(const BoolExpr& a, const BoolExpr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->hash != b->hash || a->op != b->op) return false;
    switch (a->op) {
    case BoolOp::Zero:
    case BoolOp::One: return true;
    case BoolOp::Var: return a->var == b->var;
    case BoolOp::Not: return bool_equal(a->lhs, b->lhs);
    case BoolOp::And:
    case BoolOp::Or:
        return bool_equal(a->lhs, b->lhs) && bool_equal(a->rhs, b->rhs);
    }
    return false;
}

// Structural ordering, used for canonical child order in sums.
inline int bool_cmp(const BoolExpr& a, const BoolExpr& b) {
    if (a == b) return 0;
    if (a->op != b->op) return a->op < b->op ? -1 : 1;
    switch (a->op) {
    case BoolOp::Zero:
    case BoolOp::One: return 0;
    case BoolOp::Var:
        return a->var.id == b->var.id ? 0 : (a->var.id < b->var.id ? -1 : 1);
    case BoolOp::Not: return bool_cmp(a->lhs, b->lhs);
    case BoolOp::And:
    case BoolOp::Or: {
        int c = bool_cmp(a->lhs, b->lhs);
        return c != 0 ? c : bool_cmp(a->rhs, b->rhs);
    }
    }
    return 0;
}

inline BoolExpr bool_zero() {
    static BoolExpr z =
        std::make_shared<BoolNode>(BoolOp::Zero, SymbolRef{}, nullptr, nullptr);
    return z;
}

inline BoolExpr bool_one() {
    static BoolExpr o =
        std::make_shared<BoolNode>(BoolOp::One, SymbolRef{}, nullptr, nullptr);
    return o;
}

inline BoolExpr bool_var(SymbolRef t) {
    return std::make_shared<BoolNode>(BoolOp::Var, t, nullptr, nullptr);
}

inline BoolExpr bool_const(bool v) { return v ? bool_one() : bool_zero(); }

inline bool is_zero(const BoolExpr& e) { return e->op == BoolOp::Zero; }
inline bool is_one(const BoolExpr& e) { return e->op == BoolOp::One; }

inline BoolExpr bool_not(const BoolExpr& e) {
    if (is_zero(e)) return bool_one();
    if (is_one(e)) return bool_zero();
    if (e->op == BoolOp::Not) return e->lhs;
    return std::make_shared<BoolNode>(BoolOp::Not, SymbolRef{}, e, nullptr);
}

namespace detail {

// And/Or are kept flattened, sorted, deduplicated; x together with !x
// collapses to the absorbing constant.
inline void flatten_bool(BoolOp op, const BoolExpr& e,
                         std::vector<BoolExpr>& out) {
    if (e->op == op) {
        flatten_bool(op, e->lhs, out);
        flatten_bool(op, e->rhs, out);
    } else {
        out.push_back(e);
    }
}

inline BoolExpr build_bool_chain(BoolOp op, BoolExpr absorbing, BoolExpr unit,
                                 const BoolExpr& a, const BoolExpr& b) {
    std::vector<BoolExpr> kids;
    flatten_bool(op, a, kids);
    flatten_bool(op, b, kids);
    std::vector<BoolExpr> keep;
    for (const auto& k : kids) {
        if (bool_equal(k, unit)) continue;
        if (bool_equal(k, absorbing)) return absorbing;
        keep.push_back(k);
    }
    std::sort(keep.begin(), keep.end(),
              [](const BoolExpr& x, const BoolExpr& y) {
                  return bool_cmp(x, y) < 0;
              });
    keep.erase(std::unique(keep.begin(), keep.end(),
                           [](const BoolExpr& x, const BoolExpr& y) {
                               return bool_equal(x, y);
                           }),
               keep.end());
    for (const auto& k : keep)
        if (k->op == BoolOp::Not)
            for (const auto& j : keep)
                if (bool_equal(k->lhs, j)) return absorbing;
    if (keep.empty()) return unit;
    BoolExpr acc = keep.back();
    for (size_t i = keep.size() - 1; i-- > 0;)
        acc = std::make_shared<BoolNode>(op, SymbolRef{}, keep[i], acc);
    return acc;
}

}  // namespace detail

inline BoolExpr bool_and(const BoolExpr& a, const BoolExpr& b) {
    if (is_zero(a) || is_zero(b)) return bool_zero();
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    if (bool_equal(a, b)) return a;
    return detail::build_bool_chain(BoolOp::And, bool_zero(), bool_one(), a, b);
}

inline BoolExpr bool_or(const BoolExpr& a, const BoolExpr& b) {
    if (is_one(a) || is_one(b)) return bool_one();
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    if (bool_equal(a, b)) return a;
    return detail::build_bool_chain(BoolOp::Or, bool_one(), bool_zero(), a, b);
}

// Test symbol or its negation.
struct TestLiteral {
    SymbolRef test;
    bool positive = true;

    friend bool operator==(const TestLiteral& a, const TestLiteral& b) {
        return a.test == b.test && a.positive == b.positive;
    }
    friend bool operator<(const TestLiteral& a, const TestLiteral& b) {
        if (a.test != b.test) return a.test < b.test;
        return a.positive > b.positive;  // positive literal first
    }
    TestLiteral negated() const { return TestLiteral{test, !positive}; }
};

inline BoolExpr bool_literal(const TestLiteral& l) {
    BoolExpr v = bool_var(l.test);
    return l.positive ? v : bool_not(v);
}

inline void collect_tests(const BoolExpr& e, std::set<SymbolRef>& out) {
    if (!e) return;
    if (e->op == BoolOp::Var) out.insert(e->var);
    collect_tests(e->lhs, out);
    collect_tests(e->rhs, out);
}

inline std::string bool_to_string(const BoolExpr& e, const SymbolTable& tab) {
    switch (e->op) {
    case BoolOp::Zero: return "0";
    case BoolOp::One: return "1";
    case BoolOp::Var: return tab.name(e->var);
    case BoolOp::Not: {
        const BoolExpr& c = e->lhs;
        if (c->op == BoolOp::Var || c->op == BoolOp::Zero || c->op == BoolOp::One)
            return "!" + bool_to_string(c, tab);
        return "!(" + bool_to_string(c, tab) + ")";
    }
    case BoolOp::And: {
        auto wrap = [&](const BoolExpr& c) {
            std::string s = bool_to_string(c, tab);
            return c->op == BoolOp::Or ? "(" + s + ")" : s;
        };
        return wrap(e->lhs) + "&" + wrap(e->rhs);
    }
    case BoolOp::Or:
        return bool_to_string(e->lhs, tab) + "|" + bool_to_string(e->rhs, tab);
    }
    return "?";
}

}  // namespace katrel

#endif
