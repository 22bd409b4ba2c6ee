// KAT expressions: regular-expression structure over action symbols with
// an embedded boolean test algebra. Immutable trees; the smart
// constructors keep terms normalized (units and zeros folded, sums
// flattened, deduplicated and canonically ordered, adjacent tests fused).

#ifndef KATREL_KAT_EXPR_HPP
#define KATREL_KAT_EXPR_HPP

#include <algorithm>
#include <cassert>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "katrel/bool_expr.hpp"
#include "katrel/symbols.hpp"

namespace katrel {

enum class KatOp : uint8_t { Test, Action, Seq, Sum, Star };

class KatNode;
using KatExpr = std::shared_ptr<const KatNode>;

class KatNode {
public:
    KatOp op;
    BoolExpr test;                  // Test
    SymbolRef action;               // Action
    KatExpr lhs, rhs;               // Seq (rhs null for Star via lhs)
    std::vector<KatExpr> children;  // Sum
    size_t hash = 0;

    explicit KatNode(KatOp o) : op(o) {}
};

namespace detail {
inline size_t kat_hash(const KatNode& n) {
    size_t h = static_cast<size_t>(n.op) * 0x9e3779b97f4a7c15ull + 1;
    switch (n.op) {
    case KatOp::Test: h ^= n.test->hash; break;
    case KatOp::Action: h ^= n.action.id * 0x2545f4914f6cdd1dull; break;
    case KatOp::Seq:
        h = h * 31 + n.lhs->hash;
        h = h * 37 + n.rhs->hash;
        break;
    case KatOp::Sum:
        for (const auto& c : n.children) h = h * 41 + c->hash;
        break;
    case KatOp::Star: h = h * 43 + n.lhs->hash; break;
    }
    return h;
}
}  // namespace detail

inline bool kat_equal(const KatExpr& a, const KatExpr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->hash != b->hash || a->op != b->op) return false;
    switch (a->op) {
    case KatOp::Test: return bool_equal(a->test, b->test);
    case KatOp::Action: return a->action == b->action;
    case KatOp::Seq:
        return kat_equal(a->lhs, b->lhs) && kat_equal(a->rhs, b->rhs);
    case KatOp::Sum: {
        if (a->children.size() != b->children.size()) return false;
        for (size_t i = 0; i < a->children.size(); ++i)
            if (!kat_equal(a->children[i], b->children[i])) return false;
        return true;
    }
    case KatOp::Star: return kat_equal(a->lhs, b->lhs);
    }
    return false;
}

inline int kat_cmp(const KatExpr& a, const KatExpr& b) {
    if (a == b) return 0;
    if (a->op != b->op) return a->op < b->op ? -1 : 1;
    switch (a->op) {
    case KatOp::Test: return bool_cmp(a->test, b->test);
    case KatOp::Action:
        return a->action.id == b->action.id
                   ? 0
                   : (a->action.id < b->action.id ? -1 : 1);
    case KatOp::Seq: {
        int c = kat_cmp(a->lhs, b->lhs);
        return c != 0 ? c : kat_cmp(a->rhs, b->rhs);
    }
    case KatOp::Sum: {
        if (a->children.size() != b->children.size())
            return a->children.size() < b->children.size() ? -1 : 1;
        for (size_t i = 0; i < a->children.size(); ++i) {
            int c = kat_cmp(a->children[i], b->children[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    case KatOp::Star: return kat_cmp(a->lhs, b->lhs);
    }
    return 0;
}

inline KatExpr kat_test(const BoolExpr& b) {
    auto n = std::make_shared<KatNode>(KatOp::Test);
    n->test = b;
    n->hash = detail::kat_hash(*n);
    return n;
}

inline KatExpr kat_zero() {
    static KatExpr z = kat_test(bool_zero());
    return z;
}

inline KatExpr kat_one() {
    static KatExpr o = kat_test(bool_one());
    return o;
}

inline KatExpr kat_action(SymbolRef a) {
    auto n = std::make_shared<KatNode>(KatOp::Action);
    n->action = a;
    n->hash = detail::kat_hash(*n);
    return n;
}

inline bool kat_is_zero(const KatExpr& e) {
    return e->op == KatOp::Test && is_zero(e->test);
}
inline bool kat_is_one(const KatExpr& e) {
    return e->op == KatOp::Test && is_one(e->test);
}

inline KatExpr kat_seq(const KatExpr& a, const KatExpr& b) {
    if (kat_is_zero(a) || kat_is_zero(b)) return kat_zero();
    if (kat_is_one(a)) return b;
    if (kat_is_one(b)) return a;
    // Right-associate so adjacent tests can fuse.
    if (a->op == KatOp::Seq) return kat_seq(a->lhs, kat_seq(a->rhs, b));
    if (a->op == KatOp::Test && b->op == KatOp::Test)
        return kat_test(bool_and(a->test, b->test));
    if (a->op == KatOp::Test && b->op == KatOp::Seq &&
        b->lhs->op == KatOp::Test)
        return kat_seq(kat_test(bool_and(a->test, b->lhs->test)), b->rhs);
    auto n = std::make_shared<KatNode>(KatOp::Seq);
    n->lhs = a;
    n->rhs = b;
    n->hash = detail::kat_hash(*n);
    return n;
}

inline KatExpr kat_sum(std::vector<KatExpr> terms) {
    std::vector<KatExpr> flat;
    BoolExpr tests = bool_zero();
    std::function<void(const KatExpr&)> add = [&](const KatExpr& e) {
        if (kat_is_zero(e)) return;
        if (e->op == KatOp::Sum) {
            for (const auto& c : e->children) add(c);
        } else if (e->op == KatOp::Test) {
            tests = bool_or(tests, e->test);
        } else {
            flat.push_back(e);
        }
    };
    for (const auto& t : terms) add(t);
    if (!is_zero(tests)) flat.push_back(kat_test(tests));
    std::sort(flat.begin(), flat.end(),
              [](const KatExpr& x, const KatExpr& y) { return kat_cmp(x, y) < 0; });
    flat.erase(std::unique(flat.begin(), flat.end(),
                           [](const KatExpr& x, const KatExpr& y) {
                               return kat_equal(x, y);
                           }),
               flat.end());
    if (flat.empty()) return kat_zero();
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<KatNode>(KatOp::Sum);
    n->children = std::move(flat);
    n->hash = detail::kat_hash(*n);
    return n;
}

inline KatExpr kat_sum(const KatExpr& a, const KatExpr& b) {
    return kat_sum(std::vector<KatExpr>{a, b});
}

inline KatExpr kat_star(const KatExpr& e) {
    // b* = 1 for any test b, covering 0* = 1* = 1.
    if (e->op == KatOp::Test) return kat_one();
    if (e->op == KatOp::Star) return e;
    auto n = std::make_shared<KatNode>(KatOp::Star);
    n->lhs = e;
    n->hash = detail::kat_hash(*n);
    return n;
}

inline void collect_symbols(const KatExpr& e, std::set<SymbolRef>& tests,
                            std::set<SymbolRef>& actions) {
    switch (e->op) {
    case KatOp::Test: collect_tests(e->test, tests); break;
    case KatOp::Action: actions.insert(e->action); break;
    case KatOp::Seq:
        collect_symbols(e->lhs, tests, actions);
        collect_symbols(e->rhs, tests, actions);
        break;
    case KatOp::Sum:
        for (const auto& c : e->children) collect_symbols(c, tests, actions);
        break;
    case KatOp::Star: collect_symbols(e->lhs, tests, actions); break;
    }
}

// --- printing (the CLI textual syntax: `.` seq, `+` sum, postfix `*`,
// `!` negation, `0`, `1`; actions uppercase, tests lowercase) ---

namespace detail {

// precedence: 0 sum, 1 seq, 2 atom/star
inline std::string bool_kat_str(const BoolExpr& e, const SymbolTable& tab,
                                int prec) {
    switch (e->op) {
    case BoolOp::Zero: return "0";
    case BoolOp::One: return "1";
    case BoolOp::Var: return tab.name(e->var);
    case BoolOp::Not:
        // precedence 2 parenthesizes compound operands
        return "!" + bool_kat_str(e->lhs, tab, 2);
    case BoolOp::And: {
        std::string s =
            bool_kat_str(e->lhs, tab, 1) + "." + bool_kat_str(e->rhs, tab, 1);
        return prec > 1 ? "(" + s + ")" : s;
    }
    case BoolOp::Or: {
        std::string s =
            bool_kat_str(e->lhs, tab, 0) + "+" + bool_kat_str(e->rhs, tab, 0);
        return prec > 0 ? "(" + s + ")" : s;
    }
    }
    return "?";
}

inline std::string kat_str(const KatExpr& e, const SymbolTable& tab, int prec) {
    switch (e->op) {
    case KatOp::Test: return bool_kat_str(e->test, tab, prec);
    case KatOp::Action: return tab.name(e->action);
    case KatOp::Seq: {
        std::string s = kat_str(e->lhs, tab, 1) + "." + kat_str(e->rhs, tab, 1);
        return prec > 1 ? "(" + s + ")" : s;
    }
    case KatOp::Sum: {
        std::string s;
        for (size_t i = 0; i < e->children.size(); ++i) {
            if (i) s += "+";
            s += kat_str(e->children[i], tab, 0);
        }
        return prec > 0 ? "(" + s + ")" : s;
    }
    case KatOp::Star: return kat_str(e->lhs, tab, 2) + "*";
    }
    return "?";
}

}  // namespace detail

inline std::string to_string(const KatExpr& e, const SymbolTable& tab) {
    return detail::kat_str(e, tab, 0);
}

// --- counterexample strings ---

// One element of a counterexample string: an action symbol or a test
// literal. Counterexamples list only the literals relevant along the
// discriminating path, so an atom position may contribute zero or more
// literals.
struct CexElem {
    bool is_action = false;
    SymbolRef action;
    TestLiteral lit;

    static CexElem make_action(SymbolRef a) {
        CexElem e;
        e.is_action = true;
        e.action = a;
        return e;
    }
    static CexElem make_literal(TestLiteral l) {
        CexElem e;
        e.is_action = false;
        e.lit = l;
        return e;
    }
    friend bool operator==(const CexElem& a, const CexElem& b) {
        if (a.is_action != b.is_action) return false;
        return a.is_action ? a.action == b.action : a.lit == b.lit;
    }
};

struct CexString {
    std::vector<CexElem> elems;

    bool empty() const { return elems.empty(); }
    size_t size() const { return elems.size(); }

    std::string str(const SymbolTable& tab) const {
        if (elems.empty()) return "1";
        std::string s;
        for (size_t i = 0; i < elems.size(); ++i) {
            if (i) s += ".";
            const CexElem& e = elems[i];
            if (e.is_action)
                s += tab.name(e.action);
            else
                s += (e.lit.positive ? "" : "!") + tab.name(e.lit.test);
        }
        return s;
    }
};

// Concatenation-only expression with the same element sequence.
inline KatExpr kat_of_cex(const CexString& s) {
    assert(!s.empty());
    KatExpr acc = kat_one();
    for (auto it = s.elems.rbegin(); it != s.elems.rend(); ++it) {
        KatExpr e = it->is_action ? kat_action(it->action)
                                  : kat_test(bool_literal(it->lit));
        acc = kat_seq(e, acc);
    }
    return acc;
}

}  // namespace katrel

#endif
