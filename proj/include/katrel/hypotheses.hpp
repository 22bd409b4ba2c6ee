// KAT hypotheses: extra equations that weaken equivalence. Supported
// classes: an action is skip (A=1), a test is constant (b=0, b=1), two
// actions are equal (A=B), two test literals are equal (a=b, a=!b).
// Checking e1 <= e2 modulo a hypothesis set reduces to a plain language
// check on rewritten terms: every equated class collapses to a single
// canonical representative and constants are substituted.

#ifndef KATREL_HYPOTHESES_HPP
#define KATREL_HYPOTHESES_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "katrel/kat_expr.hpp"

namespace katrel {

struct InconsistentHypotheses : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class HypKind : uint8_t { ActionIsSkip, TestConst, ActionEq, TestLitEq };

struct Hypothesis {
    HypKind kind;
    SymbolRef a, b;       // ActionEq: a=b; ActionIsSkip: a
    bool value = true;    // TestConst: a = value
    TestLiteral l1, l2;   // TestLitEq: l1 = l2

    static Hypothesis action_is_skip(SymbolRef a) {
        Hypothesis h;
        h.kind = HypKind::ActionIsSkip;
        h.a = a;
        return h;
    }
    static Hypothesis test_const(SymbolRef t, bool v) {
        Hypothesis h;
        h.kind = HypKind::TestConst;
        h.a = t;
        h.value = v;
        return h;
    }
    static Hypothesis action_eq(SymbolRef a, SymbolRef b) {
        if (a == b) throw std::invalid_argument("action_eq on one symbol");
        Hypothesis h;
        h.kind = HypKind::ActionEq;
        h.a = a;
        h.b = b;
        return h;
    }
    static Hypothesis test_lit_eq(TestLiteral l1, TestLiteral l2) {
        if (l1.test == l2.test)
            throw std::invalid_argument("test_lit_eq on one symbol");
        Hypothesis h;
        h.kind = HypKind::TestLitEq;
        h.l1 = l1;
        h.l2 = l2;
        return h;
    }

    friend bool operator==(const Hypothesis& x, const Hypothesis& y) {
        if (x.kind != y.kind) return false;
        switch (x.kind) {
        case HypKind::ActionIsSkip: return x.a == y.a;
        case HypKind::TestConst: return x.a == y.a && x.value == y.value;
        case HypKind::ActionEq:
            return (x.a == y.a && x.b == y.b) || (x.a == y.b && x.b == y.a);
        case HypKind::TestLitEq:
            return (x.l1 == y.l1 && x.l2 == y.l2) ||
                   (x.l1 == y.l2 && x.l2 == y.l1);
        }
        return false;
    }

    std::string str(const SymbolTable& tab) const {
        auto lit = [&](const TestLiteral& l) {
            return (l.positive ? "" : "!") + tab.name(l.test);
        };
        switch (kind) {
        case HypKind::ActionIsSkip: return tab.name(a) + "=1";
        case HypKind::TestConst: return tab.name(a) + (value ? "=1" : "=0");
        case HypKind::ActionEq: return tab.name(a) + "=" + tab.name(b);
        case HypKind::TestLitEq: return lit(l1) + "=" + lit(l2);
        }
        return "?";
    }
};

// Plain ordered set of hypotheses; insertion checks TestConst consistency.
class HypothesisSet {
public:
    HypothesisSet() = default;

    bool insert(Hypothesis h) {
        for (const auto& e : hyps_)
            if (e == h) return false;
        if (h.kind == HypKind::TestConst) {
            for (const auto& e : hyps_)
                if (e.kind == HypKind::TestConst && e.a == h.a &&
                    e.value != h.value)
                    throw InconsistentHypotheses("contradictory test constants");
        }
        hyps_.push_back(h);
        return true;
    }

    HypothesisSet with(const Hypothesis& h) const {
        HypothesisSet s = *this;
        s.insert(h);
        return s;
    }
    HypothesisSet merged(const HypothesisSet& other) const {
        HypothesisSet s = *this;
        for (const auto& h : other.hyps_) s.insert(h);
        return s;
    }

    bool contains(const Hypothesis& h) const {
        for (const auto& e : hyps_)
            if (e == h) return true;
        return false;
    }

    const std::vector<Hypothesis>& items() const { return hyps_; }
    bool empty() const { return hyps_.empty(); }
    size_t size() const { return hyps_.size(); }

    std::string str(const SymbolTable& tab) const {
        std::string s = "{";
        for (size_t i = 0; i < hyps_.size(); ++i) {
            if (i) s += ", ";
            s += hyps_[i].str(tab);
        }
        return s + "}";
    }

private:
    std::vector<Hypothesis> hyps_;
};

namespace detail {

// Signed union-find over test symbols: find() returns (root, parity)
// where parity records whether the symbol equals the root literal or its
// negation.
class SignedUnionFind {
public:
    std::pair<SymbolRef, bool> find(SymbolRef x) {
        auto it = parent_.find(x.id);
        if (it == parent_.end()) return {x, true};
        auto [root, par] = find(SymbolRef{it->second.first});
        bool combined = par == it->second.second;
        parent_[x.id] = {root.id, combined};
        return {root, combined};
    }

    // Declare x == y when same_pol, x == !y otherwise.
    void unite(SymbolRef x, SymbolRef y, bool same_pol) {
        auto [rx, px] = find(x);
        auto [ry, py] = find(y);
        bool rel = same_pol == (px == py);
        if (rx == ry) {
            if (!rel)
                throw InconsistentHypotheses("literal equated with its negation");
            return;
        }
        // Smaller id becomes the class representative; the relation is
        // symmetric, so the swap needs no parity fixup.
        if (ry < rx) std::swap(rx, ry);
        parent_[ry.id] = {rx.id, rel};
    }

private:
    std::map<uint32_t, std::pair<uint32_t, bool>> parent_;
};

class PlainUnionFind {
public:
    SymbolRef find(SymbolRef x) {
        auto it = parent_.find(x.id);
        if (it == parent_.end()) return x;
        SymbolRef r = find(SymbolRef{it->second});
        parent_[x.id] = r.id;
        return r;
    }
    void unite(SymbolRef x, SymbolRef y) {
        SymbolRef rx = find(x), ry = find(y);
        if (rx == ry) return;
        if (ry < rx) std::swap(rx, ry);
        parent_[ry.id] = rx.id;
    }

private:
    std::map<uint32_t, uint32_t> parent_;
};

}  // namespace detail

// The substitution induced by a hypothesis set, after closure: action
// classes collapse to the smallest member (or to skip when any member is
// skip); test classes collapse to the smallest member with matching
// polarity (or to a constant).
class HypothesisRewriter {
public:
    explicit HypothesisRewriter(const HypothesisSet& hs) {
        detail::PlainUnionFind acts;
        detail::SignedUnionFind tests;
        std::vector<SymbolRef> skip_actions;
        std::vector<std::pair<SymbolRef, bool>> consts;
        for (const auto& h : hs.items()) {
            switch (h.kind) {
            case HypKind::ActionIsSkip: skip_actions.push_back(h.a); break;
            case HypKind::ActionEq: acts.unite(h.a, h.b); break;
            case HypKind::TestConst: consts.emplace_back(h.a, h.value); break;
            case HypKind::TestLitEq:
                tests.unite(h.l1.test, h.l2.test,
                            h.l1.positive == h.l2.positive);
                break;
            }
        }
        for (const auto& h : hs.items()) {
            if (h.kind == HypKind::ActionEq) {
                action_rep_[h.a.id] = acts.find(h.a);
                action_rep_[h.b.id] = acts.find(h.b);
            }
            if (h.kind == HypKind::TestLitEq) {
                test_rep_[h.l1.test.id] = tests.find(h.l1.test);
                test_rep_[h.l2.test.id] = tests.find(h.l2.test);
            }
        }
        // A skip action infects its whole class.
        for (SymbolRef a : skip_actions) skip_.insert(acts.find(a).id);
        for (const auto& [aid, rep] : action_rep_)
            if (skip_.count(rep.id)) skip_.insert(aid);
        for (SymbolRef a : skip_actions) skip_.insert(a.id);
        // A constant test infects its class, with parity.
        for (const auto& [t, v] : consts) {
            auto [root, par] = tests.find(t);
            bool root_val = par ? v : !v;
            auto it = const_.find(root.id);
            if (it != const_.end() && it->second != root_val)
                throw InconsistentHypotheses("contradictory test constants");
            const_[root.id] = root_val;
        }
    }

    bool action_is_skip(SymbolRef a) const { return skip_.count(a.id) > 0; }

    SymbolRef action_rep(SymbolRef a) const {
        auto it = action_rep_.find(a.id);
        return it == action_rep_.end() ? a : it->second;
    }

    // Rewrites a test symbol to (constant) or (representative, parity).
    // Returns {rep, parity, has_const, const_val}.
    struct TestImage {
        SymbolRef rep;
        bool parity = true;
        bool is_const = false;
        bool const_val = false;
    };
    TestImage test_image(SymbolRef t) const {
        TestImage img;
        img.rep = t;
        auto it = test_rep_.find(t.id);
        if (it != test_rep_.end()) {
            img.rep = it->second.first;
            img.parity = it->second.second;
        }
        auto c = const_.find(img.rep.id);
        if (c != const_.end()) {
            img.is_const = true;
            img.const_val = img.parity ? c->second : !c->second;
        }
        return img;
    }

    BoolExpr rewrite(const BoolExpr& e) const {
        switch (e->op) {
        case BoolOp::Zero:
        case BoolOp::One: return e;
        case BoolOp::Var: {
            TestImage img = test_image(e->var);
            if (img.is_const) return bool_const(img.const_val);
            BoolExpr v = bool_var(img.rep);
            return img.parity ? v : bool_not(v);
        }
        case BoolOp::Not: return bool_not(rewrite(e->lhs));
        case BoolOp::And: return bool_and(rewrite(e->lhs), rewrite(e->rhs));
        case BoolOp::Or: return bool_or(rewrite(e->lhs), rewrite(e->rhs));
        }
        return e;
    }

    KatExpr rewrite(const KatExpr& e) const {
        switch (e->op) {
        case KatOp::Test: return kat_test(rewrite(e->test));
        case KatOp::Action:
            if (action_is_skip(e->action)) return kat_one();
            return kat_action(action_rep(e->action));
        case KatOp::Seq: return kat_seq(rewrite(e->lhs), rewrite(e->rhs));
        case KatOp::Sum: {
            std::vector<KatExpr> cs;
            cs.reserve(e->children.size());
            for (const auto& c : e->children) cs.push_back(rewrite(c));
            return kat_sum(std::move(cs));
        }
        case KatOp::Star: return kat_star(rewrite(e->lhs));
        }
        return e;
    }

private:
    std::map<uint32_t, bool> const_;
    std::map<uint32_t, SymbolRef> action_rep_;
    std::map<uint32_t, std::pair<SymbolRef, bool>> test_rep_;
    std::set<uint32_t> skip_;
};

inline KatExpr rewrite_under_hypotheses(const KatExpr& e,
                                        const HypothesisSet& hs) {
    if (hs.empty()) return e;
    return HypothesisRewriter(hs).rewrite(e);
}

}  // namespace katrel

#endif
