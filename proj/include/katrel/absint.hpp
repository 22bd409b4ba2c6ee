// Forward abstract interpreter over intervals with extended-integer
// bounds. Produces per-location entry invariants used by the translation
// to prune infeasible branches and detect dead or nonterminating code.
// Widening kicks in after a fixed unrolling delay; one descending pass
// narrows the result.

#ifndef KATREL_ABSINT_HPP
#define KATREL_ABSINT_HPP

#include <limits>
#include <map>
#include <string>

#include "katrel/lang.hpp"

namespace katrel {

// Extended integers: INT64_MIN/MAX act as -oo/+oo; arithmetic saturates.
struct Bound {
    static constexpr int64_t NEG = std::numeric_limits<int64_t>::min();
    static constexpr int64_t POS = std::numeric_limits<int64_t>::max();

    static int64_t add(int64_t a, int64_t b) {
        if (a == NEG || b == NEG) return NEG;
        if (a == POS || b == POS) return POS;
        int64_t r;
        if (__builtin_add_overflow(a, b, &r)) return b > 0 ? POS : NEG;
        return r;
    }
    static int64_t neg(int64_t a) {
        if (a == NEG) return POS;
        if (a == POS) return NEG;
        return -a;
    }
};

struct Interval {
    int64_t lo = Bound::NEG;
    int64_t hi = Bound::POS;

    static Interval top() { return {}; }
    static Interval constant(int64_t v) { return {v, v}; }
    bool is_top() const { return lo == Bound::NEG && hi == Bound::POS; }
    bool valid() const { return lo <= hi; }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }

    Interval join(const Interval& o) const {
        return {std::min(lo, o.lo), std::max(hi, o.hi)};
    }
    // empty meets are signalled by an invalid interval
    Interval meet(const Interval& o) const {
        return {std::max(lo, o.lo), std::min(hi, o.hi)};
    }
    Interval widen(const Interval& o) const {
        return {o.lo < lo ? Bound::NEG : lo, o.hi > hi ? Bound::POS : hi};
    }
    bool contains(const Interval& o) const {
        return lo <= o.lo && o.hi <= hi;
    }

    Interval add(const Interval& o) const {
        return {Bound::add(lo, o.lo), Bound::add(hi, o.hi)};
    }
    Interval negate() const { return {Bound::neg(hi), Bound::neg(lo)}; }

    std::string str() const {
        auto b = [](int64_t v) {
            if (v == Bound::NEG) return std::string("-inf");
            if (v == Bound::POS) return std::string("+inf");
            return std::to_string(v);
        };
        return "[" + b(lo) + ", " + b(hi) + "]";
    }
};

struct AbstractState {
    bool bottom = false;
    std::map<std::string, Interval> vars;  // unbound variables are top

    static AbstractState bot() {
        AbstractState s;
        s.bottom = true;
        return s;
    }

    bool is_bottom() const { return bottom; }

    Interval get(const std::string& v) const {
        auto it = vars.find(v);
        return it == vars.end() ? Interval::top() : it->second;
    }

    void set(const std::string& v, Interval i) {
        if (!i.valid()) {
            *this = bot();
            return;
        }
        if (i.is_top())
            vars.erase(v);
        else
            vars[v] = i;
    }

    friend bool operator==(const AbstractState& a, const AbstractState& b) {
        if (a.bottom != b.bottom) return false;
        if (a.bottom) return true;
        return a.vars == b.vars;
    }

    AbstractState join(const AbstractState& o) const {
        if (bottom) return o;
        if (o.bottom) return *this;
        AbstractState r;
        for (const auto& [v, i] : vars) {
            auto it = o.vars.find(v);
            if (it == o.vars.end()) continue;  // other side top
            Interval j = i.join(it->second);
            if (!j.is_top()) r.vars[v] = j;
        }
        return r;
    }

    AbstractState widen(const AbstractState& o) const {
        if (bottom) return o;
        if (o.bottom) return *this;
        AbstractState r;
        for (const auto& [v, i] : vars) {
            auto it = o.vars.find(v);
            if (it == o.vars.end()) continue;
            Interval w = i.widen(it->second);
            if (!w.is_top()) r.vars[v] = w;
        }
        return r;
    }

    // partial order: every concretization of o is contained in this
    bool contains(const AbstractState& o) const {
        if (o.bottom) return true;
        if (bottom) return false;
        for (const auto& [v, i] : vars)
            if (!i.contains(o.get(v))) return false;
        return true;
    }

    std::string str() const {
        if (bottom) return "_|_";
        if (vars.empty()) return "T";
        std::string s;
        for (const auto& [v, i] : vars) {
            if (!s.empty()) s += ", ";
            s += v + " in " + i.str();
        }
        return s;
    }
};

enum class CondEval : uint8_t { True, False, Unknown, Unreachable };

namespace detail {

inline Interval eval_int(const AbstractState& s, const IntExpr& e) {
    switch (e->op) {
    case IntOp::Const: return Interval::constant(e->value);
    case IntOp::Var: return s.get(e->var);
    case IntOp::Nondet: return Interval::top();
    case IntOp::Add: return eval_int(s, e->lhs).add(eval_int(s, e->rhs));
    case IntOp::Sub:
        return eval_int(s, e->lhs).add(eval_int(s, e->rhs).negate());
    case IntOp::Neg: return eval_int(s, e->lhs).negate();
    }
    return Interval::top();
}

// three-valued comparison of (l - r) REL 0
inline CondEval eval_cmp(const AbstractState& s, RelOp rel, const IntExpr& l,
                         const IntExpr& r) {
    Interval d = eval_int(s, l).add(eval_int(s, r).negate());
    switch (rel) {
    case RelOp::Lt:
        if (d.hi < 0) return CondEval::True;
        if (d.lo >= 0) return CondEval::False;
        return CondEval::Unknown;
    case RelOp::Le:
        if (d.hi <= 0) return CondEval::True;
        if (d.lo > 0) return CondEval::False;
        return CondEval::Unknown;
    case RelOp::Gt:
        if (d.lo > 0) return CondEval::True;
        if (d.hi <= 0) return CondEval::False;
        return CondEval::Unknown;
    case RelOp::Ge:
        if (d.lo >= 0) return CondEval::True;
        if (d.hi < 0) return CondEval::False;
        return CondEval::Unknown;
    case RelOp::Eq:
        if (d.lo == 0 && d.hi == 0) return CondEval::True;
        if (d.lo > 0 || d.hi < 0) return CondEval::False;
        return CondEval::Unknown;
    case RelOp::Ne:
        if (d.lo > 0 || d.hi < 0) return CondEval::True;
        if (d.lo == 0 && d.hi == 0) return CondEval::False;
        return CondEval::Unknown;
    }
    return CondEval::Unknown;
}

}  // namespace detail

inline CondEval eval_cond(const AbstractState& s, const BoolCond& c) {
    if (s.is_bottom()) return CondEval::Unreachable;
    switch (c->op) {
    case CondOp::True: return CondEval::True;
    case CondOp::False: return CondEval::False;
    case CondOp::Cmp: return detail::eval_cmp(s, c->rel, c->cl, c->cr);
    case CondOp::Not: {
        CondEval e = eval_cond(s, c->lhs);
        if (e == CondEval::True) return CondEval::False;
        if (e == CondEval::False) return CondEval::True;
        return e;
    }
    case CondOp::And: {
        CondEval a = eval_cond(s, c->lhs), b = eval_cond(s, c->rhs);
        if (a == CondEval::False || b == CondEval::False)
            return CondEval::False;
        if (a == CondEval::True && b == CondEval::True) return CondEval::True;
        return CondEval::Unknown;
    }
    case CondOp::Or: {
        CondEval a = eval_cond(s, c->lhs), b = eval_cond(s, c->rhs);
        if (a == CondEval::True || b == CondEval::True) return CondEval::True;
        if (a == CondEval::False && b == CondEval::False)
            return CondEval::False;
        return CondEval::Unknown;
    }
    }
    return CondEval::Unknown;
}

namespace detail {

// Refine a state by assuming an atomic comparison. Propagates bounds to
// variables occurring with unit coefficient in the linear form.
inline AbstractState refine_cmp(AbstractState s, RelOp rel, const IntExpr& l,
                                const IntExpr& r) {
    CondEval ce = eval_cmp(s, rel, l, r);
    if (ce == CondEval::False) return AbstractState::bot();
    // normalize to lin <= 0 / lin == 0; Ne refines nothing
    if (rel == RelOp::Ne) return s;
    if (rel == RelOp::Gt || rel == RelOp::Ge || rel == RelOp::Lt) {
        // rewrite via complement/shift to <= or ==
        // l > r   ==  r - l + 1 <= 0
        // l >= r  ==  r - l <= 0
        // l < r   ==  l - r + 1 <= 0
        IntExpr one = int_const(1);
        switch (rel) {
        case RelOp::Gt:
            return refine_cmp(std::move(s), RelOp::Le,
                              int_bin(IntOp::Add, int_bin(IntOp::Sub, r, l),
                                      one),
                              int_const(0));
        case RelOp::Ge:
            return refine_cmp(std::move(s), RelOp::Le, int_bin(IntOp::Sub, r, l),
                              int_const(0));
        case RelOp::Lt:
            return refine_cmp(std::move(s), RelOp::Le,
                              int_bin(IntOp::Add, int_bin(IntOp::Sub, l, r),
                                      one),
                              int_const(0));
        default: break;
        }
    }

    LinForm f = linearize(l);
    f.add(linearize(r), -1);
    // lin <= 0 or lin == 0; refine each unit-coefficient variable
    for (const auto& [v, coeff] : f.coeffs) {
        if (coeff != 1 && coeff != -1) continue;
        // rest = lin - coeff*v ; interval of rest under s
        Interval rest = Interval::constant(f.constant);
        bool precise = true;
        for (const auto& [w, cw] : f.coeffs) {
            if (w == v) continue;
            if (cw != 1 && cw != -1) {
                precise = false;
                break;
            }
            Interval iw = s.get(w);
            rest = rest.add(cw == 1 ? iw : iw.negate());
        }
        if (!precise) continue;
        Interval iv = s.get(v);
        if (coeff == 1) {
            // v <= -rest  (and >= for ==)
            int64_t ub = Bound::neg(rest.lo);
            Interval ref{Bound::NEG, ub};
            if (rel == RelOp::Eq) ref.lo = Bound::neg(rest.hi);
            s.set(v, iv.meet(ref));
        } else {
            // -v + rest <= 0: v >= rest
            int64_t lb = rest.lo;
            Interval ref{lb, Bound::POS};
            if (rel == RelOp::Eq) ref.hi = rest.hi;
            s.set(v, iv.meet(ref));
        }
        if (s.is_bottom()) return s;
    }
    return s;
}

}  // namespace detail

// Assume cond in state s (three-valued; Or joins both refinements).
inline AbstractState refine(const AbstractState& s, const BoolCond& c) {
    if (s.is_bottom()) return s;
    switch (c->op) {
    case CondOp::True: return s;
    case CondOp::False: return AbstractState::bot();
    case CondOp::Cmp: return detail::refine_cmp(s, c->rel, c->cl, c->cr);
    case CondOp::Not: return refine(s, cond_negate(c->lhs));
    case CondOp::And: return refine(refine(s, c->lhs), c->rhs);
    case CondOp::Or: {
        AbstractState a = refine(s, c->lhs);
        AbstractState b = refine(s, c->rhs);
        return a.join(b);
    }
    }
    return s;
}

// Invariant map: state on entry to each statement. While statements
// record the loop-head fixpoint (the state each guard evaluation sees);
// `after` additionally records the state following each statement.
struct InvariantMap {
    std::map<std::vector<uint32_t>, AbstractState> entry;
    std::map<std::vector<uint32_t>, AbstractState> after;

    const AbstractState& at(const Location& loc) const {
        static const AbstractState top;
        auto it = entry.find(loc.path);
        return it == entry.end() ? top : it->second;
    }
    const AbstractState& at_exit(const Location& loc) const {
        static const AbstractState top;
        auto it = after.find(loc.path);
        return it == after.end() ? top : it->second;
    }

    std::string dump() const {
        std::string s;
        for (const auto& [path, st] : entry) {
            s += "@";
            for (size_t i = 0; i < path.size(); ++i)
                s += (i ? "." : "") + std::to_string(path[i]);
            s += ": " + st.str() + "\n";
        }
        return s;
    }
};

namespace detail {

constexpr int kWideningDelay = 3;
constexpr int kMaxIterations = 500;

inline AbstractState transfer(const StmtPtr& s, AbstractState in,
                              InvariantMap& inv) {
    if (s->kind != StmtKind::While) inv.entry[s->loc.path] = in;
    AbstractState out = in;
    switch (s->kind) {
    case StmtKind::Skip: break;
    case StmtKind::Fail: out = AbstractState::bot(); break;
    case StmtKind::Assign:
        if (!out.is_bottom()) out.set(s->var, eval_int(out, s->rhs));
        break;
    case StmtKind::EventCall:
        if (!out.is_bottom() && s->has_binding)
            out.set(s->var, Interval::top());
        break;
    case StmtKind::Assume: out = refine(out, s->cond); break;
    case StmtKind::Seq:
        for (const auto& c : s->stmts) out = transfer(c, out, inv);
        break;
    case StmtKind::If: {
        AbstractState t = transfer(s->then_branch, refine(in, s->cond), inv);
        AbstractState e =
            transfer(s->else_branch, refine(in, cond_negate(s->cond)), inv);
        out = t.join(e);
        break;
    }
    case StmtKind::While: {
        AbstractState head = in;
        for (int iter = 0;; ++iter) {
            AbstractState body_out =
                transfer(s->body, refine(head, s->cond), inv);
            AbstractState next = in.join(body_out);
            if (head.contains(next) && iter > 0) break;
            if (iter >= kWideningDelay) next = head.widen(next);
            if (next == head && iter > 0) break;
            head = next;
            if (iter > kMaxIterations)
                throw std::logic_error("interval analysis did not stabilize");
        }
        // one descending pass
        {
            AbstractState body_out =
                transfer(s->body, refine(head, s->cond), inv);
            AbstractState narrow = in.join(body_out);
            if (head.contains(narrow)) head = narrow;
            // re-record body invariants under the narrowed head
            transfer(s->body, refine(head, s->cond), inv);
        }
        inv.entry[s->loc.path] = head;
        out = refine(head, cond_negate(s->cond));
        break;
    }
    }
    inv.after[s->loc.path] = out;
    return out;
}

}  // namespace detail

// Entry invariants for every statement, from a top initial state over
// the parameters.
inline InvariantMap analyze(const Program& p) {
    InvariantMap inv;
    AbstractState init;
    detail::transfer(p.body, init, inv);
    return inv;
}

}  // namespace katrel

#endif
