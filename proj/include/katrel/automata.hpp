// Guarded-string semantics for KAT expressions.
//
// Expressions compile to symbolic automata via Antimirov-style partial
// derivatives: states carry a residual expression, transitions carry a
// boolean guard and one action, acceptance is a boolean output test. A
// guarded string (atom, action, atom, ..., atom) is accepted when some
// run satisfies every guard at the atom before its action and the final
// atom satisfies the output test of the last state.
//
// Inclusion and equivalence are decided by an on-the-fly bisimulation
// over determinized automata (worklist of state-set pairs). Failures
// yield a shortest-by-action-count witness, minimized to the literals
// that actually discriminate.

#ifndef KATREL_AUTOMATA_HPP
#define KATREL_AUTOMATA_HPP

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "katrel/hypotheses.hpp"
#include "katrel/kat_expr.hpp"

namespace katrel {

struct AlphabetTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A total truth assignment over the in-scope tests, packed as a bitmask
// indexed by the test's position in Alphabet::tests.
using Atom = uint32_t;

struct Alphabet {
    std::vector<SymbolRef> tests;    // sorted by id
    std::vector<SymbolRef> actions;  // sorted by id
    std::map<uint32_t, unsigned> test_bit;

    void finish() {
        std::sort(tests.begin(), tests.end());
        tests.erase(std::unique(tests.begin(), tests.end()), tests.end());
        std::sort(actions.begin(), actions.end());
        actions.erase(std::unique(actions.begin(), actions.end()),
                      actions.end());
        test_bit.clear();
        for (unsigned i = 0; i < tests.size(); ++i) test_bit[tests[i].id] = i;
    }

    size_t atom_count() const {
        if (tests.size() > 24) throw AlphabetTooLarge("too many tests in scope");
        return size_t{1} << tests.size();
    }

    bool bit(Atom a, SymbolRef t) const {
        auto it = test_bit.find(t.id);
        if (it == test_bit.end())
            throw std::logic_error("test not in alphabet: id " +
                                   std::to_string(t.id));
        return (a >> it->second) & 1u;
    }

    friend bool operator==(const Alphabet& x, const Alphabet& y) {
        return x.tests == y.tests && x.actions == y.actions;
    }
};

inline Alphabet alphabet_of(std::initializer_list<KatExpr> exprs) {
    std::set<SymbolRef> ts, as;
    for (const auto& e : exprs) collect_symbols(e, ts, as);
    Alphabet a;
    a.tests.assign(ts.begin(), ts.end());
    a.actions.assign(as.begin(), as.end());
    a.finish();
    return a;
}

inline bool eval_atom(const BoolExpr& e, const Alphabet& al, Atom a) {
    switch (e->op) {
    case BoolOp::Zero: return false;
    case BoolOp::One: return true;
    case BoolOp::Var: return al.bit(a, e->var);
    case BoolOp::Not: return !eval_atom(e->lhs, al, a);
    case BoolOp::And:
        return eval_atom(e->lhs, al, a) && eval_atom(e->rhs, al, a);
    case BoolOp::Or:
        return eval_atom(e->lhs, al, a) || eval_atom(e->rhs, al, a);
    }
    return false;
}

// Satisfiable over the guard's own tests (cheap sweep; guards are small).
inline bool guard_satisfiable(const BoolExpr& e) {
    std::set<SymbolRef> ts;
    collect_tests(e, ts);
    Alphabet al;
    al.tests.assign(ts.begin(), ts.end());
    al.finish();
    if (al.tests.size() > 16) return true;  // give up, keep the guard
    size_t n = al.atom_count();
    for (Atom a = 0; a < n; ++a)
        if (eval_atom(e, al, a)) return true;
    return false;
}

struct GATransition {
    BoolExpr guard;
    SymbolRef action;
    uint32_t target;
};

struct GuardedAutomaton {
    SymbolTablePtr table;
    Alphabet alphabet;
    uint32_t initial = 0;
    std::vector<BoolExpr> accept;                      // per state
    std::vector<std::vector<GATransition>> transitions;  // per state

    size_t size() const { return accept.size(); }

    // Line-oriented debug format: one "state" line per state with its
    // accept guard, then one line per transition.
    std::string dump() const {
        std::ostringstream os;
        for (size_t s = 0; s < size(); ++s) {
            os << "state " << s << (s == initial ? " initial" : "")
               << " accept " << bool_to_string(accept[s], *table) << "\n";
            for (const auto& t : transitions[s])
                os << "  " << bool_to_string(t.guard, *table) << " --"
                   << table->name(t.action) << "--> " << t.target << "\n";
        }
        return os.str();
    }
};

namespace detail {

// Output test E(e): whether a lone atom satisfying it is in the language.
inline BoolExpr obs(const KatExpr& e) {
    switch (e->op) {
    case KatOp::Test: return e->test;
    case KatOp::Action: return bool_zero();
    case KatOp::Seq: return bool_and(obs(e->lhs), obs(e->rhs));
    case KatOp::Sum: {
        BoolExpr b = bool_zero();
        for (const auto& c : e->children) b = bool_or(b, obs(c));
        return b;
    }
    case KatOp::Star: return bool_one();
    }
    return bool_zero();
}

struct LinTerm {
    BoolExpr guard;
    SymbolRef action;
    KatExpr rest;
};

inline void lin(const KatExpr& e, const BoolExpr& pre,
                std::vector<LinTerm>& out) {
    if (is_zero(pre)) return;
    switch (e->op) {
    case KatOp::Test: return;
    case KatOp::Action:
        out.push_back({pre, e->action, kat_one()});
        return;
    case KatOp::Seq: {
        std::vector<LinTerm> left;
        lin(e->lhs, pre, left);
        for (auto& t : left)
            out.push_back({t.guard, t.action, kat_seq(t.rest, e->rhs)});
        lin(e->rhs, bool_and(pre, obs(e->lhs)), out);
        return;
    }
    case KatOp::Sum:
        for (const auto& c : e->children) lin(c, pre, out);
        return;
    case KatOp::Star: {
        std::vector<LinTerm> body;
        lin(e->lhs, pre, body);
        for (auto& t : body)
            out.push_back({t.guard, t.action, kat_seq(t.rest, e)});
        return;
    }
    }
}

struct KatExprLess {
    bool operator()(const KatExpr& a, const KatExpr& b) const {
        return kat_cmp(a, b) < 0;
    }
};

}  // namespace detail

inline GuardedAutomaton compile(const KatExpr& e, SymbolTablePtr table,
                                const Alphabet& alphabet) {
    GuardedAutomaton ga;
    ga.table = std::move(table);
    ga.alphabet = alphabet;
    std::map<KatExpr, uint32_t, detail::KatExprLess> index;
    std::vector<KatExpr> order;
    std::deque<uint32_t> work;
    auto state_of = [&](const KatExpr& x) {
        auto it = index.find(x);
        if (it != index.end()) return it->second;
        uint32_t id = static_cast<uint32_t>(order.size());
        index.emplace(x, id);
        order.push_back(x);
        ga.accept.push_back(detail::obs(x));
        ga.transitions.emplace_back();
        work.push_back(id);
        return id;
    };
    ga.initial = state_of(e);
    while (!work.empty()) {
        uint32_t s = work.front();
        work.pop_front();
        std::vector<detail::LinTerm> terms;
        detail::lin(order[s], bool_one(), terms);
        for (auto& t : terms) {
            if (is_zero(t.guard) || kat_is_zero(t.rest)) continue;
            if (!guard_satisfiable(t.guard)) continue;
            uint32_t dst = state_of(t.rest);
            ga.transitions[s].push_back({t.guard, t.action, dst});
        }
    }
    return ga;
}

inline GuardedAutomaton compile(const KatExpr& e, SymbolTablePtr table) {
    return compile(e, table, alphabet_of({e}));
}

// --- guarded words and bounded languages ---

struct GuardedWord {
    std::vector<Atom> atoms;       // atoms.size() == actions.size() + 1
    std::vector<SymbolRef> actions;

    friend bool operator<(const GuardedWord& a, const GuardedWord& b) {
        if (a.actions.size() != b.actions.size())
            return a.actions.size() < b.actions.size();
        for (size_t i = 0; i < a.actions.size(); ++i)
            if (a.actions[i] != b.actions[i]) return a.actions[i] < b.actions[i];
        return a.atoms < b.atoms;
    }
    friend bool operator==(const GuardedWord& a, const GuardedWord& b) {
        return a.atoms == b.atoms && a.actions == b.actions;
    }
};

// Fuse uv where the last atom of u equals the first atom of v.
inline std::optional<GuardedWord> fuse(const GuardedWord& u,
                                       const GuardedWord& v) {
    if (u.atoms.back() != v.atoms.front()) return std::nullopt;
    GuardedWord w = u;
    w.atoms.insert(w.atoms.end(), v.atoms.begin() + 1, v.atoms.end());
    w.actions.insert(w.actions.end(), v.actions.begin(), v.actions.end());
    return w;
}

// Bounded language by direct recursive expansion of the expression; the
// independent oracle the automaton construction is tested against.
inline std::set<GuardedWord> enumerate_language(const KatExpr& e,
                                                size_t max_actions,
                                                const Alphabet& al) {
    if (al.tests.size() > 6)
        throw AlphabetTooLarge("enumeration oracle limited to 6 tests");
    size_t atom_count = al.atom_count();
    std::set<GuardedWord> out;
    switch (e->op) {
    case KatOp::Test:
        for (Atom a = 0; a < atom_count; ++a)
            if (eval_atom(e->test, al, a)) out.insert(GuardedWord{{a}, {}});
        return out;
    case KatOp::Action:
        if (max_actions >= 1)
            for (Atom a = 0; a < atom_count; ++a)
                for (Atom b = 0; b < atom_count; ++b)
                    out.insert(GuardedWord{{a, b}, {e->action}});
        return out;
    case KatOp::Sum:
        for (const auto& c : e->children) {
            auto sub = enumerate_language(c, max_actions, al);
            out.insert(sub.begin(), sub.end());
        }
        return out;
    case KatOp::Seq: {
        auto l = enumerate_language(e->lhs, max_actions, al);
        auto r = enumerate_language(e->rhs, max_actions, al);
        for (const auto& u : l)
            for (const auto& v : r) {
                if (u.actions.size() + v.actions.size() > max_actions) continue;
                if (auto w = fuse(u, v)) out.insert(*w);
            }
        return out;
    }
    case KatOp::Star: {
        for (Atom a = 0; a < atom_count; ++a) out.insert(GuardedWord{{a}, {}});
        auto body = enumerate_language(e->lhs, max_actions, al);
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<GuardedWord> add;
            for (const auto& u : out)
                for (const auto& v : body) {
                    if (u.actions.size() + v.actions.size() > max_actions)
                        continue;
                    if (auto w = fuse(u, v))
                        if (!out.count(*w)) add.push_back(*w);
                }
            for (auto& w : add) {
                out.insert(w);
                changed = true;
            }
        }
        return out;
    }
    }
    return out;
}

inline std::set<GuardedWord> enumerate_language(const KatExpr& e,
                                                size_t max_actions) {
    return enumerate_language(e, max_actions, alphabet_of({e}));
}

namespace detail {

using StateSet = std::vector<uint32_t>;

inline StateSet step(const GuardedAutomaton& ga, const StateSet& ss, Atom a,
                     SymbolRef action) {
    StateSet next;
    for (uint32_t s : ss)
        for (const auto& t : ga.transitions[s])
            if (t.action == action && eval_atom(t.guard, ga.alphabet, a))
                next.push_back(t.target);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return next;
}

inline bool accepts(const GuardedAutomaton& ga, const StateSet& ss, Atom a) {
    for (uint32_t s : ss)
        if (eval_atom(ga.accept[s], ga.alphabet, a)) return true;
    return false;
}

}  // namespace detail

// Membership of a full guarded word.
inline bool word_in(const GuardedAutomaton& ga, const GuardedWord& w) {
    detail::StateSet ss{ga.initial};
    for (size_t i = 0; i < w.actions.size(); ++i) {
        ss = detail::step(ga, ss, w.atoms[i], w.actions[i]);
        if (ss.empty()) return false;
    }
    return detail::accepts(ga, ss, w.atoms.back());
}

// All accepted words with at most max_actions actions (test helper; the
// second route of the two-way bounded-language comparison).
inline std::set<GuardedWord> automaton_language(const GuardedAutomaton& ga,
                                                size_t max_actions) {
    if (ga.alphabet.tests.size() > 6)
        throw AlphabetTooLarge("bounded automaton language limited to 6 tests");
    size_t atom_count = ga.alphabet.atom_count();
    std::set<GuardedWord> out;
    struct Item {
        detail::StateSet ss;
        GuardedWord prefix;  // atoms.size() == actions.size()
    };
    std::deque<Item> work;
    work.push_back({{ga.initial}, {}});
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        for (Atom a = 0; a < atom_count; ++a) {
            if (detail::accepts(ga, it.ss, a)) {
                GuardedWord w = it.prefix;
                w.atoms.push_back(a);
                out.insert(std::move(w));
            }
            if (it.prefix.actions.size() == max_actions) continue;
            for (SymbolRef p : ga.alphabet.actions) {
                auto next = detail::step(ga, it.ss, a, p);
                if (next.empty()) continue;
                Item ni;
                ni.ss = std::move(next);
                ni.prefix = it.prefix;
                ni.prefix.atoms.push_back(a);
                ni.prefix.actions.push_back(p);
                work.push_back(std::move(ni));
            }
        }
    }
    return out;
}

struct CheckLimits {
    size_t max_pairs = 500000;
};

// Shortest witness in L(ga1) \ L(ga2), by action count; ties resolved by
// the deterministic exploration order (atoms ascending, then actions
// ascending by symbol id).
inline std::optional<GuardedWord> find_witness(const GuardedAutomaton& ga1,
                                               const GuardedAutomaton& ga2,
                                               const CheckLimits& limits = {}) {
    if (!(ga1.alphabet == ga2.alphabet))
        throw std::logic_error("find_witness: alphabets differ");
    const Alphabet& al = ga1.alphabet;
    size_t atom_count = al.atom_count();

    struct Node {
        detail::StateSet left, right;
        int parent = -1;
        Atom atom = 0;
        SymbolRef action;
    };
    std::vector<Node> nodes;
    std::map<std::pair<detail::StateSet, detail::StateSet>, bool> visited;
    std::deque<int> queue;

    auto push = [&](detail::StateSet l, detail::StateSet r, int parent, Atom a,
                    SymbolRef act) {
        auto key = std::make_pair(l, r);
        if (visited.count(key)) return;
        visited[key] = true;
        if (visited.size() > limits.max_pairs)
            throw CheckBudgetExceeded("state-pair budget exceeded");
        nodes.push_back(Node{std::move(l), std::move(r), parent, a, act});
        queue.push_back(static_cast<int>(nodes.size()) - 1);
    };

    push({ga1.initial}, {ga2.initial}, -1, 0, SymbolRef{});

    while (!queue.empty()) {
        int idx = queue.front();
        queue.pop_front();
        // Acceptance discrepancy at this pair?
        for (Atom a = 0; a < atom_count; ++a) {
            if (detail::accepts(ga1, nodes[idx].left, a) &&
                !detail::accepts(ga2, nodes[idx].right, a)) {
                GuardedWord w;
                w.atoms.push_back(a);
                for (int i = idx; nodes[i].parent >= 0; i = nodes[i].parent) {
                    w.atoms.push_back(nodes[i].atom);
                    w.actions.push_back(nodes[i].action);
                }
                std::reverse(w.atoms.begin(), w.atoms.end());
                std::reverse(w.actions.begin(), w.actions.end());
                return w;
            }
        }
        for (Atom a = 0; a < atom_count; ++a) {
            for (SymbolRef p : al.actions) {
                auto l = detail::step(ga1, nodes[idx].left, a, p);
                if (l.empty()) continue;  // nothing on the left to chase
                auto r = detail::step(ga2, nodes[idx].right, a, p);
                push(std::move(l), std::move(r), idx, a, p);
            }
        }
    }
    return std::nullopt;
}

inline bool language_le(const GuardedAutomaton& ga1,
                        const GuardedAutomaton& ga2,
                        const CheckLimits& limits = {}) {
    return !find_witness(ga1, ga2, limits).has_value();
}

// Is L(ga1) ∩ L(ga2) empty?
inline bool languages_disjoint(const GuardedAutomaton& ga1,
                               const GuardedAutomaton& ga2,
                               const CheckLimits& limits = {}) {
    if (!(ga1.alphabet == ga2.alphabet))
        throw std::logic_error("languages_disjoint: alphabets differ");
    const Alphabet& al = ga1.alphabet;
    size_t atom_count = al.atom_count();
    std::set<std::pair<detail::StateSet, detail::StateSet>> visited;
    std::deque<std::pair<detail::StateSet, detail::StateSet>> queue;
    queue.push_back({{ga1.initial}, {ga2.initial}});
    visited.insert(queue.back());
    while (!queue.empty()) {
        auto [l, r] = queue.front();
        queue.pop_front();
        for (Atom a = 0; a < atom_count; ++a)
            if (detail::accepts(ga1, l, a) && detail::accepts(ga2, r, a))
                return false;
        for (Atom a = 0; a < atom_count; ++a)
            for (SymbolRef p : al.actions) {
                auto nl = detail::step(ga1, l, a, p);
                if (nl.empty()) continue;
                auto nr = detail::step(ga2, r, a, p);
                if (nr.empty()) continue;
                auto key = std::make_pair(nl, nr);
                if (visited.insert(key).second) {
                    if (visited.size() > limits.max_pairs)
                        throw CheckBudgetExceeded("state-pair budget exceeded");
                    queue.push_back(std::move(key));
                }
            }
    }
    return true;
}

// --- product and expression reconstruction ---

inline GuardedAutomaton product(const GuardedAutomaton& a,
                                const GuardedAutomaton& b) {
    if (!(a.alphabet == b.alphabet))
        throw std::logic_error("product: alphabets differ");
    GuardedAutomaton p;
    p.table = a.table;
    p.alphabet = a.alphabet;
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> index;
    std::deque<std::pair<uint32_t, uint32_t>> work;
    auto state_of = [&](uint32_t x, uint32_t y) {
        auto key = std::make_pair(x, y);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        uint32_t id = static_cast<uint32_t>(p.accept.size());
        index.emplace(key, id);
        p.accept.push_back(bool_and(a.accept[x], b.accept[y]));
        p.transitions.emplace_back();
        work.push_back(key);
        return id;
    };
    p.initial = state_of(a.initial, b.initial);
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        uint32_t src = index[{x, y}];
        for (const auto& ta : a.transitions[x])
            for (const auto& tb : b.transitions[y]) {
                if (ta.action != tb.action) continue;
                BoolExpr g = bool_and(ta.guard, tb.guard);
                if (is_zero(g) || !guard_satisfiable(g)) continue;
                uint32_t dst = state_of(ta.target, tb.target);
                p.transitions[src].push_back({g, ta.action, dst});
            }
    }
    return p;
}

// State elimination: turn an automaton back into an expression with the
// same guarded-string language. Output size is best effort.
inline KatExpr to_expression(const GuardedAutomaton& ga) {
    size_t n = ga.size();
    // Keep only states on a path from the initial state to an accepting one.
    std::vector<bool> reach_fwd(n, false), reach_bwd(n, false);
    {
        std::deque<uint32_t> q{ga.initial};
        reach_fwd[ga.initial] = true;
        while (!q.empty()) {
            uint32_t s = q.front();
            q.pop_front();
            for (const auto& t : ga.transitions[s])
                if (!reach_fwd[t.target]) {
                    reach_fwd[t.target] = true;
                    q.push_back(t.target);
                }
        }
        std::vector<std::vector<uint32_t>> preds(n);
        for (uint32_t s = 0; s < n; ++s)
            for (const auto& t : ga.transitions[s]) preds[t.target].push_back(s);
        std::deque<uint32_t> qb;
        for (uint32_t s = 0; s < n; ++s)
            if (!is_zero(ga.accept[s]) && guard_satisfiable(ga.accept[s])) {
                reach_bwd[s] = true;
                qb.push_back(s);
            }
        while (!qb.empty()) {
            uint32_t s = qb.front();
            qb.pop_front();
            for (uint32_t pr : preds[s])
                if (!reach_bwd[pr]) {
                    reach_bwd[pr] = true;
                    qb.push_back(pr);
                }
        }
    }
    if (!reach_bwd[ga.initial]) return kat_zero();

    // GNFA over node ids; n is the virtual start, n+1 the virtual end.
    const uint32_t START = static_cast<uint32_t>(n);
    const uint32_t END = START + 1;
    std::map<std::pair<uint32_t, uint32_t>, KatExpr> label;
    auto add = [&](uint32_t s, uint32_t t, const KatExpr& e) {
        if (kat_is_zero(e)) return;
        auto it = label.find({s, t});
        if (it == label.end())
            label[{s, t}] = e;
        else
            it->second = kat_sum(it->second, e);
    };
    std::set<uint32_t> alive;
    for (uint32_t s = 0; s < n; ++s) {
        if (!reach_fwd[s] || !reach_bwd[s]) continue;
        alive.insert(s);
        if (!is_zero(ga.accept[s])) add(s, END, kat_test(ga.accept[s]));
        for (const auto& t : ga.transitions[s]) {
            if (!reach_fwd[t.target] || !reach_bwd[t.target]) continue;
            add(s, t.target,
                kat_seq(kat_test(t.guard), kat_action(t.action)));
        }
    }
    add(START, ga.initial, kat_one());

    while (!alive.empty()) {
        // Cheapest state first: fewest in-degree * out-degree.
        uint32_t best = *alive.begin();
        size_t best_cost = SIZE_MAX;
        for (uint32_t q : alive) {
            size_t in = 0, out = 0;
            for (const auto& [k, v] : label) {
                if (k.second == q && k.first != q) ++in;
                if (k.first == q && k.second != q) ++out;
            }
            size_t cost = in * out;
            if (cost < best_cost) {
                best_cost = cost;
                best = q;
            }
        }
        uint32_t q = best;
        alive.erase(q);
        KatExpr self = kat_zero();
        if (auto it = label.find({q, q}); it != label.end()) {
            self = it->second;
            label.erase(it);
        }
        KatExpr closure = kat_is_zero(self) ? kat_one() : kat_star(self);
        std::vector<std::pair<uint32_t, KatExpr>> ins, outs;
        for (auto it = label.begin(); it != label.end();) {
            if (it->first.second == q) {
                ins.emplace_back(it->first.first, it->second);
                it = label.erase(it);
            } else if (it->first.first == q) {
                outs.emplace_back(it->first.second, it->second);
                it = label.erase(it);
            } else {
                ++it;
            }
        }
        for (const auto& [s, le] : ins)
            for (const auto& [t, re] : outs)
                add(s, t, kat_seq(le, kat_seq(closure, re)));
    }
    auto it = label.find({START, END});
    return it == label.end() ? kat_zero() : it->second;
}

// L(e1) ∩ L(e2) as an expression, via the product automaton.
inline KatExpr kat_intersect(const KatExpr& e1, const KatExpr& e2,
                             SymbolTablePtr table) {
    Alphabet al = alphabet_of({e1, e2});
    auto a = compile(e1, table, al);
    auto b = compile(e2, table, al);
    return to_expression(product(a, b));
}

// --- counterexample rendering ---

// Turn a full witness word into a counterexample string keeping only the
// literals that matter: a literal is dropped when the string, with that
// test left unconstrained at that position, is still entirely inside
// L(keep) and disjoint from L(avoid).
inline CexString minimize_witness(const GuardedWord& w,
                                  const GuardedAutomaton& keep,
                                  const GuardedAutomaton& avoid,
                                  const CheckLimits& limits = {}) {
    const Alphabet& al = keep.alphabet;
    size_t positions = w.atoms.size();
    // kept[i] = set of test indices still recorded at atom i
    std::vector<std::vector<unsigned>> kept(positions);
    for (size_t i = 0; i < positions; ++i)
        for (unsigned t = 0; t < al.tests.size(); ++t) kept[i].push_back(t);

    auto build = [&](void) -> KatExpr {
        KatExpr acc = kat_one();
        for (size_t i = positions; i-- > 0;) {
            if (i < w.actions.size())
                acc = kat_seq(kat_action(w.actions[i]), acc);
            // note: building right-to-left, so action i sits after atom i
            BoolExpr g = bool_one();
            for (unsigned t : kept[i]) {
                BoolExpr v = bool_var(al.tests[t]);
                g = bool_and(g, (w.atoms[i] >> t) & 1u ? v : bool_not(v));
            }
            acc = kat_seq(kat_test(g), acc);
        }
        return acc;
    };

    auto still_witness = [&](void) {
        KatExpr cand = build();
        auto ga = compile(cand, keep.table, al);
        return language_le(ga, keep, limits) &&
               languages_disjoint(ga, avoid, limits);
    };

    size_t total_elems = w.actions.size();
    for (auto& k : kept) total_elems += k.size();
    for (size_t i = 0; i < positions; ++i) {
        for (size_t ti = 0; ti < kept[i].size();) {
            if (total_elems <= 1) break;  // keep the string nonempty
            auto saved = kept[i];
            kept[i].erase(kept[i].begin() + ti);
            if (still_witness()) {
                --total_elems;
            } else {
                kept[i] = saved;
                ++ti;
            }
        }
    }

    CexString cex;
    for (size_t i = 0; i < positions; ++i) {
        for (unsigned t : kept[i])
            cex.elems.push_back(CexElem::make_literal(
                TestLiteral{al.tests[t], ((w.atoms[i] >> t) & 1u) != 0}));
        if (i < w.actions.size())
            cex.elems.push_back(CexElem::make_action(w.actions[i]));
    }
    return cex;
}

// Minimal witness string in L(ga1) \ L(ga2), or nothing if included.
inline std::optional<CexString> extract_cex(const GuardedAutomaton& ga1,
                                            const GuardedAutomaton& ga2,
                                            const CheckLimits& limits = {}) {
    auto w = find_witness(ga1, ga2, limits);
    if (!w) return std::nullopt;
    return minimize_witness(*w, ga1, ga2, limits);
}

// --- the top-level check ---

enum class Direction : uint8_t { Inclusion, Equivalence };

struct Counterexamples {
    Direction direction = Direction::Inclusion;
    std::optional<CexString> left_not_right;
    std::optional<CexString> right_not_left;
};

struct CheckResult {
    bool ok = false;
    Counterexamples cexs;
};

// Decides e1 <= e2 (or ==) modulo the hypothesis set by rewriting both
// sides and comparing guarded-string languages. In inclusion mode the
// right-not-left string is computed opportunistically when it exists; it
// feeds counterexample alignment but is not a failure by itself.
inline CheckResult check(const KatExpr& e1, const KatExpr& e2,
                         const HypothesisSet& hyps, Direction dir,
                         SymbolTablePtr table, const CheckLimits& limits = {}) {
    KatExpr r1 = rewrite_under_hypotheses(e1, hyps);
    KatExpr r2 = rewrite_under_hypotheses(e2, hyps);
    Alphabet al = alphabet_of({r1, r2});
    auto ga1 = compile(r1, table, al);
    auto ga2 = compile(r2, table, al);
    CheckResult res;
    res.cexs.direction = dir;
    auto w12 = find_witness(ga1, ga2, limits);
    if (w12) res.cexs.left_not_right = minimize_witness(*w12, ga1, ga2, limits);
    if (dir == Direction::Inclusion) {
        res.ok = !w12.has_value();
        if (!res.ok) {
            auto w21 = find_witness(ga2, ga1, limits);
            if (w21)
                res.cexs.right_not_left =
                    minimize_witness(*w21, ga2, ga1, limits);
        }
        return res;
    }
    auto w21 = find_witness(ga2, ga1, limits);
    if (w21) res.cexs.right_not_left = minimize_witness(*w21, ga2, ga1, limits);
    res.ok = !w12 && !w21;
    return res;
}

}  // namespace katrel

#endif
