// Concrete-semantics oracles: a bounded nondeterministic big-step
// interpreter, exhaustive concrete refinement over a finite store space,
// and the atom-level concrete KAT refinement check the two are related
// by on strongly valid translations.

#ifndef KATREL_ORACLE_HPP
#define KATREL_ORACLE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "katrel/automata.hpp"
#include "katrel/lang.hpp"
#include "katrel/translate.hpp"

namespace katrel {

struct DomainTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Store = std::map<std::string, int64_t>;

struct OracleConfig {
    std::vector<int64_t> nondet_values = {-1, 0, 1};
    size_t max_branches = 200000;  // guard against blow-up
};

enum class OutcomeKind : uint8_t { Done, Fault, OutOfFuel };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Done;
    Store store;

    friend bool operator<(const Outcome& a, const Outcome& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.store < b.store;
    }
};

// One executed action (assignment or event call) with the store observed
// just before it; used to map executions through an abstraction.
struct TraceStep {
    const Stmt* stmt;
    Store before;
};

struct Execution {
    std::vector<TraceStep> steps;
    Outcome outcome;
};

namespace detail {

inline int64_t eval_concrete(const IntExpr& e, const Store& s,
                             int64_t nondet) {
    switch (e->op) {
    case IntOp::Const: return e->value;
    case IntOp::Var: {
        auto it = s.find(e->var);
        return it == s.end() ? 0 : it->second;
    }
    case IntOp::Nondet: return nondet;
    case IntOp::Add:
        return eval_concrete(e->lhs, s, nondet) +
               eval_concrete(e->rhs, s, nondet);
    case IntOp::Sub:
        return eval_concrete(e->lhs, s, nondet) -
               eval_concrete(e->rhs, s, nondet);
    case IntOp::Neg: return -eval_concrete(e->lhs, s, nondet);
    }
    return 0;
}

inline bool cond_concrete(const BoolCond& c, const Store& s) {
    switch (c->op) {
    case CondOp::True: return true;
    case CondOp::False: return false;
    case CondOp::Cmp: {
        int64_t l = eval_concrete(c->cl, s, 0);
        int64_t r = eval_concrete(c->cr, s, 0);
        switch (c->rel) {
        case RelOp::Lt: return l < r;
        case RelOp::Le: return l <= r;
        case RelOp::Eq: return l == r;
        case RelOp::Ne: return l != r;
        case RelOp::Ge: return l >= r;
        case RelOp::Gt: return l > r;
        }
        return false;
    }
    case CondOp::And:
        return cond_concrete(c->lhs, s) && cond_concrete(c->rhs, s);
    case CondOp::Or:
        return cond_concrete(c->lhs, s) || cond_concrete(c->rhs, s);
    case CondOp::Not: return !cond_concrete(c->lhs, s);
    }
    return false;
}

inline bool has_nondet(const IntExpr& e) {
    switch (e->op) {
    case IntOp::Nondet: return true;
    case IntOp::Add:
    case IntOp::Sub: return has_nondet(e->lhs) || has_nondet(e->rhs);
    case IntOp::Neg: return has_nondet(e->lhs);
    default: return false;
    }
}

struct Interp {
    const OracleConfig& cfg;
    std::vector<Execution> finished;
    size_t expanded = 0;

    void bump() {
        if (++expanded > cfg.max_branches)
            throw DomainTooLarge("execution tree too large");
    }

    // Continuation-style: run s, then continue with the remaining fuel.
    void run(const StmtPtr& s, Store store, std::vector<TraceStep> trace,
             int fuel,
             const std::function<void(Store, std::vector<TraceStep>, int)>&
                 k) {
        bump();
        if (fuel <= 0) {
            Execution e;
            e.steps = std::move(trace);
            e.outcome.kind = OutcomeKind::OutOfFuel;
            finished.push_back(std::move(e));
            return;
        }
        switch (s->kind) {
        case StmtKind::Skip: k(std::move(store), std::move(trace), fuel - 1); return;
        case StmtKind::Fail: {
            Execution e;
            e.steps = std::move(trace);
            e.outcome.kind = OutcomeKind::Fault;
            e.outcome.store = std::move(store);
            finished.push_back(std::move(e));
            return;
        }
        case StmtKind::Assign: {
            trace.push_back(TraceStep{s.get(), store});
            if (has_nondet(s->rhs)) {
                for (int64_t v : cfg.nondet_values) {
                    Store s2 = store;
                    s2[s->var] = eval_concrete(s->rhs, store, v);
                    k(std::move(s2), trace, fuel - 1);
                }
            } else {
                Store s2 = store;
                s2[s->var] = eval_concrete(s->rhs, store, 0);
                k(std::move(s2), std::move(trace), fuel - 1);
            }
            return;
        }
        case StmtKind::EventCall: {
            trace.push_back(TraceStep{s.get(), store});
            if (s->has_binding) {
                for (int64_t v : cfg.nondet_values) {
                    Store s2 = store;
                    s2[s->var] = v;
                    k(std::move(s2), trace, fuel - 1);
                }
            } else {
                k(std::move(store), std::move(trace), fuel - 1);
            }
            return;
        }
        case StmtKind::Assume:
            if (cond_concrete(s->cond, store))
                k(std::move(store), std::move(trace), fuel - 1);
            return;  // blocked path: no outcome
        case StmtKind::Seq: {
            std::function<void(size_t, Store, std::vector<TraceStep>, int)>
                chain = [&](size_t i, Store st, std::vector<TraceStep> tr,
                            int f) {
                    if (i == s->stmts.size()) {
                        k(std::move(st), std::move(tr), f);
                        return;
                    }
                    run(s->stmts[i], std::move(st), std::move(tr), f,
                        [&, i](Store st2, std::vector<TraceStep> tr2, int f2) {
                            chain(i + 1, std::move(st2), std::move(tr2), f2);
                        });
                };
            chain(0, std::move(store), std::move(trace), fuel);
            return;
        }
        case StmtKind::If: {
            const StmtPtr& branch = cond_concrete(s->cond, store)
                                        ? s->then_branch
                                        : s->else_branch;
            run(branch, std::move(store), std::move(trace), fuel - 1, k);
            return;
        }
        case StmtKind::While: {
            if (!cond_concrete(s->cond, store)) {
                k(std::move(store), std::move(trace), fuel - 1);
                return;
            }
            run(s->body, std::move(store), std::move(trace), fuel - 1,
                [&](Store st2, std::vector<TraceStep> tr2, int f2) {
                    run(s, std::move(st2), std::move(tr2), f2, k);
                });
            return;
        }
        }
    }
};

}  // namespace detail

// All executions of p from sigma under the fuel bound.
inline std::vector<Execution> bigstep_traces(const Program& p,
                                             const Store& sigma, int fuel,
                                             const OracleConfig& cfg = {}) {
    detail::Interp interp{cfg, {}, 0};
    interp.run(p.body, sigma, {}, fuel,
               [&](Store st, std::vector<TraceStep> tr, int) {
                   Execution e;
                   e.steps = std::move(tr);
                   e.outcome.kind = OutcomeKind::Done;
                   e.outcome.store = std::move(st);
                   interp.finished.push_back(std::move(e));
               });
    return std::move(interp.finished);
}

// Outcome set only.
inline std::set<Outcome> bigstep(const Program& p, const Store& sigma,
                                 int fuel, const OracleConfig& cfg = {}) {
    std::set<Outcome> out;
    for (auto& e : bigstep_traces(p, sigma, fuel, cfg)) out.insert(e.outcome);
    return out;
}

// --- concrete refinement (exhaustive over a finite store space) ---

struct StoreSpace {
    std::vector<std::string> vars;
    std::vector<int64_t> values;

    std::vector<Store> all() const {
        size_t count = 1;
        for (size_t i = 0; i < vars.size(); ++i) {
            count *= values.size();
            if (count > 100000) throw DomainTooLarge("store space too large");
        }
        std::vector<Store> out;
        out.reserve(count);
        for (size_t idx = 0; idx < count; ++idx) {
            Store s;
            size_t rest = idx;
            for (const auto& v : vars) {
                s[v] = values[rest % values.size()];
                rest /= values.size();
            }
            out.push_back(std::move(s));
        }
        return out;
    }
};

struct RefinementWitness {
    Store sigma;
    std::optional<Store> rho;
    std::string reason;
};

// Def-style concrete refinement: c1 refines c2 when (1) any state from
// which c1 can fault also lets c2 fault, and (2) every successful
// outcome of c1 is an outcome of c2 unless c2 can fault from that state.
inline std::optional<RefinementWitness> concrete_refines(
    const Program& c1, const Program& c2, const StoreSpace& space, int fuel,
    const OracleConfig& cfg = {}) {
    auto project = [&](const std::set<Outcome>& os) {
        std::set<Outcome> out;
        for (const auto& o : os) {
            if (o.kind == OutcomeKind::OutOfFuel)
                throw DomainTooLarge("program ran out of fuel");
            Outcome p = o;
            if (o.kind == OutcomeKind::Done) {
                p.store.clear();
                for (const auto& v : space.vars) {
                    auto it = o.store.find(v);
                    p.store[v] = it == o.store.end() ? 0 : it->second;
                }
            } else {
                p.store.clear();
            }
            out.insert(std::move(p));
        }
        return out;
    };
    for (const Store& sigma : space.all()) {
        auto o1 = project(bigstep(c1, sigma, fuel, cfg));
        auto o2 = project(bigstep(c2, sigma, fuel, cfg));
        auto faults = [](const std::set<Outcome>& os) {
            for (const auto& o : os)
                if (o.kind == OutcomeKind::Fault) return true;
            return false;
        };
        bool f1 = faults(o1), f2 = faults(o2);
        if (f1 && !f2)
            return RefinementWitness{sigma, std::nullopt,
                                     "left faults, right does not"};
        if (f2) continue;  // right may fault: clause 2 is vacuous
        for (const auto& o : o1) {
            if (o.kind != OutcomeKind::Done) continue;
            if (!o2.count(o))
                return RefinementWitness{sigma, o.store,
                                         "final state unreachable on right"};
        }
    }
    return std::nullopt;
}

// --- concrete KAT refinement (atoms for b and d) ---

inline bool language_empty(const GuardedAutomaton& ga) {
    // reachable accepting state with a satisfiable output test?
    std::set<uint32_t> seen{ga.initial};
    std::vector<uint32_t> work{ga.initial};
    while (!work.empty()) {
        uint32_t s = work.back();
        work.pop_back();
        if (!is_zero(ga.accept[s]) && guard_satisfiable(ga.accept[s]))
            return false;
        for (const auto& t : ga.transitions[s])
            if (seen.insert(t.target).second) work.push_back(t.target);
    }
    return true;
}

struct KatRefinementWitness {
    Atom b = 0;
    std::optional<Atom> d;
    int clause = 1;
};

// Decides the two clauses of concrete KAT refinement with b and d
// ranging over atoms of the shared alphabet.
inline std::optional<KatRefinementWitness> kat_concrete_refines(
    const KatExpr& k1, const KatExpr& k2, SymbolTablePtr table) {
    Alphabet al = alphabet_of({k1, k2});
    if (al.tests.size() > 12) throw AlphabetTooLarge("too many tests");
    size_t atoms = al.atom_count();

    auto atom_expr = [&](Atom a) {
        BoolExpr g = bool_one();
        for (unsigned i = 0; i < al.tests.size(); ++i) {
            BoolExpr v = bool_var(al.tests[i]);
            g = bool_and(g, (a >> i) & 1u ? v : bool_not(v));
        }
        return kat_test(g);
    };

    auto empty = [&](const KatExpr& e) {
        return language_empty(compile(e, table, al));
    };

    for (Atom b = 0; b < atoms; ++b) {
        KatExpr b1 = kat_seq(atom_expr(b), k1);
        KatExpr b2 = kat_seq(atom_expr(b), k2);
        bool e1 = empty(b1);
        bool e2 = empty(b2);
        if (e1) {
            if (!e2) return KatRefinementWitness{b, std::nullopt, 1};
            continue;
        }
        if (e2) continue;  // clause 2 vacuous when b.k2 == 0
        for (Atom d = 0; d < atoms; ++d) {
            KatExpr bd1 = kat_seq(b1, atom_expr(d));
            if (empty(bd1)) continue;
            KatExpr bd2 = kat_seq(b2, atom_expr(d));
            if (empty(bd2)) return KatRefinementWitness{b, d, 2};
        }
    }
    return std::nullopt;
}

// --- strongly valid translation for finite-state programs ---

// Brute-force semantic translation: one test symbol per variable/value
// cut, expressions sum the observed transitions atom-by-atom. Strong
// validity holds by construction; states from which the program can
// fault contribute nothing.
struct StrongTranslation {
    KatExpr expr;
    std::vector<SymbolRef> var_tests;  // test i: vars[i] == 1
};

inline StrongTranslation translate_strong_boolean(
    const Program& p, const std::vector<std::string>& vars,
    SymbolTablePtr table, int fuel, const OracleConfig& cfg) {
    StrongTranslation out;
    for (const auto& v : vars)
        out.var_tests.push_back(table->intern(
            SymbolKind::Test, "is1_" + v, SymbolOrigin{p.side, v + " == 1"}));
    SymbolRef step = table->action("Step");

    StoreSpace space;
    space.vars = vars;
    space.values = {0, 1};
    auto atom_expr = [&](const Store& s) {
        BoolExpr g = bool_one();
        for (size_t i = 0; i < vars.size(); ++i) {
            BoolExpr v = bool_var(out.var_tests[i]);
            g = bool_and(g, s.at(vars[i]) == 1 ? v : bool_not(v));
        }
        return kat_test(g);
    };

    std::vector<KatExpr> terms;
    for (const Store& sigma : space.all()) {
        auto outcomes = bigstep(p, sigma, fuel, cfg);
        bool faulty = false;
        for (const auto& o : outcomes) {
            if (o.kind == OutcomeKind::Fault) faulty = true;
            if (o.kind == OutcomeKind::OutOfFuel)
                throw DomainTooLarge("out of fuel in strong translation");
        }
        if (faulty) continue;  // wrong states contribute nothing
        for (const auto& o : outcomes) {
            Store rho = o.store;
            // keep only the tracked variables
            Store clipped;
            for (const auto& v : vars)
                clipped[v] = rho.count(v) ? (rho[v] != 0 ? 1 : 0) : 0;
            terms.push_back(kat_seq(atom_expr(sigma),
                                    kat_seq(kat_action(step),
                                            atom_expr(clipped))));
        }
    }
    out.expr = kat_sum(std::move(terms));
    return out;
}

}  // namespace katrel

#endif
