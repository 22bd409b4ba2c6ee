// Program-to-KAT translation parameterized by an abstraction: a symbol
// table, bindings from canonical conditions to test symbols and from
// canonical statements to action symbols, and cached interval invariants
// per program. The translation is structural (assignments and calls
// become actions, branches become guarded sums, loops become stars) with
// semantic pruning: branches decided by the invariants lose their guard
// or disappear, unreachable code becomes 0, and a loop that cannot exit
// becomes 0.

#ifndef KATREL_TRANSLATE_HPP
#define KATREL_TRANSLATE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "katrel/absint.hpp"
#include "katrel/kat_expr.hpp"
#include "katrel/lang.hpp"

namespace katrel {

struct IncompatibleAbstractions : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Concrete meaning of a bound test symbol: a linear predicate
// (sum coeffs*vars + k <= 0, or == 0), possibly flipped so that the
// first-seen occurrence reads positively.
struct TestPredicate {
    std::map<std::string, int64_t> coeffs;
    int64_t constant = 0;
    bool is_eq = false;
    bool flip = false;
    BoolCond when_true;  // source condition equivalent to the symbol

    bool eval(const std::map<std::string, int64_t>& store) const {
        int64_t v = constant;
        for (const auto& [var, c] : coeffs) {
            auto it = store.find(var);
            int64_t val = it == store.end() ? 0 : it->second;
            v += c * val;
        }
        bool base = is_eq ? v == 0 : v <= 0;
        return base != flip;
    }
};

struct Abstraction {
    SymbolTablePtr table;
    bool share_symbols = true;

    // canonical condition key (side-prefixed when not shared) -> test
    std::map<std::string, SymbolRef> test_bind;
    // canonical statement key -> action
    std::map<std::string, SymbolRef> action_bind;
    // run-global key -> symbol registry, shared by every abstraction of
    // one analysis so sibling refinements agree on symbols
    std::shared_ptr<std::map<std::string, SymbolRef>> global_syms =
        std::make_shared<std::map<std::string, SymbolRef>>();
    // event groups that the sharing rule merged across the two fragments
    std::set<std::string> shared_events;  // "callee/arity"
    // concrete semantics of each test symbol (symbol-level, shared)
    std::shared_ptr<std::map<uint32_t, TestPredicate>> test_pred =
        std::make_shared<std::map<uint32_t, TestPredicate>>();
    // statement locations where each test symbol guards control flow
    std::shared_ptr<std::map<uint32_t, std::set<Location>>> test_locs =
        std::make_shared<std::map<uint32_t, std::set<Location>>>();
    // cached invariants, keyed by side + program text
    std::shared_ptr<std::map<std::string, InvariantMap>> inv_cache =
        std::make_shared<std::map<std::string, InvariantMap>>();
    std::vector<std::string> provenance;

    bool has_test(const std::string& key) const {
        return test_bind.count(key) > 0;
    }
};

namespace detail {

inline std::string next_test_name(const SymbolTable& tab) {
    for (char c = 'a'; c <= 'z'; ++c) {
        std::string n(1, c);
        if (!tab.find(SymbolKind::Test, n).valid()) return n;
    }
    for (int i = 0;; ++i) {
        std::string n = "t" + std::to_string(i);
        if (!tab.find(SymbolKind::Test, n).valid()) return n;
    }
}

inline std::string action_name_for(const SymbolTable& tab,
                                   const std::string& hint) {
    char first = hint.empty() ? 'A' : hint[0];
    std::string base(1, static_cast<char>(std::toupper(
                            static_cast<unsigned char>(first))));
    if (!tab.find(SymbolKind::Action, base).valid()) return base;
    for (int i = 1;; ++i) {
        std::string n = base + std::to_string(i);
        if (!tab.find(SymbolKind::Action, n).valid()) return n;
    }
}

inline std::string event_group_key(const Stmt& s) {
    return s.callee + "/" + std::to_string(s.args.size());
}

inline void collect_event_texts(
    const StmtPtr& s, std::map<std::string, std::set<std::string>>& groups) {
    switch (s->kind) {
    case StmtKind::EventCall:
        groups[event_group_key(*s)].insert(stmt_text(*s));
        break;
    case StmtKind::Seq:
        for (const auto& c : s->stmts) collect_event_texts(c, groups);
        break;
    case StmtKind::If:
        collect_event_texts(s->then_branch, groups);
        collect_event_texts(s->else_branch, groups);
        break;
    case StmtKind::While: collect_event_texts(s->body, groups); break;
    default: break;
    }
}

}  // namespace detail

// Builds the root abstraction for a program pair. Event symbols are one
// per (callee, arity) within a fragment; two fragments share an event
// symbol only when sharing is on and their statement texts for that
// event coincide exactly. Assignments share on identical statement text.
inline Abstraction make_abstraction(const Program& c1, const Program& c2,
                                    SymbolTablePtr table,
                                    bool share_symbols = true) {
    Abstraction a;
    a.table = std::move(table);
    a.share_symbols = share_symbols;
    if (share_symbols) {
        std::map<std::string, std::set<std::string>> g1, g2;
        detail::collect_event_texts(c1.body, g1);
        detail::collect_event_texts(c2.body, g2);
        for (const auto& [key, texts] : g1) {
            auto it = g2.find(key);
            if (it != g2.end() && it->second == texts)
                a.shared_events.insert(key);
        }
    }
    return a;
}

namespace detail {

inline std::string side_prefix(const Abstraction& a, ProgramSide side) {
    return a.share_symbols ? std::string()
                           : std::string(side_name(side)) + "|";
}

}  // namespace detail

// Test symbol for a canonical comparison; binds a fresh symbol on first
// sight, oriented so this occurrence reads positively.
inline TestLiteral bind_test(Abstraction& a, ProgramSide side, RelOp rel,
                             const IntExpr& l, const IntExpr& r,
                             const std::string& display_text) {
    CanonResult canon = canonical_cmp(rel, l, r);
    if (canon.is_constant)
        throw std::logic_error("constant comparison reached bind_test");
    std::string key = detail::side_prefix(a, side) + canon.test.key;
    auto it = a.test_bind.find(key);
    if (it != a.test_bind.end())
        return TestLiteral{it->second,
                           canon.test.positive !=
                               a.test_pred->at(it->second.id).flip};
    std::string gkey = "t|" + key;
    SymbolRef sym;
    auto git = a.global_syms->find(gkey);
    if (git != a.global_syms->end()) {
        sym = git->second;
        a.test_bind.emplace(key, sym);
        // the predicate was fixed when the symbol was first minted
        return TestLiteral{sym, canon.test.positive !=
                                    a.test_pred->at(sym.id).flip};
    }
    sym = a.table->intern(
        SymbolKind::Test, detail::next_test_name(*a.table),
        SymbolOrigin{a.share_symbols ? ProgramSide::Both : side, display_text});
    a.global_syms->emplace(gkey, sym);
    a.test_bind.emplace(key, sym);
    TestPredicate pred;
    {
        detail::LinForm f = detail::linearize(l);
        f.add(detail::linearize(r), -1);
        // re-normalize exactly like canonical_cmp
        bool positive = true;
        bool is_eq = false;
        switch (rel) {
        case RelOp::Le: break;
        case RelOp::Lt: f.constant += 1; break;
        case RelOp::Gt: positive = false; break;
        case RelOp::Ge: positive = false; f.constant += 1; break;
        case RelOp::Eq: is_eq = true; break;
        case RelOp::Ne: is_eq = true; positive = false; break;
        }
        if (f.coeffs.begin()->second < 0) {
            for (auto& [v, c] : f.coeffs) c = -c;
            f.constant = -f.constant;
            if (!is_eq) {
                f.constant += 1;
                positive = !positive;
            }
        }
        pred.coeffs = f.coeffs;
        pred.constant = f.constant;
        pred.is_eq = is_eq;
        // orient the symbol so this first occurrence is positive
        pred.flip = !positive;
        pred.when_true = cond_cmp(rel, l, r);
    }
    a.test_pred->emplace(sym.id, pred);
    return TestLiteral{sym, true};
}

// Action symbol for a statement (assignment, event call or fail).
inline SymbolRef bind_action(Abstraction& a, ProgramSide side, const Stmt& s) {
    std::string key, hint;
    ProgramSide origin_side = side;
    if (s.kind == StmtKind::EventCall) {
        std::string group = detail::event_group_key(s);
        bool shared = a.shared_events.count(group) > 0;
        key = "ev|" + (shared ? std::string("*") : std::string(side_name(side))) +
              "|" + group;
        hint = s.callee;
        if (shared) origin_side = ProgramSide::Both;
    } else {
        bool shared = a.share_symbols;
        key = "st|" + (shared ? std::string("*") : std::string(side_name(side))) +
              "|" + stmt_text(s);
        hint = s.kind == StmtKind::Assign ? s.var : "F";
        if (shared) origin_side = ProgramSide::Both;
    }
    auto it = a.action_bind.find(key);
    if (it != a.action_bind.end()) return it->second;
    std::string gkey = "a|" + key;
    auto git = a.global_syms->find(gkey);
    if (git != a.global_syms->end()) {
        a.action_bind.emplace(key, git->second);
        return git->second;
    }
    SymbolRef sym = a.table->intern(
        SymbolKind::Action, detail::action_name_for(*a.table, hint),
        SymbolOrigin{origin_side, stmt_text(s)});
    a.global_syms->emplace(gkey, sym);
    a.action_bind.emplace(key, sym);
    return sym;
}

// Condition to boolean expression over test symbols, folding constants.
// When a guarding statement location is supplied, each bound test records
// the occurrence (restrictions instrument assumes there).
inline BoolExpr cond_to_bool(Abstraction& a, ProgramSide side,
                             const BoolCond& c,
                             const Location* at = nullptr) {
    switch (c->op) {
    case CondOp::True: return bool_one();
    case CondOp::False: return bool_zero();
    case CondOp::Cmp: {
        CanonResult canon = canonical_cmp(c->rel, c->cl, c->cr);
        if (canon.is_constant) return bool_const(canon.constant);
        TestLiteral lit = bind_test(a, side, c->rel, c->cl, c->cr,
                                    to_string(c));
        if (at) (*a.test_locs)[lit.test.id].insert(*at);
        return bool_literal(lit);
    }
    case CondOp::Not: return cond_to_bool(a, side, cond_negate(c->lhs), at);
    case CondOp::And:
        return bool_and(cond_to_bool(a, side, c->lhs, at),
                        cond_to_bool(a, side, c->rhs, at));
    case CondOp::Or:
        return bool_or(cond_to_bool(a, side, c->lhs, at),
                       cond_to_bool(a, side, c->rhs, at));
    }
    return bool_zero();
}

struct TranslationResult {
    KatExpr expr;
    Abstraction alpha;
};

namespace detail {

inline const InvariantMap& invariants_for(Abstraction& a, const Program& p) {
    std::string key = std::string(side_name(p.side)) + "\n" + pretty(p);
    auto it = a.inv_cache->find(key);
    if (it != a.inv_cache->end()) return it->second;
    return a.inv_cache->emplace(key, analyze(p)).first->second;
}

inline KatExpr tr_stmt(Abstraction& a, ProgramSide side, const StmtPtr& s,
                       const InvariantMap& inv) {
    const AbstractState& entry = inv.at(s->loc);
    if (entry.is_bottom()) return kat_zero();
    switch (s->kind) {
    case StmtKind::Skip: return kat_one();
    case StmtKind::Fail: return kat_zero();
    case StmtKind::Assign:
    case StmtKind::EventCall: return kat_action(bind_action(a, side, *s));
    case StmtKind::Assume: {
        CondEval ce = eval_cond(entry, s->cond);
        if (ce == CondEval::True) return kat_one();
        if (ce == CondEval::False || ce == CondEval::Unreachable)
            return kat_zero();
        return kat_test(cond_to_bool(a, side, s->cond, &s->loc));
    }
    case StmtKind::Seq: {
        KatExpr e = kat_one();
        for (const auto& c : s->stmts) {
            e = kat_seq(e, tr_stmt(a, side, c, inv));
            if (kat_is_zero(e)) return e;
        }
        return e;
    }
    case StmtKind::If: {
        CondEval ce = eval_cond(entry, s->cond);
        if (ce == CondEval::True) return tr_stmt(a, side, s->then_branch, inv);
        if (ce == CondEval::False) return tr_stmt(a, side, s->else_branch, inv);
        if (ce == CondEval::Unreachable) return kat_zero();
        // bind symbols in source order: guard, then branch, else branch
        BoolExpr b = cond_to_bool(a, side, s->cond, &s->loc);
        KatExpr then_e = tr_stmt(a, side, s->then_branch, inv);
        KatExpr else_e = tr_stmt(a, side, s->else_branch, inv);
        return kat_sum(kat_seq(kat_test(b), then_e),
                       kat_seq(kat_test(bool_not(b)), else_e));
    }
    case StmtKind::While: {
        // entry here is the loop-head fixpoint
        CondEval ce = eval_cond(entry, s->cond);
        if (ce == CondEval::False) return kat_one();
        if (ce == CondEval::Unreachable) return kat_zero();
        BoolExpr b = ce == CondEval::Unknown ? cond_to_bool(a, side, s->cond, &s->loc)
                                             : bool_one();
        KatExpr body = tr_stmt(a, side, s->body, inv);
        if (ce == CondEval::True)  // no exit: nonterminating
            return kat_zero();
        return kat_seq(kat_star(kat_seq(kat_test(b), body)),
                       kat_test(bool_not(b)));
    }
    }
    return kat_zero();
}

}  // namespace detail

// A valid translation: every big-step execution of p is represented in
// the language of the returned expression.
inline TranslationResult translate(const Program& p, Abstraction alpha) {
    const InvariantMap& inv = detail::invariants_for(alpha, p);
    KatExpr e = detail::tr_stmt(alpha, p.side, p.body, inv);
    return TranslationResult{e, std::move(alpha)};
}

// Extends an abstraction with fresh test symbols for unseen conditions.
inline Abstraction refine(Abstraction alpha,
                          const std::vector<std::pair<ProgramSide, BoolCond>>&
                              new_conds) {
    for (const auto& [side, cond] : new_conds) {
        // walk the condition and bind every atomic comparison
        std::function<void(const BoolCond&)> visit = [&](const BoolCond& c) {
            switch (c->op) {
            case CondOp::Cmp: {
                CanonResult canon = canonical_cmp(c->rel, c->cl, c->cr);
                if (!canon.is_constant)
                    bind_test(alpha, side, c->rel, c->cl, c->cr, to_string(c));
                break;
            }
            case CondOp::Not: visit(c->lhs); break;
            case CondOp::And:
            case CondOp::Or:
                visit(c->lhs);
                visit(c->rhs);
                break;
            default: break;
            }
        };
        visit(cond);
        alpha.provenance.push_back("refine " + std::string(side_name(side)) +
                                   " " + to_string(cond));
    }
    return alpha;
}

// Least abstraction refining both arguments: union of bindings, merged
// invariant caches. Conflicting bindings on one canonical key make the
// abstractions incompatible.
inline Abstraction combine(const Abstraction& a1, const Abstraction& a2) {
    if (a1.table != a2.table)
        throw IncompatibleAbstractions("different symbol tables");
    if (a1.share_symbols != a2.share_symbols)
        throw IncompatibleAbstractions("different sharing policies");
    Abstraction out = a1;
    for (const auto& [k, v] : a2.test_bind) {
        auto it = out.test_bind.find(k);
        if (it != out.test_bind.end()) {
            if (it->second != v)
                throw IncompatibleAbstractions("test binding conflict on " + k);
        } else {
            out.test_bind.emplace(k, v);
        }
    }
    for (const auto& [k, v] : a2.action_bind) {
        auto it = out.action_bind.find(k);
        if (it != out.action_bind.end()) {
            if (it->second != v)
                throw IncompatibleAbstractions("action binding conflict on " +
                                               k);
        } else {
            out.action_bind.emplace(k, v);
        }
    }
    if (out.test_pred != a2.test_pred)
        for (const auto& [k, v] : *a2.test_pred) out.test_pred->emplace(k, v);
    if (out.test_locs != a2.test_locs)
        for (const auto& [k, v] : *a2.test_locs)
            (*out.test_locs)[k].insert(v.begin(), v.end());
    for (const auto& e : a2.shared_events) out.shared_events.insert(e);
    if (out.global_syms != a2.global_syms)
        for (const auto& [k, v] : *a2.global_syms)
            out.global_syms->emplace(k, v);
    if (out.inv_cache != a2.inv_cache)
        for (const auto& [k, v] : *a2.inv_cache) out.inv_cache->emplace(k, v);
    for (const auto& pr : a2.provenance) {
        bool seen = false;
        for (const auto& q : out.provenance) seen = seen || q == pr;
        if (!seen) out.provenance.push_back(pr);
    }
    return out;
}

// Symbol table dump: symbol <-> source binding, one line each.
inline std::string dump_symbols(const Abstraction& a) {
    std::string s;
    for (const auto& sym : a.table->all()) {
        s += sym.display;
        s += sym.kind == SymbolKind::Test ? " (test)" : " (action)";
        if (sym.origin)
            s += " := " + sym.origin->text + " @" + side_name(sym.origin->side);
        s += "\n";
    }
    return s;
}

}  // namespace katrel

#endif
