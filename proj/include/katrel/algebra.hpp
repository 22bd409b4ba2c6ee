// Trace-refinement relations as first-class values: sets of
// (left expression, right expression, hypothesis set) tuples with a
// direction flag, the composition operators over them, and the
// independent verifier that checks a relation against a pair of
// expressions.

#ifndef KATREL_ALGEBRA_HPP
#define KATREL_ALGEBRA_HPP

#include <optional>
#include <string>
#include <vector>

#include "katrel/automata.hpp"
#include "katrel/kat_parser.hpp"

namespace katrel {

struct RelationTuple {
    KatExpr l1, l2;
    HypothesisSet hyps;
};

struct TraceRefinementRelation {
    std::vector<RelationTuple> tuples;
    Direction direction = Direction::Inclusion;
    bool complete = true;  // whether coverage is claimed
};

struct MixedDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sequential composition: pairwise products l1*m1 / l2*m2 with merged
// hypothesis sets.
inline TraceRefinementRelation compose_seq(const TraceRefinementRelation& a,
                                           const TraceRefinementRelation& b) {
    if (a.direction != b.direction)
        throw MixedDirection("compose_seq over mixed directions");
    TraceRefinementRelation out;
    out.direction = a.direction;
    out.complete = a.complete && b.complete;
    for (const auto& x : a.tuples)
        for (const auto& y : b.tuples)
            out.tuples.push_back(RelationTuple{kat_seq(x.l1, y.l1),
                                               kat_seq(x.l2, y.l2),
                                               x.hyps.merged(y.hyps)});
    return out;
}

// Disjunction: pairwise sums.
inline TraceRefinementRelation compose_sum(const TraceRefinementRelation& a,
                                           const TraceRefinementRelation& b) {
    if (a.direction != b.direction)
        throw MixedDirection("compose_sum over mixed directions");
    TraceRefinementRelation out;
    out.direction = a.direction;
    out.complete = a.complete && b.complete;
    for (const auto& x : a.tuples)
        for (const auto& y : b.tuples)
            out.tuples.push_back(RelationTuple{kat_sum(x.l1, y.l1),
                                               kat_sum(x.l2, y.l2),
                                               x.hyps.merged(y.hyps)});
    return out;
}

// Plain union of the tuple sets (also valid for sums of the pairs).
inline TraceRefinementRelation compose_union(const TraceRefinementRelation& a,
                                             const TraceRefinementRelation& b) {
    if (a.direction != b.direction)
        throw MixedDirection("compose_union over mixed directions");
    TraceRefinementRelation out = a;
    out.complete = a.complete && b.complete;
    for (const auto& y : b.tuples) out.tuples.push_back(y);
    return out;
}

// Star: tuple-wise. Starring keeps every per-tuple obligation but loses
// coverage when the relation has several tuples ((o+p)* strictly exceeds
// o* + p*), so completeness survives only for singletons.
inline TraceRefinementRelation compose_star(const TraceRefinementRelation& a) {
    TraceRefinementRelation out;
    out.direction = a.direction;
    out.complete = a.complete && a.tuples.size() <= 1;
    for (const auto& x : a.tuples)
        out.tuples.push_back(
            RelationTuple{kat_star(x.l1), kat_star(x.l2), x.hyps});
    return out;
}

// Context embedding: wrap every tuple in m . _ . l.
inline TraceRefinementRelation embed_context(const TraceRefinementRelation& a,
                                             const KatExpr& m,
                                             const KatExpr& l) {
    TraceRefinementRelation out;
    out.direction = a.direction;
    out.complete = a.complete;
    for (const auto& x : a.tuples)
        out.tuples.push_back(RelationTuple{kat_seq(m, kat_seq(x.l1, l)),
                                           kat_seq(m, kat_seq(x.l2, l)),
                                           x.hyps});
    return out;
}

struct TransUndefined {
    RelationTuple witness;  // the tuple with no successor
};

// Transitive composition: defined when every tuple of the first relation
// has a successor in the second with p1 <= o2 (decided on languages).
inline std::optional<TraceRefinementRelation> compose_trans(
    const TraceRefinementRelation& a, const TraceRefinementRelation& b,
    SymbolTablePtr table, TransUndefined* why = nullptr,
    const CheckLimits& limits = {}) {
    if (a.direction != b.direction)
        throw MixedDirection("compose_trans over mixed directions");
    TraceRefinementRelation out;
    out.direction = a.direction;
    out.complete = a.complete && b.complete;
    for (const auto& x : a.tuples) {
        bool found = false;
        for (const auto& y : b.tuples) {
            Alphabet al = alphabet_of({x.l2, y.l1});
            auto g1 = compile(x.l2, table, al);
            auto g2 = compile(y.l1, table, al);
            if (language_le(g1, g2, limits)) {
                out.tuples.push_back(RelationTuple{x.l1, y.l2,
                                                   x.hyps.merged(y.hyps)});
                found = true;
            }
        }
        if (!found) {
            if (why) why->witness = x;
            return std::nullopt;
        }
    }
    return out;
}

// --- verification against a pair of expressions ---

struct Violation {
    enum Kind : uint8_t { Inclusion, Coverage } kind = Inclusion;
    size_t tuple_index = 0;
    std::optional<CexString> cex;
    std::string detail;
};

// Checks (a) every tuple obligation intersect(l1,k1) <=_A intersect(l2,k2)
// (== in equivalence mode) and (b) coverage of k1 by the first
// projections (both projections in equivalence mode). Coverage is
// checked only when the relation claims completeness.
inline std::optional<Violation> verify_solution(
    const TraceRefinementRelation& T, const KatExpr& k1, const KatExpr& k2,
    SymbolTablePtr table, const CheckLimits& limits = {}) {
    for (size_t i = 0; i < T.tuples.size(); ++i) {
        const RelationTuple& t = T.tuples[i];
        HypothesisRewriter rw(t.hyps);
        KatExpr rl1 = rw.rewrite(t.l1), rk1 = rw.rewrite(k1);
        KatExpr rl2 = rw.rewrite(t.l2), rk2 = rw.rewrite(k2);
        Alphabet al = alphabet_of({rl1, rk1, rl2, rk2});
        auto left = product(compile(rl1, table, al), compile(rk1, table, al));
        auto right = product(compile(rl2, table, al), compile(rk2, table, al));
        if (auto w = find_witness(left, right, limits)) {
            Violation v;
            v.kind = Violation::Inclusion;
            v.tuple_index = i;
            v.cex = minimize_witness(*w, left, right, limits);
            v.detail = "tuple " + std::to_string(i) +
                       ": left slice not included in right slice";
            return v;
        }
        if (T.direction == Direction::Equivalence) {
            if (auto w = find_witness(right, left, limits)) {
                Violation v;
                v.kind = Violation::Inclusion;
                v.tuple_index = i;
                v.cex = minimize_witness(*w, right, left, limits);
                v.detail = "tuple " + std::to_string(i) +
                           ": right slice not included in left slice";
                return v;
            }
        }
    }
    if (T.complete) {
        auto coverage = [&](const KatExpr& k,
                            bool second) -> std::optional<Violation> {
            std::vector<KatExpr> parts;
            for (const auto& t : T.tuples)
                parts.push_back(second ? t.l2 : t.l1);
            KatExpr u = kat_sum(std::move(parts));
            Alphabet al = alphabet_of({k, u});
            auto gk = compile(k, table, al);
            auto gu = compile(u, table, al);
            if (auto w = find_witness(gk, gu, limits)) {
                Violation v;
                v.kind = Violation::Coverage;
                v.cex = minimize_witness(*w, gk, gu, limits);
                v.detail = second ? "second projections do not cover k2"
                                  : "first projections do not cover k1";
                return v;
            }
            return std::nullopt;
        };
        if (auto v = coverage(k1, false)) return v;
        if (T.direction == Direction::Equivalence)
            if (auto v = coverage(k2, true)) return v;
    }
    return std::nullopt;
}

// --- serialization (version 1) ---
//
// {
//   "version": 1,
//   "direction": "le" | "eq",
//   "complete": bool,
//   "symbols": [ {"name": .., "kind": "action"|"test", "origin": ..}, .. ],
//   "tuples": [ {"l1": .., "l2": .., "hyps": [..]}, .. ]
// }

}  // namespace katrel

#include "json.hpp"

namespace katrel {

inline nlohmann::json relation_to_json(const TraceRefinementRelation& T,
                                       const SymbolTable& tab) {
    nlohmann::json j;
    j["version"] = 1;
    j["direction"] = T.direction == Direction::Inclusion ? "le" : "eq";
    j["complete"] = T.complete;
    nlohmann::json syms = nlohmann::json::array();
    std::set<SymbolRef> used_tests, used_actions;
    for (const auto& t : T.tuples) {
        collect_symbols(t.l1, used_tests, used_actions);
        collect_symbols(t.l2, used_tests, used_actions);
        for (const auto& h : t.hyps.items()) {
            switch (h.kind) {
            case HypKind::ActionIsSkip: used_actions.insert(h.a); break;
            case HypKind::TestConst: used_tests.insert(h.a); break;
            case HypKind::ActionEq:
                used_actions.insert(h.a);
                used_actions.insert(h.b);
                break;
            case HypKind::TestLitEq:
                used_tests.insert(h.l1.test);
                used_tests.insert(h.l2.test);
                break;
            }
        }
    }
    auto add_sym = [&](SymbolRef r) {
        const Symbol& s = tab.at(r);
        nlohmann::json e;
        e["name"] = s.display;
        e["kind"] = s.kind == SymbolKind::Action ? "action" : "test";
        if (s.origin) {
            e["origin"] = s.origin->text;
            e["side"] = side_name(s.origin->side);
        }
        syms.push_back(e);
    };
    for (SymbolRef r : used_tests) add_sym(r);
    for (SymbolRef r : used_actions) add_sym(r);
    j["symbols"] = syms;
    nlohmann::json tuples = nlohmann::json::array();
    for (const auto& t : T.tuples) {
        nlohmann::json e;
        e["l1"] = to_string(t.l1, tab);
        e["l2"] = to_string(t.l2, tab);
        nlohmann::json hs = nlohmann::json::array();
        for (const auto& h : t.hyps.items()) hs.push_back(h.str(tab));
        e["hyps"] = hs;
        tuples.push_back(e);
    }
    j["tuples"] = tuples;
    return j;
}

inline TraceRefinementRelation relation_from_json(const nlohmann::json& j,
                                                  SymbolTable& tab) {
    if (!j.contains("version") || j["version"].get<int>() != 1)
        throw std::runtime_error("unsupported relation format version");
    TraceRefinementRelation T;
    T.direction = j.at("direction").get<std::string>() == "eq"
                      ? Direction::Equivalence
                      : Direction::Inclusion;
    T.complete = j.value("complete", true);
    if (j.contains("symbols"))
        for (const auto& e : j["symbols"]) {
            SymbolKind k = e.at("kind").get<std::string>() == "action"
                               ? SymbolKind::Action
                               : SymbolKind::Test;
            std::optional<SymbolOrigin> origin;
            if (e.contains("origin")) {
                SymbolOrigin o;
                o.text = e["origin"].get<std::string>();
                std::string side = e.value("side", "C1+C2");
                o.side = side == "C1" ? ProgramSide::C1
                         : side == "C2" ? ProgramSide::C2
                                        : ProgramSide::Both;
                origin = o;
            }
            tab.intern(k, e.at("name").get<std::string>(), origin);
        }
    for (const auto& e : j.at("tuples")) {
        RelationTuple t;
        t.l1 = parse_kat(e.at("l1").get<std::string>(), tab);
        t.l2 = parse_kat(e.at("l2").get<std::string>(), tab);
        for (const auto& h : e.at("hyps"))
            t.hyps.insert(parse_hypothesis(h.get<std::string>(), tab));
        T.tuples.push_back(std::move(t));
    }
    return T;
}

}  // namespace katrel

#endif
