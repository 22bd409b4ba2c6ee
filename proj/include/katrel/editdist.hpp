// Scored edit distance on two counterexample strings. The recursion
// walks both strings one element at a time, choosing between removing a
// head or aligning the two heads; aligned identical elements score
// match_scr, same-kind differing elements replace_scr, cross-kind
// alignment penalty_scr. Elements are addressed by their position in the
// original strings, so the application order of the returned
// transformations is irrelevant.

#ifndef KATREL_EDITDIST_HPP
#define KATREL_EDITDIST_HPP

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "katrel/hypotheses.hpp"
#include "katrel/kat_expr.hpp"

namespace katrel {

// Exact rational scores (the default match score is -1/4).
struct Rat {
    long long num = 0;
    long long den = 1;

    Rat() = default;
    Rat(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return Rat(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rat operator*(long long k, const Rat& a) {
        return Rat(k * a.num, a.den);
    }
    friend bool operator<(const Rat& a, const Rat& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<=(const Rat& a, const Rat& b) {
        return a < b || a == b;
    }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

struct ScoreConfig {
    Rat remove_scr{1};
    Rat replace_scr{1};
    Rat match_scr{-1, 4};
    // unset: length of both inputs combined, per call
    std::optional<Rat> penalty_scr;

    Rat penalty_for(size_t len1, size_t len2) const {
        if (penalty_scr) return *penalty_scr;
        return Rat(static_cast<long long>(len1 + len2));
    }
};

enum class TransformKind : uint8_t { Remove, Replace, Match };

// side 0 = first string, 1 = second; positions index the original
// uniquely-labeled strings.
struct Transformation {
    TransformKind kind;
    int side = 0;
    size_t pos = 0;
    size_t pos2 = 0;             // Match: position in the other string
    CexElem replacement;         // Replace: the element written in

    std::string str(const SymbolTable& tab, const CexString& s1,
                    const CexString& s2) const {
        auto elem = [&](int side_, size_t p) {
            const CexString& s = side_ == 0 ? s1 : s2;
            const CexElem& e = s.elems[p];
            if (e.is_action) return tab.name(e.action);
            return (e.lit.positive ? "" : "!") + tab.name(e.lit.test);
        };
        switch (kind) {
        case TransformKind::Remove:
            return "Remove(" + elem(side, pos) + ", s" +
                   std::to_string(side + 1) + ")";
        case TransformKind::Replace: {
            std::string r = replacement.is_action
                                ? tab.name(replacement.action)
                                : (replacement.lit.positive ? "" : "!") +
                                      tab.name(replacement.lit.test);
            return "Replace(" + elem(side, pos) + ", " + r + ", s" +
                   std::to_string(side + 1) + ")";
        }
        case TransformKind::Match:
            return "Match(" + elem(0, pos) + ", " + elem(1, pos2) + ")";
        }
        return "?";
    }
};

struct DistanceResult {
    std::vector<Transformation> transforms;
    Rat score;
};

namespace detail {

inline bool same_symbol(const CexElem& a, const CexElem& b) { return a == b; }
inline bool same_type(const CexElem& a, const CexElem& b) {
    return a.is_action == b.is_action;
}

struct DistState {
    const CexString& s1;
    const CexString& s2;
    Rat remove, replace, match, penalty;
    // memo over suffix pair (i, j)
    std::map<std::pair<size_t, size_t>, DistanceResult> memo;

    const DistanceResult& solve(size_t i, size_t j) {
        auto key = std::make_pair(i, j);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        DistanceResult res;
        size_t n1 = s1.size(), n2 = s2.size();
        if (i == n1 && j == n2) {
            res.score = match;
        } else if (i == n1) {
            for (size_t k = j; k < n2; ++k)
                res.transforms.push_back(
                    Transformation{TransformKind::Remove, 1, k, 0, {}});
            res.score = static_cast<long long>(n2 - j) * remove;
        } else if (j == n2) {
            for (size_t k = i; k < n1; ++k)
                res.transforms.push_back(
                    Transformation{TransformKind::Remove, 0, k, 0, {}});
            res.score = static_cast<long long>(n1 - i) * remove;
        } else {
            // option scores; ties prefer align, then remove-left
            const DistanceResult& d1 = solve(i + 1, j);
            const DistanceResult& d2 = solve(i, j + 1);
            const DistanceResult& d3 = solve(i + 1, j + 1);
            Transformation g1{TransformKind::Remove, 0, i, 0, {}};
            Transformation g2{TransformKind::Remove, 1, j, 0, {}};
            Transformation g3;
            Rat o3;
            if (same_symbol(s1.elems[i], s2.elems[j])) {
                g3 = Transformation{TransformKind::Match, 0, i, j, {}};
                o3 = match;
            } else {
                g3 = Transformation{TransformKind::Replace, 0, i, 0,
                                    s2.elems[j]};
                o3 = same_type(s1.elems[i], s2.elems[j]) ? replace : penalty;
            }
            Rat c1 = d1.score + remove;
            Rat c2 = d2.score + remove;
            Rat c3 = d3.score + o3;
            if (c3 <= c1 && c3 <= c2) {
                res.transforms.push_back(g3);
                res.transforms.insert(res.transforms.end(),
                                      d3.transforms.begin(),
                                      d3.transforms.end());
                res.score = c3;
            } else if (c1 <= c2) {
                res.transforms.push_back(g1);
                res.transforms.insert(res.transforms.end(),
                                      d1.transforms.begin(),
                                      d1.transforms.end());
                res.score = c1;
            } else {
                res.transforms.push_back(g2);
                res.transforms.insert(res.transforms.end(),
                                      d2.transforms.begin(),
                                      d2.transforms.end());
                res.score = c2;
            }
        }
        return memo.emplace(key, std::move(res)).first->second;
    }
};

}  // namespace detail

inline DistanceResult distance(const CexString& s1, const CexString& s2,
                               const ScoreConfig& cfg = {}) {
    detail::DistState st{s1,
                         s2,
                         cfg.remove_scr,
                         cfg.replace_scr,
                         cfg.match_scr,
                         cfg.penalty_for(s1.size(), s2.size()),
                         {}};
    return st.solve(0, 0);
}

// --- mapping transformations to repairs ---

// A repair is either a new hypothesis or a boolean case split on a test
// literal occurring in one of the strings.
struct RepairAction {
    enum Kind : uint8_t { AddHypothesis, CaseSplit } kind;
    Hypothesis hyp{};          // AddHypothesis
    TestLiteral lit{};         // CaseSplit: the literal as it occurred
    int side = 0;              // CaseSplit: which string it came from
    size_t pos = 0;            // CaseSplit: occurrence position
};

// Maps transformations to repairs: removing an action hypothesizes it to
// skip; removing a test literal asks for a case split on its valuation
// (both polarities, handled by the caller); replacements equate the two
// symbols. Transformations touching protected actions are skipped.
inline std::vector<RepairAction> to_repairs(
    const std::vector<Transformation>& ts, const CexString& s1,
    const CexString& s2, const std::set<SymbolRef>& protected_events = {}) {
    std::vector<RepairAction> out;
    auto elem_at = [&](int side, size_t pos) -> const CexElem& {
        return (side == 0 ? s1 : s2).elems[pos];
    };
    for (const auto& t : ts) {
        switch (t.kind) {
        case TransformKind::Match: break;
        case TransformKind::Remove: {
            const CexElem& e = elem_at(t.side, t.pos);
            if (e.is_action) {
                if (protected_events.count(e.action)) break;
                RepairAction r;
                r.kind = RepairAction::AddHypothesis;
                r.hyp = Hypothesis::action_is_skip(e.action);
                out.push_back(r);
            } else {
                RepairAction r;
                r.kind = RepairAction::CaseSplit;
                r.lit = e.lit;
                r.side = t.side;
                r.pos = t.pos;
                out.push_back(r);
            }
            break;
        }
        case TransformKind::Replace: {
            const CexElem& from = elem_at(t.side, t.pos);
            const CexElem& to = t.replacement;
            if (from.is_action != to.is_action) break;  // penalty alignment
            if (from.is_action) {
                if (from.action == to.action) break;
                if (protected_events.count(from.action) ||
                    protected_events.count(to.action))
                    break;
                RepairAction r;
                r.kind = RepairAction::AddHypothesis;
                r.hyp = Hypothesis::action_eq(from.action, to.action);
                out.push_back(r);
            } else {
                if (from.lit.test == to.lit.test) break;
                RepairAction r;
                r.kind = RepairAction::AddHypothesis;
                r.hyp = Hypothesis::test_lit_eq(from.lit, to.lit);
                out.push_back(r);
            }
            break;
        }
        }
    }
    return out;
}

}  // namespace katrel

#endif
