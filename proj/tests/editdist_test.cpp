#include <catch2/catch_amalgamated.hpp>

#include "katrel/editdist.hpp"
#include "testutil.hpp"

using namespace katrel;

namespace {

CexString cex_of(const std::string& spec, SymbolTable& tab) {
    // "a A !b" -> literal a, action A, negated literal b
    CexString s;
    std::string tok;
    auto flush = [&]() {
        if (tok.empty()) return;
        bool neg = tok[0] == '!';
        std::string name = neg ? tok.substr(1) : tok;
        if (std::isupper(static_cast<unsigned char>(name[0])))
            s.elems.push_back(CexElem::make_action(tab.action(name)));
        else
            s.elems.push_back(
                CexElem::make_literal(TestLiteral{tab.test(name), !neg}));
        tok.clear();
    };
    for (char c : spec) {
        if (c == ' ') flush();
        else tok += c;
    }
    flush();
    return s;
}

// Exhaustive search over all transformation sequences; the independent
// oracle for the memoized recursion.
Rat brute_score(const CexString& s1, const CexString& s2, size_t i, size_t j,
                const ScoreConfig& cfg, const Rat& penalty) {
    if (i == s1.size() && j == s2.size()) return cfg.match_scr;
    if (i == s1.size())
        return static_cast<long long>(s2.size() - j) * cfg.remove_scr;
    if (j == s2.size())
        return static_cast<long long>(s1.size() - i) * cfg.remove_scr;
    Rat best = brute_score(s1, s2, i + 1, j, cfg, penalty) + cfg.remove_scr;
    Rat r2 = brute_score(s1, s2, i, j + 1, cfg, penalty) + cfg.remove_scr;
    if (r2 < best) best = r2;
    Rat align_cost = s1.elems[i] == s2.elems[j]
                         ? cfg.match_scr
                         : (s1.elems[i].is_action == s2.elems[j].is_action
                                ? cfg.replace_scr
                                : penalty);
    Rat r3 = brute_score(s1, s2, i + 1, j + 1, cfg, penalty) + align_cost;
    if (r3 < best) best = r3;
    return best;
}

// Apply the transformations: both strings must become equal.
std::vector<CexElem> apply_side(const CexString& s, int side,
                                const std::vector<Transformation>& ts) {
    std::vector<std::optional<CexElem>> work;
    for (const auto& e : s.elems) work.push_back(e);
    for (const auto& t : ts) {
        if (t.kind == TransformKind::Remove && t.side == side)
            work[t.pos] = std::nullopt;
        if (t.kind == TransformKind::Replace && t.side == side)
            work[t.pos] = t.replacement;
    }
    std::vector<CexElem> out;
    for (const auto& e : work)
        if (e) out.push_back(*e);
    return out;
}

}  // namespace

TEST_CASE("distance: worked example", "[editdist]") {
    SymbolTable tab;
    CexString s1 = cex_of("a A B", tab);
    CexString s2 = cex_of("d e B", tab);
    ScoreConfig cfg;
    auto res = distance(s1, s2, cfg);

    // transformation set: Replace(a->d), Remove(e), Remove(A), plus the
    // match on B
    int replaces = 0, removes = 0, matches = 0;
    for (const auto& t : res.transforms) {
        switch (t.kind) {
        case TransformKind::Replace: {
            ++replaces;
            REQUIRE(t.side == 0);
            REQUIRE(t.pos == 0);
            REQUIRE_FALSE(t.replacement.is_action);
            REQUIRE(tab.name(t.replacement.lit.test) == "d");
            break;
        }
        case TransformKind::Remove: {
            ++removes;
            bool removed_A = t.side == 0 && t.pos == 1;
            bool removed_e = t.side == 1 && t.pos == 1;
            REQUIRE((removed_A || removed_e));
            break;
        }
        case TransformKind::Match: ++matches; break;
        }
    }
    REQUIRE(replaces == 1);
    REQUIRE(removes == 2);
    REQUIRE(matches == 1);

    // score: replace + 2*remove plus the match contributions (one match
    // and the empty-tail base case)
    Rat expected = cfg.replace_scr + cfg.remove_scr + cfg.remove_scr +
                   cfg.match_scr + cfg.match_scr;
    REQUIRE(res.score == expected);

    // applying the transformations equates the strings
    auto a1 = apply_side(s1, 0, res.transforms);
    auto a2 = apply_side(s2, 1, res.transforms);
    REQUIRE(a1 == a2);
    REQUIRE(a1.size() == 2);  // d . B
}

TEST_CASE("distance: identical singleton strings", "[editdist]") {
    SymbolTable tab;
    CexString s = cex_of("E", tab);
    auto res = distance(s, s);
    REQUIRE(res.transforms.size() == 1);
    REQUIRE(res.transforms[0].kind == TransformKind::Match);
    ScoreConfig cfg;
    REQUIRE(res.score == cfg.match_scr + cfg.match_scr);
}

TEST_CASE("distance: single removal on the longer string", "[editdist]") {
    SymbolTable tab;
    CexString s1 = cex_of("a E !b !c X !a", tab);
    CexString s2 = cex_of("a E !b !c O X !a", tab);
    ScoreConfig cfg;
    auto res = distance(s1, s2, cfg);
    int removes = 0;
    for (const auto& t : res.transforms)
        if (t.kind == TransformKind::Remove) {
            ++removes;
            REQUIRE(t.side == 1);
            REQUIRE(t.pos == 4);  // the O
        }
    REQUIRE(removes == 1);
    // frozen from the exhaustive table: one removal, six matches and the
    // empty-tail base case
    Rat expected = cfg.remove_scr + 7 * cfg.match_scr;
    REQUIRE(res.score == expected);
    REQUIRE(res.score == brute_score(s1, s2, 0, 0, cfg,
                                     cfg.penalty_for(s1.size(), s2.size())));
}

TEST_CASE("distance: self distance is all matches", "[editdist]") {
    SymbolTable tab;
    CexString s = cex_of("a E !b X", tab);
    ScoreConfig cfg;
    auto res = distance(s, s, cfg);
    REQUIRE(res.transforms.size() == s.size());
    for (const auto& t : res.transforms)
        REQUIRE(t.kind == TransformKind::Match);
    REQUIRE(res.score == 4 * cfg.match_scr + cfg.match_scr);
}

TEST_CASE("distance: symmetry of the score", "[editdist]") {
    testutil::ExprGen gen(79, 3, 3);
    SymbolTable& tab = *gen.table;
    auto rand_cex = [&](size_t len) {
        CexString s;
        for (size_t i = 0; i < len; ++i) {
            if (gen.pick(2))
                s.elems.push_back(
                    CexElem::make_action(gen.actions[gen.pick(3)]));
            else
                s.elems.push_back(CexElem::make_literal(
                    TestLiteral{gen.tests[gen.pick(3)], gen.pick(2) == 0}));
        }
        return s;
    };
    (void)tab;
    for (int i = 0; i < 100; ++i) {
        CexString s1 = rand_cex(1 + gen.pick(5));
        CexString s2 = rand_cex(1 + gen.pick(5));
        auto ab = distance(s1, s2);
        auto ba = distance(s2, s1);
        REQUIRE(ab.score == ba.score);
    }
}

TEST_CASE("distance: optimal against exhaustive search", "[editdist]") {
    testutil::ExprGen gen(83, 2, 2);
    auto rand_cex = [&](size_t len) {
        CexString s;
        for (size_t i = 0; i < len; ++i) {
            if (gen.pick(2))
                s.elems.push_back(
                    CexElem::make_action(gen.actions[gen.pick(2)]));
            else
                s.elems.push_back(CexElem::make_literal(
                    TestLiteral{gen.tests[gen.pick(2)], gen.pick(2) == 0}));
        }
        return s;
    };
    ScoreConfig cfg;
    for (int i = 0; i < 200; ++i) {
        CexString s1 = rand_cex(gen.pick(6));
        CexString s2 = rand_cex(gen.pick(6));
        auto res = distance(s1, s2, cfg);
        Rat oracle = brute_score(s1, s2, 0, 0, cfg,
                                 cfg.penalty_for(s1.size(), s2.size()));
        REQUIRE(res.score == oracle);
        // applying the transformations equates the strings
        REQUIRE(apply_side(s1, 0, res.transforms) ==
                apply_side(s2, 1, res.transforms));
    }
}

TEST_CASE("to_repairs maps transformations", "[editdist]") {
    SymbolTable tab;
    SECTION("action removal becomes a skip hypothesis") {
        CexString s1 = cex_of("a E X", tab);
        CexString s2 = cex_of("a E O X", tab);
        auto res = distance(s1, s2);
        auto repairs = to_repairs(res.transforms, s1, s2);
        REQUIRE(repairs.size() == 1);
        REQUIRE(repairs[0].kind == RepairAction::AddHypothesis);
        REQUIRE(repairs[0].hyp.kind == HypKind::ActionIsSkip);
        REQUIRE(tab.name(repairs[0].hyp.a) == "O");
    }
    SECTION("literal removal asks for a case split") {
        CexString s1 = cex_of("b E", tab);
        CexString s2 = cex_of("E", tab);
        auto res = distance(s1, s2);
        auto repairs = to_repairs(res.transforms, s1, s2);
        REQUIRE(repairs.size() == 1);
        REQUIRE(repairs[0].kind == RepairAction::CaseSplit);
        REQUIRE(tab.name(repairs[0].lit.test) == "b");
        REQUIRE(repairs[0].lit.positive);
        REQUIRE(repairs[0].side == 0);
    }
    SECTION("empty transformation list maps to nothing") {
        REQUIRE(to_repairs({}, CexString{}, CexString{}).empty());
    }
    SECTION("protected events are skipped") {
        CexString s1 = cex_of("E X", tab);
        CexString s2 = cex_of("E O X", tab);
        auto res = distance(s1, s2);
        SymbolRef O = tab.action("O");
        auto repairs = to_repairs(res.transforms, s1, s2, {O});
        REQUIRE(repairs.empty());
    }
    SECTION("replacements equate symbols with polarity") {
        CexString s1 = cex_of("!a E", tab);
        CexString s2 = cex_of("b E", tab);
        auto res = distance(s1, s2);
        auto repairs = to_repairs(res.transforms, s1, s2);
        REQUIRE(repairs.size() == 1);
        REQUIRE(repairs[0].hyp.kind == HypKind::TestLitEq);
        REQUIRE(repairs[0].hyp.str(tab) == "!a=b");
    }
}
