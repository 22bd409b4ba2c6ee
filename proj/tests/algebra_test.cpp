#include <catch2/catch_amalgamated.hpp>

#include "katrel/algebra.hpp"
#include "testutil.hpp"

using namespace katrel;

namespace {

// Random valid relation for a generated pair (k1, k2): k2 extends k1 so
// inclusion holds, and the first projections partition k1 syntactically.
struct ValidInstance {
    KatExpr k1, k2;
    TraceRefinementRelation T;
};

ValidInstance gen_valid(testutil::ExprGen& gen, Direction dir) {
    ValidInstance v;
    KatExpr base = gen.gen_kat(3);
    v.k1 = base;
    v.k2 = dir == Direction::Equivalence ? base : kat_sum(base, gen.gen_kat(3));
    v.T.direction = dir;
    // split k1 into tuple slices when it is a sum
    if (base->op == KatOp::Sum && gen.pick(2)) {
        for (const auto& c : base->children)
            v.T.tuples.push_back(RelationTuple{c, v.k2, {}});
    } else {
        v.T.tuples.push_back(RelationTuple{v.k1, v.k2, {}});
    }
    // occasionally weaken with a hypothesis and a bigger left side
    if (gen.pick(3) == 0 && !gen.actions.empty()) {
        HypothesisSet hs;
        hs.insert(Hypothesis::action_is_skip(gen.actions[0]));
        for (auto& t : v.T.tuples) t.hyps = hs;
    }
    return v;
}

}  // namespace

TEST_CASE("compose_seq basics", "[algebra]") {
    testutil::ExprGen gen(89, 2, 3);
    KatExpr k1 = kat_action(gen.actions[0]);
    KatExpr k2 = kat_action(gen.actions[1]);
    TraceRefinementRelation Ta{{RelationTuple{k1, k2, {}}},
                               Direction::Inclusion};
    TraceRefinementRelation Tb{{RelationTuple{k2, k1, {}}},
                               Direction::Inclusion};
    auto T = compose_seq(Ta, Tb);
    REQUIRE(T.tuples.size() == 1);
    REQUIRE(kat_equal(T.tuples[0].l1, kat_seq(k1, k2)));
    REQUIRE(kat_equal(T.tuples[0].l2, kat_seq(k2, k1)));

    // the unit relation preserves every tuple up to language equality
    TraceRefinementRelation unit{{RelationTuple{kat_one(), kat_one(), {}}},
                                 Direction::Inclusion};
    auto U = compose_seq(Ta, unit);
    REQUIRE(check(U.tuples[0].l1, k1, {}, Direction::Equivalence, gen.table)
                .ok);

    TraceRefinementRelation eqrel{{RelationTuple{k1, k2, {}}},
                                  Direction::Equivalence};
    REQUIRE_THROWS_AS(compose_seq(Ta, eqrel), MixedDirection);
}

TEST_CASE("compose_sum absorbs the zero relation", "[algebra]") {
    testutil::ExprGen gen(97, 2, 2);
    KatExpr k = kat_action(gen.actions[0]);
    TraceRefinementRelation Ta{{RelationTuple{k, k, {}}},
                               Direction::Inclusion};
    TraceRefinementRelation zero{{RelationTuple{kat_zero(), kat_zero(), {}}},
                                 Direction::Inclusion};
    auto T = compose_sum(Ta, zero);
    REQUIRE(T.tuples.size() == 1);
    REQUIRE(kat_equal(T.tuples[0].l1, k));  // k + 0 = k
}

TEST_CASE("compose_star unit", "[algebra]") {
    TraceRefinementRelation unit{{RelationTuple{kat_one(), kat_one(), {}}},
                                 Direction::Inclusion};
    auto T = compose_star(unit);
    REQUIRE(T.tuples.size() == 1);
    REQUIRE(kat_is_one(T.tuples[0].l1));
}

TEST_CASE("compose_trans defined and undefined", "[algebra]") {
    testutil::ExprGen gen(101, 2, 2);
    KatExpr x = kat_action(gen.actions[0]);
    KatExpr y = kat_action(gen.actions[1]);
    TraceRefinementRelation Ta{{RelationTuple{x, x, {}}},
                               Direction::Inclusion};
    auto T = compose_trans(Ta, Ta, gen.table);
    REQUIRE(T.has_value());
    REQUIRE(T->tuples.size() == 1);
    REQUIRE(kat_equal(T->tuples[0].l1, x));

    // side condition violated: x's right side has no successor covering it
    TraceRefinementRelation Tb{{RelationTuple{y, y, {}}},
                               Direction::Inclusion};
    TransUndefined why;
    auto U = compose_trans(Ta, Tb, gen.table, &why);
    REQUIRE_FALSE(U.has_value());
    REQUIRE(kat_equal(why.witness.l1, x));
}

TEST_CASE("embed_context identity", "[algebra]") {
    testutil::ExprGen gen(103, 2, 2);
    KatExpr k = kat_action(gen.actions[0]);
    TraceRefinementRelation T{{RelationTuple{k, k, {}}},
                              Direction::Inclusion};
    auto E = embed_context(T, kat_one(), kat_one());
    REQUIRE(kat_equal(E.tuples[0].l1, k));
    auto E2 = embed_context(T, kat_action(gen.actions[1]), kat_one());
    REQUIRE(kat_equal(E2.tuples[0].l1, kat_seq(kat_action(gen.actions[1]), k)));
}

TEST_CASE("composition preserves validity", "[algebra][slow]") {
    // whenever the operand relations verify against their pairs, the
    // composed relation verifies against the composed pair
    testutil::ExprGen gen(107, 2, 3);
    int per_op = 60;
    for (int i = 0; i < per_op; ++i) {
        ValidInstance a = gen_valid(gen, Direction::Inclusion);
        ValidInstance b = gen_valid(gen, Direction::Inclusion);
        REQUIRE_FALSE(verify_solution(a.T, a.k1, a.k2, gen.table).has_value());
        REQUIRE_FALSE(verify_solution(b.T, b.k1, b.k2, gen.table).has_value());

        INFO("k1a=" + to_string(a.k1, *gen.table) +
             " k2a=" + to_string(a.k2, *gen.table) +
             " k1b=" + to_string(b.k1, *gen.table) +
             " k2b=" + to_string(b.k2, *gen.table));

        auto seq = compose_seq(a.T, b.T);
        REQUIRE_FALSE(verify_solution(seq, kat_seq(a.k1, b.k1),
                                      kat_seq(a.k2, b.k2), gen.table)
                          .has_value());

        auto sum = compose_sum(a.T, b.T);
        REQUIRE_FALSE(verify_solution(sum, kat_sum(a.k1, b.k1),
                                      kat_sum(a.k2, b.k2), gen.table)
                          .has_value());

        auto uni = compose_union(a.T, b.T);
        REQUIRE_FALSE(verify_solution(uni, kat_sum(a.k1, b.k1),
                                      kat_sum(a.k2, b.k2), gen.table)
                          .has_value());

        auto star = compose_star(a.T);
        REQUIRE_FALSE(verify_solution(star, kat_star(a.k1), kat_star(a.k2),
                                      gen.table)
                          .has_value());

        KatExpr m = gen.gen_kat(2), l = gen.gen_kat(2);
        auto ctx = embed_context(a.T, m, l);
        REQUIRE_FALSE(verify_solution(ctx, kat_seq(m, kat_seq(a.k1, l)),
                                      kat_seq(m, kat_seq(a.k2, l)), gen.table)
                          .has_value());
    }
}

TEST_CASE("transitive composition preserves validity", "[algebra][slow]") {
    testutil::ExprGen gen(109, 2, 3);
    int done = 0;
    for (int i = 0; i < 200 && done < 40; ++i) {
        // chain k <= l <= m by construction
        KatExpr k = gen.gen_kat(2);
        KatExpr l = kat_sum(k, gen.gen_kat(2));
        KatExpr m = kat_sum(l, gen.gen_kat(2));
        TraceRefinementRelation T1{{RelationTuple{k, l, {}}},
                                   Direction::Inclusion};
        TraceRefinementRelation T2{{RelationTuple{l, m, {}}},
                                   Direction::Inclusion};
        if (verify_solution(T1, k, l, gen.table) ||
            verify_solution(T2, l, m, gen.table))
            continue;
        auto T = compose_trans(T1, T2, gen.table);
        REQUIRE(T.has_value());
        REQUIRE_FALSE(verify_solution(*T, k, m, gen.table).has_value());
        ++done;
    }
    REQUIRE(done == 40);
}

TEST_CASE("inclusion is monotone under seq and sum", "[algebra]") {
    testutil::ExprGen gen(111, 2, 3);
    for (int i = 0; i < 30; ++i) {
        KatExpr k1 = gen.gen_kat(2);
        KatExpr l1 = kat_sum(k1, gen.gen_kat(2));
        KatExpr k2 = gen.gen_kat(2);
        KatExpr l2 = kat_sum(k2, gen.gen_kat(2));
        REQUIRE(check(kat_seq(k1, k2), kat_seq(l1, l2), {},
                      Direction::Inclusion, gen.table)
                    .ok);
        REQUIRE(check(kat_sum(k1, k2), kat_sum(l1, l2), {},
                      Direction::Inclusion, gen.table)
                    .ok);
    }
}

TEST_CASE("hypothesis-set monotonicity", "[algebra]") {
    // k1 <=_A k2 stays true under any superset of A
    testutil::ExprGen gen(113, 2, 3);
    int done = 0;
    for (int i = 0; i < 200 && done < 30; ++i) {
        KatExpr k1 = gen.gen_kat(3);
        KatExpr k2 = kat_sum(k1, gen.gen_kat(2));
        HypothesisSet a;
        a.insert(Hypothesis::action_is_skip(gen.actions[0]));
        if (!check(k1, k2, a, Direction::Inclusion, gen.table).ok) continue;
        HypothesisSet bigger = a;
        bigger.insert(Hypothesis::action_eq(gen.actions[1], gen.actions[0]));
        bigger.insert(Hypothesis::test_const(gen.tests[0], true));
        REQUIRE(check(k1, k2, bigger, Direction::Inclusion, gen.table).ok);
        ++done;
    }
    REQUIRE(done == 30);
}

TEST_CASE("json round trip", "[algebra]") {
    testutil::ExprGen gen(127, 2, 2);
    auto& tab = *gen.table;
    TraceRefinementRelation T;
    T.direction = Direction::Inclusion;
    T.complete = false;
    RelationTuple t;
    t.l1 = parse_kat("(a.A)*.!a", tab);
    t.l2 = parse_kat("a.B+!a.1", tab);
    t.hyps.insert(parse_hypothesis("A=B", tab));
    t.hyps.insert(parse_hypothesis("a=!b", tab));
    T.tuples.push_back(t);

    nlohmann::json j = relation_to_json(T, tab);
    SymbolTable tab2;
    TraceRefinementRelation back = relation_from_json(j, tab2);
    REQUIRE(back.direction == T.direction);
    REQUIRE(back.complete == T.complete);
    REQUIRE(back.tuples.size() == 1);
    REQUIRE(to_string(back.tuples[0].l1, tab2) == to_string(T.tuples[0].l1, tab));
    REQUIRE(back.tuples[0].hyps.size() == 2);
    // serialize again: byte-identical
    REQUIRE(relation_to_json(back, tab2).dump() == j.dump());
}
