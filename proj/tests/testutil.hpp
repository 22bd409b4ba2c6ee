// Shared helpers for the test suites: deterministic random expression and
// program generators.

#ifndef KATREL_TESTUTIL_HPP
#define KATREL_TESTUTIL_HPP

#include <random>
#include <string>
#include <vector>

#include "katrel/kat_expr.hpp"
#include "katrel/lang.hpp"
#include "katrel/symbols.hpp"

namespace testutil {

using namespace katrel;

struct ExprGen {
    std::mt19937 rng;
    SymbolTablePtr table;
    std::vector<SymbolRef> tests;
    std::vector<SymbolRef> actions;

    ExprGen(uint32_t seed, size_t n_tests, size_t n_actions)
        : rng(seed), table(std::make_shared<SymbolTable>()) {
        for (size_t i = 0; i < n_tests; ++i)
            tests.push_back(table->test(std::string(1, char('a' + i))));
        for (size_t i = 0; i < n_actions; ++i)
            actions.push_back(table->action(std::string(1, char('A' + i))));
    }

    size_t pick(size_t n) {
        return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
    }

    BoolExpr gen_bool(int depth) {
        if (depth <= 0 || pick(3) == 0) {
            size_t c = pick(tests.size() + 2);
            if (c == tests.size()) return bool_zero();
            if (c == tests.size() + 1) return bool_one();
            return bool_var(tests[c]);
        }
        switch (pick(3)) {
        case 0: return bool_not(gen_bool(depth - 1));
        case 1: return bool_and(gen_bool(depth - 1), gen_bool(depth - 1));
        default: return bool_or(gen_bool(depth - 1), gen_bool(depth - 1));
        }
    }

    KatExpr gen_kat(int depth) {
        if (depth <= 0 || pick(4) == 0) {
            if (pick(2) == 0) return kat_action(actions[pick(actions.size())]);
            return kat_test(gen_bool(1));
        }
        switch (pick(4)) {
        case 0: return kat_seq(gen_kat(depth - 1), gen_kat(depth - 1));
        case 1: return kat_sum(gen_kat(depth - 1), gen_kat(depth - 1));
        case 2: return kat_star(gen_kat(depth - 1));
        default: return kat_seq(kat_test(gen_bool(1)), gen_kat(depth - 1));
        }
    }
};

// Random mini-language programs over a fixed variable set. Loops are
// count-down only so executions stay within small fuel bounds.
struct ProgramGen {
    std::mt19937 rng;
    std::vector<std::string> vars;
    std::vector<std::string> events;
    bool allow_fail = false;
    bool allow_loops = false;

    ProgramGen(uint32_t seed, std::vector<std::string> vs,
               std::vector<std::string> evs)
        : rng(seed), vars(std::move(vs)), events(std::move(evs)) {}

    size_t pick(size_t n) {
        return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
    }

    std::string gen_stmt(int depth) {
        size_t choices = allow_fail ? 6 : 5;
        switch (pick(depth > 0 ? choices : 4)) {
        case 0:  // constant or copy assignment
            return vars[pick(vars.size())] + " = " +
                   (pick(2) ? std::to_string(int64_t(pick(2)))
                            : vars[pick(vars.size())]) +
                   ";";
        case 1:  // boolean flip: v = 1 - w
            return vars[pick(vars.size())] + " = 1 - " +
                   vars[pick(vars.size())] + ";";
        case 2: return vars[pick(vars.size())] + " = nondet();";
        case 3: return events[pick(events.size())] + "();";
        case 4: {
            std::string c = gen_cond();
            std::string t = gen_block(depth - 1, 1 + pick(2));
            if (pick(2)) return "if (" + c + ") " + t;
            return "if (" + c + ") " + t + " else " +
                   gen_block(depth - 1, 1 + pick(2));
        }
        default: {
            std::string c = gen_cond();
            return "if (" + c + ") fail;";
        }
        }
    }

    std::string gen_cond() {
        const char* rel[] = {"==", "!=", "<", ">", "<=", ">="};
        std::string l = vars[pick(vars.size())];
        std::string r = pick(2) ? std::to_string(int64_t(pick(2)))
                                : vars[pick(vars.size())];
        return l + " " + rel[pick(6)] + " " + r;
    }

    std::string gen_block(int depth, size_t n) {
        std::string s = "{ ";
        for (size_t i = 0; i < n; ++i) s += gen_stmt(depth) + " ";
        return s + "}";
    }

    Program gen_program(ProgramSide side, size_t n_stmts, int depth) {
        std::string body = "void f() { ";
        for (size_t i = 0; i < n_stmts; ++i) body += gen_stmt(depth) + " ";
        if (allow_loops && pick(2)) {
            std::string v = vars[pick(vars.size())];
            body += "while (" + v + " > 0) { " + v + " = " + v + " - 1; " +
                    events[pick(events.size())] + "(); } ";
        }
        body += "}";
        return parse_fragment(body, side);
    }
};

}  // namespace testutil

#endif
