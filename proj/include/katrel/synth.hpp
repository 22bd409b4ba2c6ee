// The synthesis loop. Each node translates the (possibly restricted)
// pair, checks inclusion or equivalence modulo the accumulated
// hypotheses, and either closes a leaf or derives repairs from the
// counterexample alignment: boolean case splits become complementary
// assume-instrumented branches, symbol repairs become hypotheses.
// Alternatives are explored in order (case splits before hypothesis-only
// repairs) under depth and solution-count budgets; every emitted leaf
// has passed the checker, and a branch is kept only if its triggering
// counterexample is no longer a counterexample for the branch.

#ifndef KATREL_SYNTH_HPP
#define KATREL_SYNTH_HPP

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "katrel/algebra.hpp"
#include "katrel/automata.hpp"
#include "katrel/editdist.hpp"
#include "katrel/oracle.hpp"
#include "katrel/translate.hpp"

namespace katrel {

struct NoRepairFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SynthConfig {
    Direction direction = Direction::Inclusion;
    int max_depth = 8;
    size_t max_solutions = 256;
    size_t max_alternatives = 5;
    bool share_symbols = true;
    ScoreConfig scores;
    std::set<std::string> protected_events;  // callee names
    CheckLimits limits;
};

struct LocatedAssume {
    Location loc;
    BoolCond cond;

    std::string str() const {
        return "asm(" + to_string(cond) + ")@" + loc.str();
    }
};

// One restriction: located assumes for both programs plus new
// hypotheses. The derived expression forms are the translations of the
// instrumented programs; `exact` records whether the instrumented
// translation is language-equal to the restricted original translation.
struct Restriction {
    std::vector<LocatedAssume> left_asms, right_asms;
    HypothesisSet new_hyps;
    KatExpr left_expr, right_expr;
    bool exact = false;
    std::string label;  // display: the split literal or hypothesis list
};

struct SolutionLeaf {
    KatExpr l_left, l_right;
    HypothesisSet hyps;
    Abstraction alpha;
    std::vector<LocatedAssume> left_asms, right_asms;
};

struct SolutionNode;
using SolutionNodePtr = std::shared_ptr<const SolutionNode>;

struct SolutionNode {
    enum Kind : uint8_t { Branch, Leaf, PartialMarker } kind = Leaf;
    // Branch
    std::string branch_label;
    std::vector<std::string> child_labels;
    std::vector<SolutionNodePtr> children;
    // Leaf
    SolutionLeaf leaf;
};

struct SolutionTree {
    SolutionNodePtr root;
    Direction direction = Direction::Inclusion;
    bool complete = false;
    bool budget_hit = false;

    void collect_leaves(std::vector<const SolutionLeaf*>& out) const {
        std::function<void(const SolutionNodePtr&)> walk =
            [&](const SolutionNodePtr& n) {
                if (!n) return;
                if (n->kind == SolutionNode::Leaf) out.push_back(&n->leaf);
                for (const auto& c : n->children) walk(c);
            };
        walk(root);
    }
};

namespace detail {

struct Alternative {
    enum Kind : uint8_t { Split, HypBundle } kind = HypBundle;
    SymbolRef split_test;
    HypothesisSet hyps;  // bundle, also used to rescue a failing branch
};

}  // namespace detail

class SynthEngine {
public:
    SynthEngine(Program left, Program right, SynthConfig cfg,
                SymbolTablePtr table)
        : left_(std::move(left)),
          right_(std::move(right)),
          cfg_(std::move(cfg)),
          table_(std::move(table)) {
        root_alpha_ = make_abstraction(left_, right_, table_,
                                       cfg_.share_symbols);
        resolve_protected();
    }

    std::vector<SolutionTree> run() {
        std::vector<SolutionNodePtr> roots =
            explore(left_, right_, {}, root_alpha_, cfg_.max_depth,
                    cfg_.max_solutions, {}, {}, {});
        std::vector<SolutionTree> out;
        std::set<std::string> seen;
        for (const auto& r : roots) {
            SolutionTree t;
            t.root = r;
            t.direction = cfg_.direction;
            t.budget_hit = has_marker(r);
            t.complete = !t.budget_hit && coverage_holds(t);
            std::string key = render(t);
            if (seen.insert(key).second) out.push_back(std::move(t));
        }
        return out;
    }

    // The relation carried by a tree's leaves, over the combined
    // abstraction of all leaves.
    TraceRefinementRelation ref_relation(const SolutionTree& t,
                                         Abstraction* common = nullptr) const {
        std::vector<const SolutionLeaf*> leaves;
        t.collect_leaves(leaves);
        if (leaves.empty()) throw std::runtime_error("tree has no leaves");
        Abstraction alpha = leaves[0]->alpha;
        for (size_t i = 1; i < leaves.size(); ++i)
            alpha = combine(alpha, leaves[i]->alpha);
        TraceRefinementRelation T;
        T.direction = t.direction;
        T.complete = t.complete;
        for (const auto* l : leaves)
            T.tuples.push_back(RelationTuple{l->l_left, l->l_right, l->hyps});
        if (common) *common = alpha;
        return T;
    }

    // Translations of the original pair under a (final) abstraction.
    std::pair<KatExpr, KatExpr> originals(Abstraction alpha) const {
        auto tl = translate(left_, std::move(alpha));
        auto tr = translate(right_, std::move(tl.alpha));
        return {tl.expr, tr.expr};
    }

    const SymbolTablePtr& table() const { return table_; }
    const SynthConfig& config() const { return cfg_; }

    // Counterexample alignment to repair alternatives, in exploration
    // order: case splits on tests occurring in the strings (removal and
    // replacement participants first, matched literals after), then one
    // hypothesis bundle.
    std::vector<detail::Alternative> solve_diff(
        const Counterexamples& cexs, const std::set<uint32_t>& split_history) {
        CexString wl = cexs.left_not_right.value_or(CexString{});
        CexString wr = cexs.right_not_left.value_or(CexString{});
        if (wl.empty() && wr.empty())
            throw NoRepairFound("no counterexample to align");
        DistanceResult dist = distance(wl, wr, cfg_.scores);
        auto repairs = to_repairs(dist.transforms, wl, wr, protected_syms_);

        std::vector<detail::Alternative> out;
        std::set<uint32_t> seen_tests;
        auto add_split = [&](SymbolRef test) {
            if (!test.valid()) return;
            if (split_history.count(test.id) || seen_tests.count(test.id))
                return;
            seen_tests.insert(test.id);
            detail::Alternative alt;
            alt.kind = detail::Alternative::Split;
            alt.split_test = test;
            out.push_back(std::move(alt));
        };

        // splits from repaired literals first
        for (const auto& r : repairs) {
            if (r.kind == RepairAction::CaseSplit) add_split(r.lit.test);
            if (r.kind == RepairAction::AddHypothesis &&
                r.hyp.kind == HypKind::TestLitEq) {
                add_split(r.hyp.l1.test);
                add_split(r.hyp.l2.test);
            }
        }
        // then matched literals
        for (const auto& t : dist.transforms) {
            if (t.kind != TransformKind::Match) continue;
            const CexElem& e = wl.elems[t.pos];
            if (!e.is_action) add_split(e.lit.test);
        }

        HypothesisSet bundle;
        for (const auto& r : repairs)
            if (r.kind == RepairAction::AddHypothesis) {
                try {
                    bundle.insert(r.hyp);
                } catch (const InconsistentHypotheses&) {
                }
            }
        // Replacements that flip the polarity of one test carry no repair
        // by themselves, but two of them pair up: the sides disagree on
        // both tests simultaneously, so equating the first string's
        // literal with the second string's literal at the partner slot
        // aligns them (renamed branch conditions land here).
        {
            std::vector<std::pair<TestLiteral, TestLiteral>> flips;
            for (const auto& t : dist.transforms) {
                if (t.kind != TransformKind::Replace) continue;
                const CexElem& from = wl.elems[t.pos];
                const CexElem& to = t.replacement;
                if (from.is_action || to.is_action) continue;
                if (from.lit.test == to.lit.test &&
                    from.lit.positive != to.lit.positive)
                    flips.emplace_back(from.lit, to.lit);
            }
            for (size_t i = 0; i + 1 < flips.size(); i += 2) {
                TestLiteral l1 = flips[i].first;        // in the left string
                TestLiteral l2 = flips[i + 1].second;   // in the right string
                if (l1.test == l2.test) continue;
                try {
                    bundle.insert(Hypothesis::test_lit_eq(l1, l2));
                } catch (const InconsistentHypotheses&) {
                }
            }
        }
        if (!bundle.empty()) {
            detail::Alternative alt;
            alt.kind = detail::Alternative::HypBundle;
            alt.hyps = bundle;
            out.push_back(std::move(alt));
        }
        if (out.empty())
            throw NoRepairFound("every repair targets a protected event");
        return out;
    }

    // Instruments one restriction into the pair and refines the
    // abstraction; fills the derived expressions and the exactness flag.
    struct RestrictResult {
        Program left, right;
        Abstraction alpha;
    };
    RestrictResult do_restrict(const Program& progL, const Program& progR,
                               Restriction& r, const HypothesisSet& hyps,
                               const Abstraction& alpha) {
        std::vector<std::pair<Location, BoolCond>> la, ra;
        for (const auto& a : r.left_asms) la.emplace_back(a.loc, a.cond);
        for (const auto& a : r.right_asms) ra.emplace_back(a.loc, a.cond);
        RestrictResult res{instrument(progL, la), instrument(progR, ra),
                           alpha};
        std::vector<std::pair<ProgramSide, BoolCond>> conds;
        for (const auto& a : r.left_asms) conds.emplace_back(progL.side, a.cond);
        for (const auto& a : r.right_asms)
            conds.emplace_back(progR.side, a.cond);
        res.alpha = refine(res.alpha, conds);

        // derived expressions + the restrict postcondition: the
        // instrumented translation equals the restricted original
        // translation, which reduces to inclusion in the original
        auto tl = translate(res.left, res.alpha);
        res.alpha = tl.alpha;
        auto tr = translate(res.right, res.alpha);
        res.alpha = tr.alpha;
        r.left_expr = tl.expr;
        r.right_expr = tr.expr;
        auto ol = translate(progL, res.alpha);
        res.alpha = ol.alpha;
        auto og = translate(progR, res.alpha);
        res.alpha = og.alpha;
        try {
            r.exact = check(tl.expr, ol.expr, hyps, Direction::Inclusion,
                            table_, cfg_.limits)
                          .ok &&
                      check(tr.expr, og.expr, hyps, Direction::Inclusion,
                            table_, cfg_.limits)
                          .ok;
        } catch (const CheckBudgetExceeded&) {
            r.exact = false;
        }
        return res;
    }

    std::string render(const SolutionTree& t) const;

private:
    void resolve_protected() {
        // protected events are named by callee; collect their symbols at
        // binding time instead, by callee prefix of the statement text
        protected_names_ = cfg_.protected_events;
    }

    bool is_protected(SymbolRef action) const {
        return protected_syms_.count(action) > 0;
    }

    void refresh_protected(const Abstraction& alpha) {
        if (protected_names_.empty()) return;
        for (const auto& s : alpha.table->all()) {
            if (s.kind != SymbolKind::Action || !s.origin) continue;
            for (const auto& name : protected_names_) {
                const std::string& txt = s.origin->text;
                // statement text is "name(...);" or "v = name(...);"
                if (txt.rfind(name + "(", 0) == 0 ||
                    txt.find("= " + name + "(") != std::string::npos)
                    protected_syms_.insert(SymbolRef{s.id});
            }
        }
    }

    static bool has_marker(const SolutionNodePtr& n) {
        if (!n) return false;
        if (n->kind == SolutionNode::PartialMarker) return true;
        for (const auto& c : n->children)
            if (has_marker(c)) return true;
        return false;
    }

    bool coverage_holds(const SolutionTree& t) {
        try {
            Abstraction common;
            TraceRefinementRelation T = ref_relation(t, &common);
            auto [k1, k2] = originals(common);
            std::vector<KatExpr> firsts, seconds;
            for (const auto& tu : T.tuples) {
                firsts.push_back(tu.l1);
                seconds.push_back(tu.l2);
            }
            if (!check(k1, kat_sum(std::move(firsts)), {},
                       Direction::Inclusion, table_, cfg_.limits)
                     .ok)
                return false;
            if (cfg_.direction == Direction::Equivalence &&
                !check(k2, kat_sum(std::move(seconds)), {},
                       Direction::Inclusion, table_, cfg_.limits)
                     .ok)
                return false;
            return true;
        } catch (const CheckBudgetExceeded&) {
            return false;
        }
    }

    // Is w still a counterexample for the pair under hyps?
    bool still_counterexample(const CexString& w, const KatExpr& kl,
                              const KatExpr& kr, const HypothesisSet& hyps) {
        if (w.empty()) return false;
        HypothesisRewriter rw(hyps);
        KatExpr we = rw.rewrite(kat_of_cex(w));
        KatExpr rl = rw.rewrite(kl);
        KatExpr rr = rw.rewrite(kr);
        Alphabet al = alphabet_of({we, rl, rr});
        auto gw = compile(we, table_, al);
        if (language_empty(gw)) return false;
        auto gl = compile(rl, table_, al);
        auto gr = compile(rr, table_, al);
        return language_le(gw, gl, cfg_.limits) &&
               languages_disjoint(gw, gr, cfg_.limits);
    }

    // Assume conditions for a split literal, at every location where the
    // test occurs in either program.
    Restriction make_split(const Abstraction& alpha, SymbolRef test,
                           bool positive, const Program& progL,
                           const Program& progR) {
        Restriction r;
        const TestPredicate& pred = alpha.test_pred->at(test.id);
        BoolCond cond = positive ? pred.when_true
                                 : cond_negate(pred.when_true);
        auto locs_it = alpha.test_locs->find(test.id);
        if (locs_it == alpha.test_locs->end())
            throw std::logic_error("split test has no recorded locations");
        std::string first_loc;
        for (const Location& loc : locs_it->second) {
            if (loc.side == progL.side && find_stmt(progL, loc))
                r.left_asms.push_back(LocatedAssume{loc, cond});
            else if (loc.side == progR.side && find_stmt(progR, loc))
                r.right_asms.push_back(LocatedAssume{loc, cond});
            if (first_loc.empty()) first_loc = loc.str();
        }
        r.label = "assume(" + to_string(cond) + ")";
        return r;
    }

    std::vector<SolutionNodePtr> explore(
        const Program& progL, const Program& progR, HypothesisSet hyps,
        Abstraction alpha, int depth, size_t budget,
        std::set<uint32_t> split_history,
        std::vector<LocatedAssume> path_left,
        std::vector<LocatedAssume> path_right) {
        if (budget == 0) return {};
        auto tl = translate(progL, std::move(alpha));
        auto tr = translate(progR, std::move(tl.alpha));
        alpha = std::move(tr.alpha);
        refresh_protected(alpha);

        CheckResult res;
        try {
            res = check(tl.expr, tr.expr, hyps, cfg_.direction, table_,
                        cfg_.limits);
        } catch (const CheckBudgetExceeded&) {
            return {marker()};
        }
        if (res.ok) {
            auto n = std::make_shared<SolutionNode>();
            n->kind = SolutionNode::Leaf;
            n->leaf = SolutionLeaf{tl.expr, tr.expr, hyps, alpha,
                                   std::move(path_left),
                                   std::move(path_right)};
            return {n};
        }
        if (depth <= 0) return {marker()};

        std::vector<detail::Alternative> alts;
        try {
            alts = solve_diff(res.cexs, split_history);
        } catch (const NoRepairFound&) {
            return {};
        }
        if (alts.size() > cfg_.max_alternatives)
            alts.resize(cfg_.max_alternatives);

        // triggering counterexamples for the progress requirement, with
        // the side they witness
        std::vector<std::pair<CexString, bool>> triggers;  // (cex, is_left)
        if (res.cexs.left_not_right)
            triggers.emplace_back(*res.cexs.left_not_right, true);
        if (cfg_.direction == Direction::Equivalence &&
            res.cexs.right_not_left)
            triggers.emplace_back(*res.cexs.right_not_left, false);

        std::vector<SolutionNodePtr> out;
        size_t slice = std::max<size_t>(1, budget / alts.size());
        for (const auto& alt : alts) {
            if (out.size() >= budget) break;
            size_t room = std::min(slice, budget - out.size());
            if (alt.kind == detail::Alternative::HypBundle) {
                HypothesisSet child_hyps;
                try {
                    child_hyps = hyps.merged(alt.hyps);
                } catch (const InconsistentHypotheses&) {
                    continue;
                }
                bool ok = true;
                for (const auto& [w, is_left] : triggers)
                    if (still_counterexample(w, is_left ? tl.expr : tr.expr,
                                             is_left ? tr.expr : tl.expr,
                                             child_hyps))
                        ok = false;
                if (!ok) continue;
                auto sub = explore(progL, progR, child_hyps, alpha, depth - 1,
                                   room, split_history, path_left, path_right);
                for (auto& n : sub) out.push_back(std::move(n));
                continue;
            }
            // case split: both polarities must produce subtrees
            std::vector<std::vector<SolutionNodePtr>> kids;
            std::vector<std::string> labels;
            bool dead = false;
            std::set<uint32_t> child_history = split_history;
            child_history.insert(alt.split_test.id);
            for (bool pol : {true, false}) {
                Restriction r =
                    make_split(alpha, alt.split_test, pol, progL, progR);
                HypothesisSet child_hyps = hyps;
                RestrictResult rr;
                try {
                    rr = do_restrict(progL, progR, r, child_hyps, alpha);
                } catch (const UnknownLocation&) {
                    dead = true;
                    break;
                }
                // progress: the trigger must be gone; rescue first with
                // the branch's boolean valuation hypothesis, then with
                // the full hypothesis bundle of this alignment
                auto excluded = [&]() {
                    for (const auto& [w, is_left] : triggers)
                        if (still_counterexample(
                                w, is_left ? r.left_expr : r.right_expr,
                                is_left ? r.right_expr : r.left_expr,
                                child_hyps))
                            return false;
                    return true;
                };
                bool ok = excluded();
                if (!ok) {
                    try {
                        child_hyps = child_hyps.with(
                            Hypothesis::test_const(alt.split_test, pol));
                    } catch (const InconsistentHypotheses&) {
                        dead = true;
                        break;
                    }
                    ok = excluded();
                }
                if (!ok) {
                    HypothesisSet rescue;
                    for (const auto& a : alts)
                        if (a.kind == detail::Alternative::HypBundle)
                            rescue = a.hyps;
                    try {
                        child_hyps = child_hyps.merged(rescue);
                    } catch (const InconsistentHypotheses&) {
                        dead = true;
                        break;
                    }
                    ok = excluded();
                }
                if (!ok) {
                    dead = true;
                    break;
                }
                std::vector<LocatedAssume> pl = path_left, pr = path_right;
                for (const auto& x : r.left_asms) pl.push_back(x);
                for (const auto& x : r.right_asms) pr.push_back(x);
                auto sub = explore(rr.left, rr.right, child_hyps, rr.alpha,
                                   depth - 1, room, child_history, pl, pr);
                if (sub.empty()) {
                    dead = true;
                    break;
                }
                kids.push_back(std::move(sub));
                labels.push_back(r.label);
            }
            if (dead) continue;
            // combine subtree choices, capped
            for (size_t i = 0; i < kids[0].size() && out.size() < budget;
                 ++i) {
                for (size_t j = 0; j < kids[1].size() && out.size() < budget;
                     ++j) {
                    auto n = std::make_shared<SolutionNode>();
                    n->kind = SolutionNode::Branch;
                    n->branch_label =
                        table_->name(alt.split_test) + " (" +
                        to_string(alpha.test_pred->at(alt.split_test.id)
                                      .when_true) +
                        ")";
                    n->child_labels = labels;
                    n->children = {kids[0][i], kids[1][j]};
                    out.push_back(std::move(n));
                    if (i + j > 4) break;  // keep combinations shallow
                }
            }
        }
        return out;
    }

    static SolutionNodePtr marker() {
        auto n = std::make_shared<SolutionNode>();
        n->kind = SolutionNode::PartialMarker;
        return n;
    }

    Program left_, right_;
    SynthConfig cfg_;
    SymbolTablePtr table_;
    Abstraction root_alpha_;
    std::set<std::string> protected_names_;
    std::set<SymbolRef> protected_syms_;
};

// --- rendering ---

inline std::string SynthEngine::render(const SolutionTree& t) const {
    std::ostringstream os;
    const SymbolTable& tab = *table_;
    std::function<void(const SolutionNodePtr&, int)> walk =
        [&](const SolutionNodePtr& n, int indent) {
            std::string pad(indent * 2, ' ');
            if (!n) return;
            switch (n->kind) {
            case SolutionNode::PartialMarker:
                os << pad << "(unresolved: budget exhausted)\n";
                return;
            case SolutionNode::Leaf: {
                os << pad << "axioms: " << n->leaf.hyps.str(tab) << "\n";
                if (!n->leaf.left_asms.empty() ||
                    !n->leaf.right_asms.empty()) {
                    os << pad << "restrictions:";
                    for (const auto& a : n->leaf.left_asms)
                        os << " " << a.str();
                    for (const auto& a : n->leaf.right_asms)
                        os << " " << a.str();
                    os << "\n";
                }
                os << pad << "left  = " << to_string(n->leaf.l_left, tab)
                   << "\n";
                os << pad << "right = " << to_string(n->leaf.l_right, tab)
                   << "\n";
                return;
            }
            case SolutionNode::Branch:
                os << pad << "split on " << n->branch_label << "\n";
                for (size_t i = 0; i < n->children.size(); ++i) {
                    os << pad << "+ " << n->child_labels[i] << "\n";
                    walk(n->children[i], indent + 1);
                }
                return;
            }
        };
    os << "solution"
       << (t.complete ? " (complete)" : " (partial)")
       << (t.direction == Direction::Inclusion ? " [<=]" : " [==]") << "\n";
    walk(t.root, 1);
    return os.str();
}

// --- convenience entry points ---

// Runs the engine; the first program is the left side of the inclusion.
inline std::vector<SolutionTree> synth(const Program& left,
                                       const Program& right,
                                       const SynthConfig& cfg,
                                       SymbolTablePtr table) {
    SynthEngine engine(left, right, cfg, std::move(table));
    return engine.run();
}

// Appends the trivially-true tuple (both full translations, every action
// hypothesized to skip) turning a partial relation into a complete one.
inline TraceRefinementRelation complete_with_trivial(
    TraceRefinementRelation T, const KatExpr& k1, const KatExpr& k2,
    const SymbolTable& tab) {
    RelationTuple t;
    t.l1 = k1;
    t.l2 = k2;
    std::set<SymbolRef> tests, actions;
    collect_symbols(k1, tests, actions);
    collect_symbols(k2, tests, actions);
    for (SymbolRef a : actions)
        t.hyps.insert(Hypothesis::action_is_skip(a));
    (void)tab;
    T.tuples.push_back(std::move(t));
    T.complete = true;
    return T;
}

}  // namespace katrel

#endif
