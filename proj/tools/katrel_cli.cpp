// Command-line front end: synthesizes trace-refinement relations for a
// two-fragment benchmark file, re-verifies stored relations, compares
// KAT expressions, and composes relations.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "katrel/algebra.hpp"
#include "katrel/synth.hpp"

using namespace katrel;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Rat parse_rat(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_number_float())
        return Rat(static_cast<long long>(j.get<double>() * 10000), 10000);
    std::string s = j.get<std::string>();
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(s));
    return Rat(std::stoll(s.substr(0, slash)),
               std::stoll(s.substr(slash + 1)));
}

void load_scores(const std::string& path, ScoreConfig& cfg) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (j.contains("remove")) cfg.remove_scr = parse_rat(j["remove"]);
    if (j.contains("replace")) cfg.replace_scr = parse_rat(j["replace"]);
    if (j.contains("match")) cfg.match_scr = parse_rat(j["match"]);
    if (j.contains("penalty")) cfg.penalty_scr = parse_rat(j["penalty"]);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct LoadedPair {
    Program left, right;
    SynthConfig cfg;
};

// Front matter keys: direction (le|eq), left (C1|C2), protect (list),
// share-symbols (on|off). Command-line flags override.
LoadedPair load_pair(const std::string& path, const SynthConfig& overrides,
                     const std::set<std::string>& explicit_flags) {
    BenchmarkFile f = parse_benchmark(read_file(path));
    if (f.fragments.size() != 2)
        throw std::runtime_error(path + ": expected two program fragments");
    LoadedPair p;
    p.cfg = overrides;
    auto fm = [&](const char* key) {
        auto it = f.config.find(key);
        return it == f.config.end() ? std::string() : it->second;
    };
    if (!explicit_flags.count("direction") && !fm("direction").empty())
        p.cfg.direction = fm("direction") == "eq" ? Direction::Equivalence
                                                  : Direction::Inclusion;
    if (!explicit_flags.count("protect") && !fm("protect").empty())
        for (const auto& e : split_list(fm("protect")))
            p.cfg.protected_events.insert(e);
    if (!explicit_flags.count("share-symbols") &&
        !fm("share-symbols").empty())
        p.cfg.share_symbols = fm("share-symbols") != "off";
    bool left_is_c2 = fm("left") == "C2";
    p.left = left_is_c2 ? f.fragments[1] : f.fragments[0];
    p.right = left_is_c2 ? f.fragments[0] : f.fragments[1];
    return p;
}

nlohmann::json solution_json(SynthEngine& engine, const SolutionTree& t) {
    Abstraction common;
    TraceRefinementRelation T = engine.ref_relation(t, &common);
    nlohmann::json j;
    j["complete"] = t.complete;
    j["relation"] = relation_to_json(T, *engine.table());
    nlohmann::json restr = nlohmann::json::array();
    std::vector<const SolutionLeaf*> leaves;
    t.collect_leaves(leaves);
    for (const auto* l : leaves) {
        nlohmann::json e = nlohmann::json::array();
        for (const auto& a : l->left_asms) {
            nlohmann::json x;
            x["side"] = side_name(a.loc.side);
            x["line"] = a.loc.line;
            x["cond"] = to_string(a.cond);
            e.push_back(x);
        }
        for (const auto& a : l->right_asms) {
            nlohmann::json x;
            x["side"] = side_name(a.loc.side);
            x["line"] = a.loc.line;
            x["cond"] = to_string(a.cond);
            e.push_back(x);
        }
        restr.push_back(e);
    }
    j["restrictions"] = restr;
    return j;
}

int cmd_synth(const std::string& file, SynthConfig cfg,
              const std::set<std::string>& explicit_flags, bool json_out) {
    LoadedPair p = load_pair(file, cfg, explicit_flags);
    auto table = std::make_shared<SymbolTable>();
    SynthEngine engine(p.left, p.right, p.cfg, table);
    auto trees = engine.run();
    if (trees.empty()) {
        std::cout << "No solutions.\n";
        return 2;
    }
    size_t min_tuples = SIZE_MAX, max_tuples = 0;
    size_t min_hypos = SIZE_MAX, max_hypos = 0;
    for (const auto& t : trees) {
        std::vector<const SolutionLeaf*> leaves;
        t.collect_leaves(leaves);
        min_tuples = std::min(min_tuples, leaves.size());
        max_tuples = std::max(max_tuples, leaves.size());
        std::set<std::string> hyps;
        for (const auto* l : leaves)
            for (const auto& h : l->hyps.items()) hyps.insert(h.str(*table));
        min_hypos = std::min(min_hypos, hyps.size());
        max_hypos = std::max(max_hypos, hyps.size());
    }
    if (json_out) {
        nlohmann::json j;
        j["file"] = file;
        j["direction"] =
            p.cfg.direction == Direction::Inclusion ? "le" : "eq";
        nlohmann::json sols = nlohmann::json::array();
        for (const auto& t : trees) sols.push_back(solution_json(engine, t));
        j["solutions"] = sols;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    for (size_t i = 0; i < trees.size(); ++i) {
        std::cout << "=== solution " << (i + 1) << " ===\n"
                  << engine.render(trees[i]);
    }
    std::cout << "symbols:\n" << dump_symbols([&] {
        Abstraction c;
        engine.ref_relation(trees[0], &c);
        return c;
    }());
    std::cout << "solutions: " << trees.size() << "  tuples: " << min_tuples
              << "/" << max_tuples << "  hypos: " << min_hypos << "/"
              << max_hypos << "\n";
    return 0;
}

int cmd_check(const std::string& file, const std::string& relation_file,
              SynthConfig cfg, const std::set<std::string>& explicit_flags) {
    LoadedPair p = load_pair(file, cfg, explicit_flags);
    auto table = std::make_shared<SymbolTable>();
    Abstraction alpha =
        make_abstraction(p.left, p.right, table, p.cfg.share_symbols);
    auto tl = translate(p.left, alpha);
    auto tr = translate(p.right, tl.alpha);
    TraceRefinementRelation T = relation_from_json(
        nlohmann::json::parse(read_file(relation_file)), *table);
    auto v = verify_solution(T, tl.expr, tr.expr, table, p.cfg.limits);
    if (!v) {
        std::cout << "relation verified: " << T.tuples.size() << " tuple(s)"
                  << (T.complete ? ", coverage holds" : ", partial") << "\n";
        return 0;
    }
    std::cout << "violation: " << v->detail << "\n";
    if (v->cex) std::cout << "counterexample: " << v->cex->str(*table) << "\n";
    return 3;
}

int cmd_katdiff(const std::string& e1, const std::string& e2,
                const std::vector<std::string>& hyp_strs,
                Direction direction) {
    auto table = std::make_shared<SymbolTable>();
    // expand `Any` over the actions mentioned by either expression
    std::vector<SymbolRef> any;
    for (const auto& n : scan_action_names(e1 + " " + e2))
        any.push_back(table->action(n));
    KatExpr k1 = parse_kat(e1, *table, any);
    KatExpr k2 = parse_kat(e2, *table, any);
    HypothesisSet hyps;
    for (const auto& h : hyp_strs) hyps.insert(parse_hypothesis(h, *table));
    auto res = check(k1, k2, hyps, direction, table);
    if (res.ok) {
        std::cout << (direction == Direction::Inclusion ? "included\n"
                                                        : "equivalent\n");
        return 0;
    }
    if (res.cexs.left_not_right)
        std::cout << "left\\right: " << res.cexs.left_not_right->str(*table)
                  << "\n";
    if (res.cexs.right_not_left)
        std::cout << "right\\left: " << res.cexs.right_not_left->str(*table)
                  << "\n";
    return 2;
}

int cmd_compose(const std::string& op, const std::vector<std::string>& files,
                const std::string& ctx_left, const std::string& ctx_right,
                const std::string& out_path) {
    auto table = std::make_shared<SymbolTable>();
    std::vector<TraceRefinementRelation> rels;
    for (const auto& f : files)
        rels.push_back(
            relation_from_json(nlohmann::json::parse(read_file(f)), *table));
    if (rels.empty()) throw std::runtime_error("no relation files given");
    TraceRefinementRelation out;
    if (op == "star") {
        out = compose_star(rels[0]);
    } else if (op == "context") {
        KatExpr m = ctx_left.empty() ? kat_one() : parse_kat(ctx_left, *table);
        KatExpr l =
            ctx_right.empty() ? kat_one() : parse_kat(ctx_right, *table);
        out = embed_context(rels[0], m, l);
    } else {
        if (rels.size() < 2)
            throw std::runtime_error(op + " needs two relation files");
        if (op == "seq") out = compose_seq(rels[0], rels[1]);
        else if (op == "sum") out = compose_sum(rels[0], rels[1]);
        else if (op == "union") out = compose_union(rels[0], rels[1]);
        else if (op == "trans") {
            TransUndefined why;
            auto r = compose_trans(rels[0], rels[1], table, &why);
            if (!r) {
                std::cout << "undefined: tuple with left side "
                          << to_string(why.witness.l1, *table)
                          << " has no successor\n";
                return 2;
            }
            out = *r;
        } else {
            throw std::runtime_error("unknown operator " + op);
        }
    }
    std::string text = relation_to_json(out, *table).dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream o(out_path);
        o << text;
    }
    return 0;
}

int cmd_corpus(const std::string& dir, const SynthConfig& cfg,
               const std::set<std::string>& explicit_flags) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".c") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    int with_solutions = 0, without = 0;
    for (const auto& f : files) {
        std::cout << "==== " << f.filename().string() << " ====\n";
        int rc = cmd_synth(f.string(), cfg, explicit_flags, false);
        if (rc == 0) ++with_solutions;
        else if (rc == 2) ++without;
        else return rc;
    }
    std::cout << "corpus: " << files.size() << " entries, " << with_solutions
              << " with solutions, " << without << " without\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-refinement relation synthesizer"};
    app.require_subcommand(1);

    SynthConfig cfg;
    std::string direction_flag = "le";
    std::string protect_flag, scores_file, share_flag = "on";
    bool json_out = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--direction", direction_flag,
                        "le (inclusion) or eq (equivalence)");
        sub->add_option("--max-depth", cfg.max_depth, "recursion depth bound");
        sub->add_option("--max-solutions", cfg.max_solutions,
                        "solution tree bound");
        sub->add_option("--max-alternatives", cfg.max_alternatives,
                        "repair alternatives per node");
        sub->add_option("--protect", protect_flag,
                        "events that may not be hypothesized away");
        sub->add_option("--scores", scores_file,
                        "JSON file with edit-distance score weights");
        sub->add_option("--share-symbols", share_flag,
                        "share symbols across fragments (on/off)");
    };

    std::string synth_file;
    auto* s_synth = app.add_subcommand("synth",
                                       "synthesize trace-refinement relations");
    s_synth->add_option("file", synth_file, "benchmark file")->required();
    add_common(s_synth);
    s_synth->add_flag("--json", json_out, "machine-readable output");

    std::string check_file, check_relation;
    auto* s_check =
        app.add_subcommand("check", "verify a stored relation against a pair");
    s_check->add_option("file", check_file, "benchmark file")->required();
    s_check->add_option("relation", check_relation, "relation JSON file")
        ->required();
    add_common(s_check);

    std::string kd_e1, kd_e2;
    std::vector<std::string> kd_hyps;
    auto* s_diff = app.add_subcommand(
        "katdiff", "check inclusion/equivalence of two KAT expressions");
    s_diff->add_option("expr1", kd_e1, "left expression")->required();
    s_diff->add_option("expr2", kd_e2, "right expression")->required();
    s_diff->add_option("--hyp", kd_hyps, "hypothesis, e.g. K=1 or a=!b");
    s_diff->add_option("--direction", direction_flag, "le or eq");

    std::string corpus_dir;
    auto* s_corpus =
        app.add_subcommand("corpus", "run synth over a benchmark directory");
    s_corpus->add_option("dir", corpus_dir, "directory of benchmark files")
        ->required();
    add_common(s_corpus);

    std::string co_op, co_out, co_left, co_right;
    std::vector<std::string> co_files;
    auto* s_comp = app.add_subcommand("compose", "compose stored relations");
    s_comp->add_option("--op", co_op, "seq|sum|union|star|trans|context")
        ->required();
    s_comp->add_option("files", co_files, "relation JSON files");
    s_comp->add_option("--left-expr", co_left, "context prefix expression");
    s_comp->add_option("--right-expr", co_right, "context suffix expression");
    s_comp->add_option("-o,--output", co_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        std::set<std::string> explicit_flags;
        if (!s_synth->get_option("--direction")->empty() ||
            !s_diff->get_option("--direction")->empty())
            explicit_flags.insert("direction");
        if (s_synth->count("--protect") || s_check->count("--protect"))
            explicit_flags.insert("protect");
        if (s_synth->count("--share-symbols") ||
            s_check->count("--share-symbols"))
            explicit_flags.insert("share-symbols");

        cfg.direction = direction_flag == "eq" ? Direction::Equivalence
                                               : Direction::Inclusion;
        for (const auto& e : split_list(protect_flag))
            cfg.protected_events.insert(e);
        cfg.share_symbols = share_flag != "off";
        if (!scores_file.empty()) load_scores(scores_file, cfg.scores);

        if (s_synth->parsed())
            return cmd_synth(synth_file, cfg, explicit_flags, json_out);
        if (s_check->parsed())
            return cmd_check(check_file, check_relation, cfg, explicit_flags);
        if (s_diff->parsed())
            return cmd_katdiff(kd_e1, kd_e2, kd_hyps, cfg.direction);
        if (s_corpus->parsed())
            return cmd_corpus(corpus_dir, cfg, explicit_flags);
        if (s_comp->parsed())
            return cmd_compose(co_op, co_files, co_left, co_right, co_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
