// Textual KAT syntax: uppercase identifiers are actions, lowercase are
// tests, `.` or juxtaposition sequences, `+` sums, postfix `*` stars,
// `!` negates a test, `0` and `1` are the constants. `Any` abbreviates
// the sum of all action symbols supplied by the caller. Hypotheses are
// written `A=1`, `b=0`, `A=B`, `a=!b`.

#ifndef KATREL_KAT_PARSER_HPP
#define KATREL_KAT_PARSER_HPP

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "katrel/hypotheses.hpp"
#include "katrel/kat_expr.hpp"

namespace katrel {

struct KatSyntaxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

class KatParser {
public:
    KatParser(const std::string& src, SymbolTable& tab,
              const std::vector<SymbolRef>& any_actions)
        : src_(src), tab_(tab), any_(any_actions) {}

    KatExpr parse() {
        KatExpr e = sum();
        skip_ws();
        if (pos_ != src_.size())
            fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    KatExpr sum() {
        KatExpr e = seq();
        while (peek() == '+') {
            ++pos_;
            e = kat_sum(e, seq());
        }
        return e;
    }

    KatExpr seq() {
        KatExpr e = starred();
        for (;;) {
            char c = peek();
            if (c == '.') {
                ++pos_;
                e = kat_seq(e, starred());
            } else if (c == '(' || c == '!' || c == '0' || c == '1' ||
                       std::isalpha(static_cast<unsigned char>(c)) ||
                       c == '_') {
                e = kat_seq(e, starred());
            } else {
                return e;
            }
        }
    }

    KatExpr starred() {
        KatExpr e = atom();
        while (peek() == '*') {
            ++pos_;
            e = kat_star(e);
        }
        return e;
    }

    KatExpr atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            KatExpr e = sum();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return e;
        }
        if (c == '!') {
            ++pos_;
            KatExpr e = atom();
            if (e->op != KatOp::Test)
                fail("'!' applies to tests, not actions");
            return kat_test(bool_not(e->test));
        }
        if (c == '0') {
            ++pos_;
            return kat_zero();
        }
        if (c == '1') {
            ++pos_;
            return kat_one();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name = ident();
            if (name == "Any") {
                if (any_.empty())
                    fail("'Any' used but no action alphabet supplied");
                std::vector<KatExpr> terms;
                for (SymbolRef a : any_) terms.push_back(kat_action(a));
                return kat_sum(std::move(terms));
            }
            if (std::isupper(static_cast<unsigned char>(name[0])))
                return kat_action(tab_.action(name));
            return kat_test(bool_var(tab_.test(name)));
        }
        fail(pos_ == src_.size() ? "unexpected end of input"
                                 : "unexpected character");
        return kat_zero();
    }

    std::string ident() {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_'))
            ++pos_;
        return src_.substr(start, pos_ - start);
    }

    void skip_ws() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw KatSyntaxError("KAT syntax error at offset " +
                             std::to_string(pos_) + ": " + msg);
    }

    const std::string& src_;
    SymbolTable& tab_;
    const std::vector<SymbolRef>& any_;
    size_t pos_ = 0;
};

}  // namespace detail

inline KatExpr parse_kat(const std::string& src, SymbolTable& tab,
                         const std::vector<SymbolRef>& any_actions = {}) {
    return detail::KatParser(src, tab, any_actions).parse();
}

// Lexical scan for the action names an expression mentions, used to
// build the `Any` expansion before parsing.
inline std::vector<std::string> scan_action_names(const std::string& src) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < src.size()) {
        if (std::isalpha(static_cast<unsigned char>(src[i])) || src[i] == '_') {
            size_t start = i;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) ||
                    src[i] == '_'))
                ++i;
            std::string name = src.substr(start, i - start);
            if (name != "Any" &&
                std::isupper(static_cast<unsigned char>(name[0])))
                out.push_back(name);
        } else {
            ++i;
        }
    }
    return out;
}

inline Hypothesis parse_hypothesis(const std::string& src, SymbolTable& tab) {
    auto eq = src.find('=');
    if (eq == std::string::npos)
        throw KatSyntaxError("hypothesis must contain '=': " + src);
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t");
        size_t e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string lhs = trim(src.substr(0, eq));
    std::string rhs = trim(src.substr(eq + 1));
    if (lhs.empty() || rhs.empty())
        throw KatSyntaxError("malformed hypothesis: " + src);

    auto lit_of = [&](const std::string& s) -> TestLiteral {
        bool pos = true;
        std::string name = s;
        if (name[0] == '!') {
            pos = false;
            name = trim(name.substr(1));
        }
        if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
            throw KatSyntaxError("expected a test literal: " + s);
        return TestLiteral{tab.test(name), pos};
    };

    bool lhs_action = std::isupper(static_cast<unsigned char>(lhs[0]));
    if (lhs_action) {
        if (rhs == "1") return Hypothesis::action_is_skip(tab.action(lhs));
        if (!rhs.empty() && std::isupper(static_cast<unsigned char>(rhs[0])))
            return Hypothesis::action_eq(tab.action(lhs), tab.action(rhs));
        throw KatSyntaxError("action hypothesis must be A=1 or A=B: " + src);
    }
    if (rhs == "0" || rhs == "1") {
        if (lhs[0] == '!')
            throw KatSyntaxError("constant hypothesis takes a plain test: " +
                                 src);
        return Hypothesis::test_const(tab.test(lhs), rhs == "1");
    }
    return Hypothesis::test_lit_eq(lit_of(lhs), lit_of(rhs));
}

}  // namespace katrel

#endif
