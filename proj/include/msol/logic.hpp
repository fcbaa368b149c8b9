/*
 * Copyright 2026 The msolimit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// MSO formulas over graphs: immutable AST, concrete syntax, quantifier rank.
//
// Concrete syntax:
//   atoms      E(x,y)   x = y   x in X   true   false
//   connectives  !  &  |  ->  <->      (binding tightest to loosest)
//   quantifiers  ex x.  all x.  (first-order)   EX X.  ALL X.  (set)
// Quantifier bodies extend as far right as possible. Lowercase-initial
// names are first-order, uppercase-initial names are set variables; the
// reserved name Root is first-order. `#` starts a comment.

#include <algorithm>
#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "msol/errors.hpp"
#include "msol/graph.hpp"

namespace msol {

enum class Op { True, False, Member, Edge, Equal, And, Or, Not, ExistsFO, ForallFO, ExistsSO, ForallSO };

class Formula {
public:
    struct Node {
        Op op;
        std::string a;  // variable operand / bound variable
        std::string b;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
        int rank = 0;
    };

    Formula() : Formula(make(Op::True)) {}

    static Formula truth(bool v) { return make(v ? Op::True : Op::False); }
    static Formula member(std::string x, std::string X) { return make(Op::Member, std::move(x), std::move(X)); }
    static Formula edge(std::string x, std::string y) { return make(Op::Edge, std::move(x), std::move(y)); }
    static Formula equal(std::string x, std::string y) { return make(Op::Equal, std::move(x), std::move(y)); }
    static Formula conj(const Formula& l, const Formula& r) { return make(Op::And, {}, {}, l.node_, r.node_); }
    static Formula disj(const Formula& l, const Formula& r) { return make(Op::Or, {}, {}, l.node_, r.node_); }
    static Formula neg(const Formula& f) { return make(Op::Not, {}, {}, f.node_); }
    static Formula implies(const Formula& l, const Formula& r) { return disj(neg(l), r); }
    static Formula iff(const Formula& l, const Formula& r) { return conj(implies(l, r), implies(r, l)); }
    static Formula exists(std::string x, const Formula& f) { return make(Op::ExistsFO, std::move(x), {}, f.node_); }
    static Formula forall(std::string x, const Formula& f) { return make(Op::ForallFO, std::move(x), {}, f.node_); }
    static Formula exists_set(std::string X, const Formula& f) { return make(Op::ExistsSO, std::move(X), {}, f.node_); }
    static Formula forall_set(std::string X, const Formula& f) { return make(Op::ForallSO, std::move(X), {}, f.node_); }

    Op op() const noexcept { return node_->op; }
    const std::string& var() const noexcept { return node_->a; }
    const std::string& var2() const noexcept { return node_->b; }
    Formula lhs() const { return Formula(node_->lhs); }
    Formula rhs() const { return Formula(node_->rhs); }
    Formula body() const { return Formula(node_->lhs); }
    int rank() const noexcept { return node_->rank; }
    const Node* node() const noexcept { return node_.get(); }

    friend bool operator==(const Formula& f, const Formula& g) { return same(f.node_.get(), g.node_.get()); }

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Formula make(Op op, std::string a = {}, std::string b = {}, std::shared_ptr<const Node> l = nullptr,
                        std::shared_ptr<const Node> r = nullptr) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        int sub = std::max(n->lhs ? n->lhs->rank : 0, n->rhs ? n->rhs->rank : 0);
        bool quant = op == Op::ExistsFO || op == Op::ForallFO || op == Op::ExistsSO || op == Op::ForallSO;
        n->rank = sub + (quant ? 1 : 0);
        return Formula(std::move(n));
    }

    static bool same(const Node* x, const Node* y) {
        if (x == y) return true;
        if (!x || !y) return false;
        return x->op == y->op && x->a == y->a && x->b == y->b && same(x->lhs.get(), y->lhs.get()) &&
               same(x->rhs.get(), y->rhs.get());
    }

    std::shared_ptr<const Node> node_;
};

inline int quantifier_rank(const Formula& f) { return f.rank(); }

inline bool is_set_name(const std::string& name) {
    return !name.empty() && name != kRoot && std::isupper(static_cast<unsigned char>(name[0]));
}

namespace logic_detail {

inline int recompute_rank(const Formula::Node* n) {
    if (!n) return 0;
    int sub = std::max(recompute_rank(n->lhs.get()), recompute_rank(n->rhs.get()));
    switch (n->op) {
    case Op::ExistsFO:
    case Op::ForallFO:
    case Op::ExistsSO:
    case Op::ForallSO:
        return sub + 1;
    default:
        return sub;
    }
}

inline void collect_free(const Formula::Node* n, std::vector<std::string>& bound, VarSet& out) {
    auto note = [&](const std::string& v) {
        if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
        (is_set_name(v) ? out.so : out.fo).insert(v);
    };
    switch (n->op) {
    case Op::True:
    case Op::False:
        return;
    case Op::Member:
    case Op::Edge:
    case Op::Equal:
        note(n->a);
        note(n->b);
        return;
    case Op::And:
    case Op::Or:
        collect_free(n->lhs.get(), bound, out);
        collect_free(n->rhs.get(), bound, out);
        return;
    case Op::Not:
        collect_free(n->lhs.get(), bound, out);
        return;
    default:
        bound.push_back(n->a);
        collect_free(n->lhs.get(), bound, out);
        bound.pop_back();
    }
}

inline bool uses_sets(const Formula::Node* n) {
    if (!n) return false;
    if (n->op == Op::Member || n->op == Op::ExistsSO || n->op == Op::ForallSO) return true;
    return uses_sets(n->lhs.get()) || uses_sets(n->rhs.get());
}

inline int set_quantifier_depth(const Formula::Node* n) {
    if (!n) return 0;
    int sub = std::max(set_quantifier_depth(n->lhs.get()), set_quantifier_depth(n->rhs.get()));
    return sub + ((n->op == Op::ExistsSO || n->op == Op::ForallSO) ? 1 : 0);
}

} // namespace logic_detail

inline VarSet free_variables(const Formula& f) {
    std::vector<std::string> bound;
    VarSet out;
    logic_detail::collect_free(f.node(), bound, out);
    return out;
}

inline bool is_sentence(const Formula& f) {
    auto v = free_variables(f);
    return v.fo.empty() && v.so.empty();
}

/// Nesting depth of set quantifiers only.
inline int set_quantifier_depth(const Formula& f) { return logic_detail::set_quantifier_depth(f.node()); }

/// Prints in the concrete syntax, fully parenthesized below quantifiers.
inline std::string to_string(const Formula& f) {
    switch (f.op()) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Member: return f.var() + " in " + f.var2();
    case Op::Edge: return "E(" + f.var() + "," + f.var2() + ")";
    case Op::Equal: return f.var() + " = " + f.var2();
    case Op::And: return "(" + to_string(f.lhs()) + " & " + to_string(f.rhs()) + ")";
    case Op::Or: return "(" + to_string(f.lhs()) + " | " + to_string(f.rhs()) + ")";
    case Op::Not: return "!" + to_string(f.body());
    case Op::ExistsFO: return "(ex " + f.var() + ". " + to_string(f.body()) + ")";
    case Op::ForallFO: return "(all " + f.var() + ". " + to_string(f.body()) + ")";
    case Op::ExistsSO: return "(EX " + f.var() + ". " + to_string(f.body()) + ")";
    case Op::ForallSO: return "(ALL " + f.var() + ". " + to_string(f.body()) + ")";
    }
    return {};
}

namespace logic_detail {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Bang, Amp, Bar, Arrow, DArrow, Eq, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

inline std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok k, std::string t, int len) {
        out.push_back({k, std::move(t), line, col});
        i += static_cast<size_t>(len);
        col += len;
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
        } else if (c == '#') {  // comment to end of line
            while (i < src.size() && src[i] != '\n') ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            push(Tok::Ident, src.substr(i, j - i), static_cast<int>(j - i));
        } else if (src.compare(i, 3, "<->") == 0) {
            push(Tok::DArrow, "<->", 3);
        } else if (src.compare(i, 2, "->") == 0) {
            push(Tok::Arrow, "->", 2);
        } else {
            switch (c) {
            case '(': push(Tok::LParen, "(", 1); break;
            case ')': push(Tok::RParen, ")", 1); break;
            case ',': push(Tok::Comma, ",", 1); break;
            case '.': push(Tok::Dot, ".", 1); break;
            case '!': push(Tok::Bang, "!", 1); break;
            case '&': push(Tok::Amp, "&", 1); break;
            case '|': push(Tok::Bar, "|", 1); break;
            case '=': push(Tok::Eq, "=", 1); break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
            }
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula parse() {
        Formula f = formula();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg.empty() ? "syntax error" : msg, peek().line, peek().col);
    }
    void expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what);
        ++pos_;
    }
    static bool keyword(const std::string& s) {
        return s == "ex" || s == "all" || s == "EX" || s == "ALL" || s == "in" || s == "true" || s == "false";
    }
    std::string variable(bool set) {
        const Token& t = peek();
        if (t.kind != Tok::Ident || keyword(t.text)) fail("expected a variable");
        if (is_set_name(t.text) != set)
            throw ParseError((set ? "expected a set variable, got '" : "expected a first-order variable, got '") +
                                 t.text + "'",
                             t.line, t.col);
        ++pos_;
        return t.text;
    }

    Formula formula() {
        Formula f = implication();
        while (peek().kind == Tok::DArrow) {
            ++pos_;
            f = Formula::iff(f, implication());
        }
        return f;
    }
    Formula implication() {
        Formula f = disjunction();
        if (peek().kind == Tok::Arrow) {
            ++pos_;
            return Formula::implies(f, implication());
        }
        return f;
    }
    Formula disjunction() {
        Formula f = conjunction();
        while (peek().kind == Tok::Bar) {
            ++pos_;
            f = Formula::disj(f, conjunction());
        }
        return f;
    }
    Formula conjunction() {
        Formula f = unary();
        while (peek().kind == Tok::Amp) {
            ++pos_;
            f = Formula::conj(f, unary());
        }
        return f;
    }
    Formula unary() {
        const Token& t = peek();
        if (t.kind == Tok::Bang) {
            ++pos_;
            return Formula::neg(unary());
        }
        if (t.kind == Tok::Ident && (t.text == "ex" || t.text == "all" || t.text == "EX" || t.text == "ALL")) {
            const std::string q = t.text;
            ++pos_;
            const bool set = q == "EX" || q == "ALL";
            std::string v = variable(set);
            expect(Tok::Dot, "'.' after quantified variable");
            Formula body = formula();
            if (q == "ex") return Formula::exists(v, body);
            if (q == "all") return Formula::forall(v, body);
            if (q == "EX") return Formula::exists_set(v, body);
            return Formula::forall_set(v, body);
        }
        return primary();
    }
    Formula primary() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            ++pos_;
            Formula f = formula();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind != Tok::Ident) fail("expected a formula");
        if (t.text == "true" || t.text == "false") {
            ++pos_;
            return Formula::truth(t.text == "true");
        }
        if (t.text == "E" && toks_[pos_ + 1].kind == Tok::LParen) {
            pos_ += 2;
            std::string x = variable(false);
            expect(Tok::Comma, "','");
            std::string y = variable(false);
            expect(Tok::RParen, "')'");
            return Formula::edge(x, y);
        }
        std::string x = variable(false);
        if (peek().kind == Tok::Eq) {
            ++pos_;
            return Formula::equal(x, variable(false));
        }
        if (peek().kind == Tok::Ident && peek().text == "in") {
            ++pos_;
            return Formula::member(x, variable(true));
        }
        fail("expected '=' or 'in'");
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
};

} // namespace logic_detail

inline Formula parse_formula(const std::string& text) {
    return logic_detail::Parser(logic_detail::tokenize(text)).parse();
}

/// Sentences used throughout the workbench.
namespace sentences {

/// Rank 3: every nonempty set closed under neighbours is everything.
inline const char* const kConnected =
    "ALL X. (((ex x. x in X) & all x. all y. ((x in X & E(x,y)) -> y in X)) -> all z. z in X)";
inline const char* const kIsolatedVertex = "ex x. all y. !E(x,y)";
inline const char* const kNonempty = "ex x. x = x";

} // namespace sentences

} // namespace msol
