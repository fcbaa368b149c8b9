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

// Brute-force model checking: first-order quantifiers range over vertices,
// set quantifiers over all 2^n subsets.

#include <cstdint>
#include <string>
#include <vector>

#include "msol/errors.hpp"
#include "msol/graph.hpp"
#include "msol/logic.hpp"

namespace msol {

/// Largest order on which a set quantifier is enumerated.
inline constexpr int kMaxSetQuantifierOrder = 22;

namespace eval_detail {

struct Compiled {
    Op op;
    int a = -1;  // slot of first variable / bound variable
    int b = -1;
    int lhs = -1;
    int rhs = -1;
};

class Program {
public:
    Program(const Formula& f, const Structure& s) : s_(s) {
        root_ = compile(f.node());
    }

    bool run() {
        const int n = s_.order();
        n_ = n;
        if (usesSets_ && n > 64) throw FeasibilityError("set variables need at most 64 vertices");
        if (setQuantified_ && n > kMaxSetQuantifierOrder)
            throw FeasibilityError("set quantifier over " + std::to_string(n) + " vertices is infeasible");
        adj_.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0);
        for (auto [u, v] : s_.graph.edges()) {
            adj_[static_cast<size_t>(u - 1) * n + (v - 1)] = 1;
            adj_[static_cast<size_t>(v - 1) * n + (u - 1)] = 1;
        }
        foVal_.assign(foNames_.size(), -1);
        soVal_.assign(soNames_.size(), 0);
        for (size_t i = 0; i < foNames_.size(); ++i) {
            if (foNames_[i].empty()) continue;
            auto it = s_.fo.find(foNames_[i]);
            if (it == s_.fo.end()) throw InputError("unassigned free variable " + foNames_[i]);
            foVal_[i] = it->second - 1;
        }
        for (size_t i = 0; i < soNames_.size(); ++i) {
            if (soNames_[i].empty()) continue;
            auto it = s_.so.find(soNames_[i]);
            if (it == s_.so.end()) throw InputError("unassigned free variable " + soNames_[i]);
            uint64_t m = 0;
            for (int v : it->second) m |= uint64_t{1} << (v - 1);
            soVal_[i] = m;
        }
        return eval(root_);
    }

private:
    struct Scope {
        std::string name;
        int slot;
        bool set;
    };

    int slot_for(const std::string& name, bool set) {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == name && it->set == set) return it->slot;
        auto& names = set ? soNames_ : foNames_;
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        names.push_back(name);
        return static_cast<int>(names.size()) - 1;
    }

    int compile(const Formula::Node* n) {
        Compiled c;
        c.op = n->op;
        switch (n->op) {
        case Op::True:
        case Op::False:
            break;
        case Op::Member:
            usesSets_ = true;
            c.a = slot_for(n->a, false);
            c.b = slot_for(n->b, true);
            break;
        case Op::Edge:
        case Op::Equal:
            c.a = slot_for(n->a, false);
            c.b = slot_for(n->b, false);
            break;
        case Op::And:
        case Op::Or:
            c.lhs = compile(n->lhs.get());
            c.rhs = compile(n->rhs.get());
            break;
        case Op::Not:
            c.lhs = compile(n->lhs.get());
            break;
        default: {
            const bool set = n->op == Op::ExistsSO || n->op == Op::ForallSO;
            if (set) usesSets_ = setQuantified_ = true;
            auto& names = set ? soNames_ : foNames_;
            names.emplace_back();  // bound slot, never looked up by name
            c.a = static_cast<int>(names.size()) - 1;
            scope_.push_back({n->a, c.a, set});
            c.lhs = compile(n->lhs.get());
            scope_.pop_back();
        }
        }
        code_.push_back(c);
        return static_cast<int>(code_.size()) - 1;
    }

    bool eval(int i) {
        const Compiled& c = code_[static_cast<size_t>(i)];
        switch (c.op) {
        case Op::True: return true;
        case Op::False: return false;
        case Op::Member: return (soVal_[c.b] >> foVal_[c.a]) & 1U;
        case Op::Edge: return adj_[static_cast<size_t>(foVal_[c.a]) * n_ + foVal_[c.b]] != 0;
        case Op::Equal: return foVal_[c.a] == foVal_[c.b];
        case Op::And: return eval(c.lhs) && eval(c.rhs);
        case Op::Or: return eval(c.lhs) || eval(c.rhs);
        case Op::Not: return !eval(c.lhs);
        case Op::ExistsFO:
        case Op::ForallFO: {
            const bool ex = c.op == Op::ExistsFO;
            for (int v = 0; v < n_; ++v) {
                foVal_[c.a] = v;
                if (eval(c.lhs) == ex) return ex;
            }
            return !ex;
        }
        case Op::ExistsSO:
        case Op::ForallSO: {
            const bool ex = c.op == Op::ExistsSO;
            const uint64_t total = uint64_t{1} << n_;
            for (uint64_t m = 0; m < total; ++m) {
                soVal_[c.a] = m;
                if (eval(c.lhs) == ex) return ex;
            }
            return !ex;
        }
        }
        return false;
    }

    const Structure& s_;
    int n_ = 0;
    int root_ = -1;
    bool usesSets_ = false;
    bool setQuantified_ = false;
    std::vector<Compiled> code_;
    std::vector<Scope> scope_;
    std::vector<std::string> foNames_, soNames_;
    std::vector<int> foVal_;
    std::vector<uint64_t> soVal_;
    std::vector<char> adj_;
};

} // namespace eval_detail

/// Truth of f in s. Every free variable of f must be assigned in s.
inline bool eval(const Structure& s, const Formula& f) {
    return eval_detail::Program(f, s).run();
}

inline bool eval(const Graph& g, const Formula& f) { return eval(Structure(g), f); }

} // namespace msol
