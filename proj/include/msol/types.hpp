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

// Interned rank-L Hintikka types. A type at level L records the atomic
// facts about the assigned variables and the sets of level L-1 types reached
// by one vertex move or one set move. Two structures have equal type ids at
// level L exactly when Duplicator wins the L-round game on them. Types can
// also be taken over a smaller move pattern (see PatternTable), which is
// enough to evaluate formulas whose quantifiers follow that pattern.
//
// Besides brute-force typing of explicit structures the store composes types
// directly: disjoint sums, adding an edge between named vertices and
// forgetting a variable. These let sums of many copies be typed without
// building them.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <iterator>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msol/errors.hpp"
#include "msol/eval.hpp"
#include "msol/graph.hpp"
#include "msol/logic.hpp"

namespace msol {

struct TypeNode {
    int pattern = 0;  // id of the move pattern this type is taken over
    int level = 0;    // longest word of the pattern
    int nfo = 0;
    int nso = 0;
    std::vector<uint8_t> eq;    // nfo x nfo
    std::vector<uint8_t> edge;  // nfo x nfo
    std::vector<uint8_t> mem;   // nfo x nso
    std::vector<int> vch;       // vertex-move children, sorted
    std::vector<int> sch;       // set-move children, sorted

    bool is_eq(int i, int j) const { return eq[static_cast<size_t>(i * nfo + j)] != 0; }
    bool is_edge(int i, int j) const { return edge[static_cast<size_t>(i * nfo + j)] != 0; }
    bool is_mem(int i, int k) const { return mem[static_cast<size_t>(i * nso + k)] != 0; }
};

/// FO position p of a sum comes from side `first` (0 left, 1 right) at index `second`.
using FoLayout = std::vector<std::pair<int, int>>;

/// A move pattern is a set of words over F (vertex move) and S (set move),
/// closed under taking subsequences. A type over a pattern only follows move
/// sequences in it; the full rank-L type uses every word of length <= L.
/// Closure under subsequences is what lets a type over P be restricted to any
/// closed subset of P, which the sum needs for the side that does not move.
class PatternTable {
public:
    int intern(std::vector<std::string> words) {
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        auto [it, fresh] = index_.try_emplace(words, static_cast<int>(sets_.size()));
        if (fresh) sets_.push_back(std::move(words));
        return it->second;
    }

    const std::vector<std::string>& words(int p) const { return sets_.at(static_cast<size_t>(p)); }

    int full(int level) {
        std::vector<std::string> ws{""};
        for (size_t i = 0; i < ws.size(); ++i)
            if (static_cast<int>(ws[i].size()) < level) {
                ws.push_back(ws[i] + "F");
                ws.push_back(ws[i] + "S");
            }
        return intern(std::move(ws));
    }

    /// Subsequence closure of the quantifier-kind words of f.
    int of_formula(const Formula& f) {
        std::vector<std::string> leaves;
        collect(f.node(), "", leaves);
        std::vector<std::string> out;
        for (auto& w : leaves) {
            if (w.size() > 20) throw FeasibilityError("formula nests too many quantifiers");
            for (uint32_t mask = 0; mask < (uint32_t{1} << w.size()); ++mask) {
                std::string sub;
                for (size_t i = 0; i < w.size(); ++i)
                    if ((mask >> i) & 1) sub += w[i];
                out.push_back(std::move(sub));
            }
        }
        return intern(std::move(out));
    }

    bool has(int p, char c) const {
        for (auto& w : words(p))
            if (!w.empty() && w[0] == c) return true;
        return false;
    }

    int derivative(int p, char c) {
        std::vector<std::string> out;
        for (auto& w : words(p))
            if (!w.empty() && w[0] == c) out.push_back(w.substr(1));
        return intern(std::move(out));
    }

    bool subset(int p, int q) const {
        auto& a = words(p);
        auto& b = words(q);
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    }

    int meet(int p, int q) {
        std::vector<std::string> out;
        auto& a = words(p);
        auto& b = words(q);
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return intern(std::move(out));
    }

    int level(int p) const {
        int l = 0;
        for (auto& w : words(p)) l = std::max(l, static_cast<int>(w.size()));
        return l;
    }

    /// Pattern with no free moves after any set move: sets then only matter on named vertices.
    bool vertex_free(int p) const {
        for (auto& w : words(p))
            if (w.find('F') != std::string::npos) return false;
        return true;
    }

private:
    static void collect(const Formula::Node* n, const std::string& path, std::vector<std::string>& out) {
        switch (n->op) {
        case Op::And:
        case Op::Or:
            collect(n->lhs.get(), path, out);
            collect(n->rhs.get(), path, out);
            return;
        case Op::Not:
            collect(n->lhs.get(), path, out);
            return;
        case Op::ExistsFO:
        case Op::ForallFO:
            collect(n->lhs.get(), path + "F", out);
            return;
        case Op::ExistsSO:
        case Op::ForallSO:
            collect(n->lhs.get(), path + "S", out);
            return;
        default:
            out.push_back(path);
        }
    }

    std::vector<std::vector<std::string>> sets_;
    std::map<std::vector<std::string>, int> index_;
};

class TypeStore {
public:
    PatternTable patterns;

    int intern(TypeNode t) {
        std::sort(t.vch.begin(), t.vch.end());
        t.vch.erase(std::unique(t.vch.begin(), t.vch.end()), t.vch.end());
        std::sort(t.sch.begin(), t.sch.end());
        t.sch.erase(std::unique(t.sch.begin(), t.sch.end()), t.sch.end());
        t.level = patterns.level(t.pattern);
        std::string key;
        put(key, t.pattern);
        put(key, t.nfo);
        put(key, t.nso);
        key.append(t.eq.begin(), t.eq.end());
        key.append(t.edge.begin(), t.edge.end());
        key.append(t.mem.begin(), t.mem.end());
        put(key, static_cast<int>(t.vch.size()));
        for (int c : t.vch) put(key, c);
        for (int c : t.sch) put(key, c);
        auto [it, fresh] = index_.try_emplace(std::move(key), static_cast<int>(nodes_.size()));
        if (fresh) nodes_.push_back(std::move(t));
        return it->second;
    }

    const TypeNode& node(int id) const { return nodes_.at(static_cast<size_t>(id)); }
    size_t size() const noexcept { return nodes_.size(); }

    /// Type of (g, fo, so) over a pattern; fo holds 1-based vertices.
    int type_of(const Graph& g, const std::vector<int>& fo, const std::vector<std::vector<int>>& so, int pattern) {
        const int n = g.order();
        if (n > 64) throw FeasibilityError("typing needs at most 64 vertices");
        if (needs_all_subsets(pattern) && n > kMaxSetQuantifierOrder)
            throw FeasibilityError("typing with set moves over " + std::to_string(n) + " vertices is infeasible");
        Board b{g.masks(), n, {}, {}};
        for (int v : fo) b.fo.push_back(v - 1);
        for (auto& s : so) {
            uint64_t m = 0;
            for (int v : s) m |= uint64_t{1} << (v - 1);
            b.so.push_back(m);
        }
        return type_rec(b, pattern);
    }

    /// The same type over a smaller closed pattern.
    int restrict(int t, int pattern) {
        const int from = node(t).pattern;
        if (from == pattern) return t;
        auto key = std::make_pair(t, pattern);
        if (auto it = restrictMemo_.find(key); it != restrictMemo_.end()) return it->second;
        if (!patterns.subset(pattern, from)) throw InputError("cannot restrict a type to a larger pattern");
        TypeNode src = node(t);
        TypeNode out = atoms_only(src);
        out.pattern = pattern;
        if (patterns.has(pattern, 'F')) {
            int d = patterns.derivative(pattern, 'F');
            for (int c : src.vch) out.vch.push_back(restrict(c, d));
        }
        if (patterns.has(pattern, 'S')) {
            int d = patterns.derivative(pattern, 'S');
            for (int c : src.sch) out.sch.push_back(restrict(c, d));
        }
        int id = intern(std::move(out));
        restrictMemo_[key] = id;
        return id;
    }

    /// The full type one level lower.
    int proj(int t) { return proj_to(t, node(t).level - 1); }

    int proj_to(int t, int level) {
        if (level < 0) throw InputError("cannot project below level 0");
        return restrict(t, patterns.full(level));
    }

    /// Type of the disjoint union. Both sides carry the same pattern and the
    /// same set variables, paired by position; a set's value on the union is
    /// the union of its sides.
    int sum(int a, int b, const FoLayout& layout) {
        std::string key;
        put(key, a);
        put(key, b);
        for (auto [s, i] : layout) {
            put(key, s);
            put(key, i);
        }
        if (auto it = sumMemo_.find(key); it != sumMemo_.end()) return it->second;

        TypeNode A = node(a), B = node(b);
        if (A.pattern != B.pattern) throw InputError("sum of types over different patterns");
        if (A.nso != B.nso) throw InputError("sum of types with different set variables");
        if (static_cast<int>(layout.size()) != A.nfo + B.nfo) throw InputError("sum layout does not cover both sides");

        TypeNode t;
        t.pattern = A.pattern;
        t.nfo = static_cast<int>(layout.size());
        t.nso = A.nso;
        t.eq.assign(static_cast<size_t>(t.nfo * t.nfo), 0);
        t.edge.assign(static_cast<size_t>(t.nfo * t.nfo), 0);
        t.mem.assign(static_cast<size_t>(t.nfo * t.nso), 0);
        for (int p = 0; p < t.nfo; ++p) {
            auto [sp, ip] = layout[static_cast<size_t>(p)];
            const TypeNode& side = sp == 0 ? A : B;
            for (int q = 0; q < t.nfo; ++q) {
                auto [sq, iq] = layout[static_cast<size_t>(q)];
                if (sp != sq) continue;
                t.eq[static_cast<size_t>(p * t.nfo + q)] = side.is_eq(ip, iq);
                t.edge[static_cast<size_t>(p * t.nfo + q)] = side.is_edge(ip, iq);
            }
            for (int k = 0; k < t.nso; ++k) t.mem[static_cast<size_t>(p * t.nso + k)] = side.is_mem(ip, k);
        }
        if (patterns.has(t.pattern, 'F')) {
            int d = patterns.derivative(t.pattern, 'F');
            int pa = restrict(a, d), pb = restrict(b, d);
            FoLayout left = layout, right = layout;
            left.emplace_back(0, A.nfo);
            right.emplace_back(1, B.nfo);
            for (int c : A.vch) t.vch.push_back(sum(c, pb, left));
            for (int c : B.vch) t.vch.push_back(sum(pa, c, right));
        }
        for (int ca : A.sch)
            for (int cb : B.sch) t.sch.push_back(sum(ca, cb, layout));
        int id = intern(std::move(t));
        sumMemo_.emplace(std::move(key), id);
        return id;
    }

    /// Type after adding the edge between the vertices at FO positions i and j.
    int add_edge(int t, int i, int j) {
        std::string key;
        put(key, t);
        put(key, i);
        put(key, j);
        if (auto it = edgeMemo_.find(key); it != edgeMemo_.end()) return it->second;
        TypeNode src = node(t);
        if (src.is_eq(i, j)) throw InputError("cannot add a loop");
        TypeNode out = src;
        out.vch.clear();
        out.sch.clear();
        for (int p = 0; p < src.nfo; ++p)
            for (int q = 0; q < src.nfo; ++q)
                if ((src.is_eq(p, i) && src.is_eq(q, j)) || (src.is_eq(p, j) && src.is_eq(q, i)))
                    out.edge[static_cast<size_t>(p * src.nfo + q)] = 1;
        for (int c : src.vch) out.vch.push_back(add_edge(c, i, j));
        for (int c : src.sch) out.sch.push_back(add_edge(c, i, j));
        int id = intern(std::move(out));
        edgeMemo_.emplace(std::move(key), id);
        return id;
    }

    /// Type after forgetting the FO variable at position i.
    int drop_fo(int t, int i) {
        std::string key;
        put(key, t);
        put(key, i);
        if (auto it = dropMemo_.find(key); it != dropMemo_.end()) return it->second;
        TypeNode src = node(t);
        TypeNode out;
        out.pattern = src.pattern;
        out.nfo = src.nfo - 1;
        out.nso = src.nso;
        for (int p = 0; p < src.nfo; ++p) {
            if (p == i) continue;
            for (int q = 0; q < src.nfo; ++q) {
                if (q == i) continue;
                out.eq.push_back(src.is_eq(p, q));
                out.edge.push_back(src.is_edge(p, q));
            }
            for (int k = 0; k < src.nso; ++k) out.mem.push_back(src.is_mem(p, k));
        }
        for (int c : src.vch) out.vch.push_back(drop_fo(c, i));
        for (int c : src.sch) out.sch.push_back(drop_fo(c, i));
        int id = intern(std::move(out));
        dropMemo_.emplace(std::move(key), id);
        return id;
    }

    /// Truth of f on any structure of type t. Variables map names to positions.
    bool eval(int t, const Formula& f, std::map<std::string, int>& fo, std::map<std::string, int>& so) const {
        const TypeNode& T = node(t);
        auto pos = [](const std::map<std::string, int>& env, const std::string& v) {
            auto it = env.find(v);
            if (it == env.end()) throw InputError("unassigned free variable " + v);
            return it->second;
        };
        switch (f.op()) {
        case Op::True:
            return true;
        case Op::False:
            return false;
        case Op::Member:
            return T.is_mem(pos(fo, f.var()), pos(so, f.var2()));
        case Op::Edge:
            return T.is_edge(pos(fo, f.var()), pos(fo, f.var2()));
        case Op::Equal:
            return T.is_eq(pos(fo, f.var()), pos(fo, f.var2()));
        case Op::And:
            return eval(t, f.lhs(), fo, so) && eval(t, f.rhs(), fo, so);
        case Op::Or:
            return eval(t, f.lhs(), fo, so) || eval(t, f.rhs(), fo, so);
        case Op::Not:
            return !eval(t, f.body(), fo, so);
        default:
            break;
        }
        const bool fov = f.op() == Op::ExistsFO || f.op() == Op::ForallFO;
        const bool ex = f.op() == Op::ExistsFO || f.op() == Op::ExistsSO;
        if (!patterns.has(T.pattern, fov ? 'F' : 'S')) throw InputError("formula leaves the type's move pattern");
        auto& env = fov ? fo : so;
        auto saved = env.find(f.var()) == env.end() ? -1 : env[f.var()];
        env[f.var()] = fov ? T.nfo : T.nso;
        bool result = !ex;
        for (int c : fov ? T.vch : T.sch) {
            if (eval(c, f.body(), fo, so) == ex) {
                result = ex;
                break;
            }
        }
        if (saved < 0) env.erase(f.var());
        else env[f.var()] = saved;
        return result;
    }

private:
    struct Board {
        std::vector<uint64_t> adj;
        int n;
        std::vector<int> fo;
        std::vector<uint64_t> so;
    };

    static void put(std::string& key, int v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); }

    static TypeNode atoms_only(const TypeNode& t) {
        TypeNode out;
        out.nfo = t.nfo;
        out.nso = t.nso;
        out.eq = t.eq;
        out.edge = t.edge;
        out.mem = t.mem;
        return out;
    }

    bool needs_all_subsets(int p) {
        if (patterns.has(p, 'S') && !patterns.vertex_free(patterns.derivative(p, 'S'))) return true;
        if (patterns.has(p, 'F') && needs_all_subsets(patterns.derivative(p, 'F'))) return true;
        return patterns.has(p, 'S') && needs_all_subsets(patterns.derivative(p, 'S'));
    }

    int type_rec(Board& b, int pattern) {
        TypeNode t;
        t.pattern = pattern;
        t.nfo = static_cast<int>(b.fo.size());
        t.nso = static_cast<int>(b.so.size());
        uint64_t assigned = 0;
        for (int p : b.fo) {
            assigned |= uint64_t{1} << p;
            for (int q : b.fo) {
                t.eq.push_back(p == q);
                t.edge.push_back((b.adj[static_cast<size_t>(p)] >> q) & 1);
            }
            for (uint64_t s : b.so) t.mem.push_back((s >> p) & 1);
        }
        if (patterns.has(pattern, 'F')) {
            int d = patterns.derivative(pattern, 'F');
            for (int v = 0; v < b.n; ++v) {
                b.fo.push_back(v);
                t.vch.push_back(type_rec(b, d));
                b.fo.pop_back();
            }
        }
        if (patterns.has(pattern, 'S')) {
            int d = patterns.derivative(pattern, 'S');
            // Without later vertex moves only membership of named vertices is visible.
            const uint64_t range =
                patterns.vertex_free(d) ? assigned : (b.n == 64 ? ~uint64_t{0} : (uint64_t{1} << b.n) - 1);
            uint64_t s = 0;
            do {
                b.so.push_back(s);
                t.sch.push_back(type_rec(b, d));
                b.so.pop_back();
                s = (s - range) & range;
            } while (s != 0);
        }
        return intern(std::move(t));
    }

    std::deque<TypeNode> nodes_;
    std::unordered_map<std::string, int> index_;
    std::map<std::pair<int, int>, int> restrictMemo_;
    std::unordered_map<std::string, int> sumMemo_, edgeMemo_, dropMemo_;
};

/// A type id together with the variable names its positions stand for.
struct TypedStructure {
    int id = -1;
    int pattern = 0;
    std::vector<std::string> fo;  // sorted
    std::vector<std::string> so;  // sorted

    friend bool operator==(const TypedStructure&, const TypedStructure&) = default;
};

inline TypedStructure type_structure_over(TypeStore& store, const Structure& s, int pattern) {
    TypedStructure t;
    t.pattern = pattern;
    std::vector<int> fo;
    std::vector<std::vector<int>> so;
    for (auto& [k, v] : s.fo) {
        t.fo.push_back(k);
        fo.push_back(v);
    }
    for (auto& [k, vs] : s.so) {
        t.so.push_back(k);
        so.push_back(vs);
    }
    t.id = store.type_of(s.graph, fo, so, pattern);
    return t;
}

/// Full rank-`level` type.
inline TypedStructure type_structure(TypeStore& store, const Structure& s, int level) {
    return type_structure_over(store, s, store.patterns.full(level));
}

inline TypedStructure type_graph(TypeStore& store, const Graph& g, int level) {
    return type_structure(store, Structure(g), level);
}

inline TypedStructure restrict_to(TypeStore& store, TypedStructure t, int pattern) {
    t.id = store.restrict(t.id, pattern);
    t.pattern = pattern;
    return t;
}

inline TypedStructure project(TypeStore& store, const TypedStructure& t, int level) {
    return restrict_to(store, t, store.patterns.full(level));
}

namespace types_detail {

inline TypedStructure named_sum(TypeStore& store, TypedStructure a, TypedStructure b, std::vector<std::string>& names) {
    if (a.so != b.so) throw InputError("typed sum needs the same set variables on both sides");
    if (a.pattern != b.pattern) {
        const int p = store.patterns.meet(a.pattern, b.pattern);
        a = restrict_to(store, a, p);
        b = restrict_to(store, b, p);
    }
    std::vector<std::pair<std::string, std::pair<int, int>>> merged;
    for (size_t i = 0; i < a.fo.size(); ++i) merged.push_back({a.fo[i], {0, static_cast<int>(i)}});
    for (size_t i = 0; i < b.fo.size(); ++i) merged.push_back({b.fo[i], {1, static_cast<int>(i)}});
    std::sort(merged.begin(), merged.end());
    FoLayout layout;
    names.clear();
    for (size_t i = 0; i < merged.size(); ++i) {
        if (i > 0 && merged[i].first == merged[i - 1].first)
            throw InputError("variable " + merged[i].first + " assigned on both sides of a sum");
        names.push_back(merged[i].first);
        layout.push_back(merged[i].second);
    }
    TypedStructure out;
    out.pattern = a.pattern;
    out.so = a.so;
    out.id = store.sum(a.id, b.id, layout);
    return out;
}

inline int index_of(const std::vector<std::string>& names, const std::string& v) {
    auto it = std::find(names.begin(), names.end(), v);
    if (it == names.end()) throw InputError("variable " + v + " not assigned");
    return static_cast<int>(it - names.begin());
}

} // namespace types_detail

inline TypedStructure typed_disjoint_sum(TypeStore& store, const TypedStructure& a, const TypedStructure& b) {
    std::vector<std::string> names;
    auto out = types_detail::named_sum(store, a, b, names);
    out.fo = std::move(names);
    return out;
}

inline TypedStructure typed_forget(TypeStore& store, TypedStructure t, const std::string& name) {
    int i = types_detail::index_of(t.fo, name);
    t.id = store.drop_fo(t.id, i);
    t.fo.erase(t.fo.begin() + i);
    return t;
}

/// Rooted sum on types: root from the left, bridge between the roots.
inline TypedStructure typed_rooted_sum(TypeStore& store, const TypedStructure& a, TypedStructure b) {
    static const std::string tmp = "\x01root";
    types_detail::index_of(a.fo, kRoot);
    b.fo[static_cast<size_t>(types_detail::index_of(b.fo, kRoot))] = tmp;
    std::sort(b.fo.begin(), b.fo.end());
    std::vector<std::string> names;
    auto out = types_detail::named_sum(store, a, b, names);
    int r = types_detail::index_of(names, kRoot), s = types_detail::index_of(names, tmp);
    out.id = store.drop_fo(store.add_edge(out.id, r, s), s);
    names.erase(names.begin() + s);
    out.fo = std::move(names);
    return out;
}

/// Evaluates f on a typed structure; free variables must be among its names
/// and the formula's moves within its pattern.
inline bool typed_eval(TypeStore& store, const TypedStructure& t, const Formula& f) {
    if (!store.patterns.subset(store.patterns.of_formula(f), t.pattern))
        throw InputError("formula needs moves beyond the type's pattern");
    std::map<std::string, int> fo, so;
    for (size_t i = 0; i < t.fo.size(); ++i) fo[t.fo[i]] = static_cast<int>(i);
    for (size_t i = 0; i < t.so.size(); ++i) so[t.so[i]] = static_cast<int>(i);
    return store.eval(t.id, f, fo, so);
}

/// Process-wide store used by the convenience entry points.
inline TypeStore& shared_type_store() {
    static TypeStore store;
    return store;
}

inline std::mutex& shared_type_store_mutex() {
    static std::mutex m;
    return m;
}

} // namespace msol
