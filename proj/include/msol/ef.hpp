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

// Game equivalence, realized classes, thresholds and universal structures.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msol/algebra.hpp"
#include "msol/canon.hpp"
#include "msol/errors.hpp"
#include "msol/graph.hpp"
#include "msol/io.hpp"
#include "msol/types.hpp"

namespace msol {

/// A realized class: rank plus its least canonical representative.
struct EquivClassId {
    int m = 0;
    Structure rep;
    std::string cert;

    friend bool operator==(const EquivClassId& a, const EquivClassId& b) { return a.m == b.m && a.cert == b.cert; }
};

inline void check_same_domain(const Structure& a, const Structure& b) {
    if (!(VarSet::of(a) == VarSet::of(b))) throw InputError("structures assign different variables");
}

/// Duplicator wins the m-round game on (a, b).
inline bool equivalent_m(const Structure& a, const Structure& b, int m) {
    if (m < 0) throw InputError("rank must be nonnegative");
    check_same_domain(a, b);
    std::lock_guard lock(shared_type_store_mutex());
    auto& store = shared_type_store();
    return type_structure(store, a, m).id == type_structure(store, b, m).id;
}

inline bool equivalent_m(const Graph& a, const Graph& b, int m) {
    return equivalent_m(Structure(a), Structure(b), m);
}

struct RealizedClass {
    EquivClassId id;
    std::vector<size_t> members;  // indices into the universe
};

/// Partition of the universe by equivalent_m, ordered by representative certificate.
inline std::vector<RealizedClass> realized_classes(const std::vector<Structure>& universe, int m) {
    if (universe.empty()) return {};
    for (auto& s : universe) check_same_domain(universe.front(), s);
    std::map<int, RealizedClass> byType;
    {
        std::lock_guard lock(shared_type_store_mutex());
        auto& store = shared_type_store();
        for (size_t i = 0; i < universe.size(); ++i) {
            int t = type_structure(store, universe[i], m).id;
            auto c = canonicalize(universe[i]);
            auto [it, fresh] = byType.try_emplace(t);
            auto& rc = it->second;
            if (fresh || c.cert < rc.id.cert) rc.id = EquivClassId{m, c.form, c.cert};
            rc.members.push_back(i);
        }
    }
    std::vector<RealizedClass> out;
    for (auto& [_, rc] : byType) out.push_back(std::move(rc));
    std::sort(out.begin(), out.end(),
              [](const RealizedClass& x, const RealizedClass& y) { return x.id.cert < y.id.cert; });
    return out;
}

inline json to_json(const std::vector<RealizedClass>& classes) {
    json arr = json::array();
    for (auto& c : classes)
        arr.push_back({{"m", c.id.m}, {"representative", to_json(c.id.rep)}, {"members", c.members}});
    return arr;
}

/// All graphs on exactly n vertices up to isomorphism (brute force, n <= 6).
inline std::vector<Graph> graphs_up_to_iso(int n) {
    if (n > 6) throw FeasibilityError("brute-force graph listing is limited to 6 vertices");
    std::vector<Edge> pairs;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) pairs.emplace_back(u, v);
    std::map<std::string, Graph> seen;
    for (uint64_t mask = 0; mask < (uint64_t{1} << pairs.size()); ++mask) {
        std::vector<Edge> es;
        for (size_t i = 0; i < pairs.size(); ++i)
            if ((mask >> i) & 1) es.push_back(pairs[i]);
        Graph g(n, es);
        auto f = canonical_form(g);
        seen.try_emplace(graph_certificate(f), f);
    }
    std::vector<Graph> out;
    for (auto& [_, g] : seen) out.push_back(g);
    return out;
}

/// Supplies t_m(xi), the number of rank-m classes over variables xi.
using IndexOracle = std::function<long long(int, const VarSet&)>;

namespace ef_detail {

inline std::string fresh(const std::set<std::string>& used, const std::string& stem) {
    for (int i = 0;; ++i) {
        std::string s = stem + std::to_string(i);
        if (!used.contains(s)) return s;
    }
}

inline void valuations(const Graph& g, const std::vector<std::string>& fo, const std::vector<std::string>& so,
                       size_t i, Structure& cur, const std::function<void(const Structure&)>& visit) {
    const int n = g.order();
    if (i < fo.size()) {
        for (int v = 1; v <= n; ++v) {
            cur.fo[fo[i]] = v;
            valuations(g, fo, so, i + 1, cur, visit);
        }
        cur.fo.erase(fo[i]);
        return;
    }
    size_t j = i - fo.size();
    if (j < so.size()) {
        for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
            std::vector<int> vs;
            for (int v = 1; v <= n; ++v)
                if ((mask >> (v - 1)) & 1) vs.push_back(v);
            cur.so[so[j]] = vs;
            valuations(g, fo, so, i + 1, cur, visit);
        }
        cur.so.erase(so[j]);
        return;
    }
    visit(cur);
}

} // namespace ef_detail

/// Index oracle counting classes realized by the universe under every valuation.
inline IndexOracle realized_index_oracle(std::vector<Graph> universe) {
    return [universe = std::move(universe)](int m, const VarSet& xi) -> long long {
        std::vector<std::string> fo(xi.fo.begin(), xi.fo.end()), so(xi.so.begin(), xi.so.end());
        std::set<int> types;
        std::lock_guard lock(shared_type_store_mutex());
        auto& store = shared_type_store();
        for (auto& g : universe) {
            if (g.order() > 16) throw FeasibilityError("index oracle universe graphs must have at most 16 vertices");
            Structure cur(g);
            ef_detail::valuations(g, fo, so, 0, cur,
                                  [&](const Structure& s) { types.insert(type_structure(store, s, m).id); });
        }
        return static_cast<long long>(types.size());
    };
}

/// The copies recursion: q_0 = 0 and
/// q_{m+1}(xi) = max(q_m(xi+x) + 1, t_m(xi+X) * q_m(xi+X) + m).
inline long long q_threshold(int m, const VarSet& xi, const IndexOracle& index) {
    if (m < 0) throw InputError("rank must be nonnegative");
    if (m == 0) return 0;
    std::set<std::string> used = xi.fo;
    used.insert(xi.so.begin(), xi.so.end());
    VarSet withX = xi, withS = xi;
    withX.fo.insert(ef_detail::fresh(used, "x"));
    withS.so.insert(ef_detail::fresh(used, "X"));
    long long a = q_threshold(m - 1, withX, index) + 1;
    long long b = index(m - 1, withS) * q_threshold(m - 1, withS, index) + (m - 1);
    return std::max(a, b);
}

/// The same recursion with t left unevaluated; only ranks up to 2.
inline std::string q_threshold_symbolic(int m, const VarSet& xi) {
    if (m < 0) throw InputError("rank must be nonnegative");
    if (m <= 1) return std::to_string(m);
    if (m > 2) throw FeasibilityError("symbolic threshold is reported only for rank at most 2");
    std::set<std::string> used = xi.fo;
    used.insert(xi.so.begin(), xi.so.end());
    std::string vars;
    std::set<std::string> all = used;
    all.insert(ef_detail::fresh(used, "X"));
    for (auto& v : all) vars += (vars.empty() ? "" : ",") + v;
    return "max(2, t_1({" + vars + "}) + 1)";
}

inline IndexOracle default_index_oracle() {
    std::vector<Graph> u;
    for (int n = 0; n <= 3; ++n)
        for (auto& g : graphs_up_to_iso(n)) u.push_back(g);
    return realized_index_oracle(std::move(u));
}

/// Sound copy threshold for disjoint sums: the q recursion, at least 1.
inline long long r_threshold(int m, const VarSet& xi, const IndexOracle& index = default_index_oracle()) {
    return std::max<long long>(1, q_threshold(m, xi, index));
}

/// Least p <= cap with repeat_sum(base, part, p) equivalent to p + 1 copies.
inline std::optional<int> empirical_threshold(const Structure& base, const Structure& part, int m, int cap) {
    if (!base.is_rooted()) throw InputError("base must be rooted");
    if (part.fo.size() != 1 || !part.is_rooted() || !part.so.empty())
        throw InputError("part must assign only Root");
    std::lock_guard lock(shared_type_store_mutex());
    auto& store = shared_type_store();
    auto cur = type_structure(store, base, m);
    auto piece = type_structure(store, part, m);
    for (int p = 0; p <= cap; ++p) {
        auto next = typed_rooted_sum(store, cur, piece);
        if (next.id == cur.id) return p;
        cur = next;
    }
    return std::nullopt;
}

/// Least k with k copies of part equivalent to k + 1 copies (disjoint sums).
inline std::optional<int> copies_threshold(TypeStore& store, const TypedStructure& part, int cap) {
    if (!part.fo.empty() || !part.so.empty()) throw InputError("copies must be unassigned structures");
    auto cur = type_structure_over(store, Structure(Graph(0)), part.pattern);
    for (int k = 0; k <= cap; ++k) {
        auto next = typed_disjoint_sum(store, cur, part);
        if (next.id == cur.id) return k;
        cur = next;
    }
    return std::nullopt;
}

/// Root vertex with q copies of each representative attached by rooted sums.
inline Structure build_universal(const std::vector<Structure>& reps, int q) {
    if (q < 1) throw InputError("q must be positive");
    Structure u = Structure::rooted(Graph(1), 1);
    for (auto& r : reps) {
        if (!r.is_rooted() || r.fo.size() != 1 || !r.so.empty())
            throw InputError("universal representatives must assign only Root");
        if (!is_connected(r.graph)) throw InputError("universal representatives must be connected");
        for (int i = 0; i < q; ++i) u = rooted_sum(u, r);
    }
    return u;
}

struct UniversalType {
    TypedStructure type;  // rooted
    int copies = 0;       // rounds until adding one copy of each rep changes nothing
};

/// Type of the universal structure with enough copies that more change nothing.
inline UniversalType universal_type(TypeStore& store, const std::vector<TypedStructure>& reps, int pattern,
                                    int maxRounds = 64) {
    UniversalType u;
    u.type = type_structure_over(store, Structure::rooted(Graph(1), 1), pattern);
    for (int round = 0; round <= maxRounds; ++round) {
        auto next = u.type;
        for (auto& r : reps) next = typed_rooted_sum(store, next, r);
        if (next.id == u.type.id) {
            u.copies = std::max(round, 1);
            return u;
        }
        u.type = next;
    }
    throw FeasibilityError("universal type did not stabilize within " + std::to_string(maxRounds) + " rounds");
}

} // namespace msol
