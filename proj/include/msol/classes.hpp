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

// Membership predicates for minor-closed classes: planarity, treewidth and
// excluded minors.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include "msol/algebra.hpp"
#include "msol/canon.hpp"
#include "msol/errors.hpp"
#include "msol/graph.hpp"

namespace msol {

/// Largest order handled by the exact minor and treewidth searches.
inline constexpr int kMinorSearchOrder = 12;
inline constexpr int kTreewidthOrder = 20;

namespace classes_detail {

struct Small {
    int n = 0;
    std::vector<uint64_t> adj;

    int edges() const {
        int m = 0;
        for (auto a : adj) m += std::popcount(a);
        return m / 2;
    }
    int degree(int v) const { return std::popcount(adj[static_cast<size_t>(v)]); }
};

inline Small small_of(const Graph& g) { return Small{g.order(), g.masks()}; }

inline uint64_t drop_bit(uint64_t m, int v) {
    uint64_t low = m & ((uint64_t{1} << v) - 1);
    uint64_t high = v + 1 >= 64 ? 0 : (m >> (v + 1)) << v;
    return low | high;
}

inline Small delete_vertex(const Small& g, int v) {
    Small out;
    out.n = g.n - 1;
    for (int u = 0; u < g.n; ++u)
        if (u != v) out.adj.push_back(drop_bit(g.adj[static_cast<size_t>(u)], v));
    return out;
}

/// Merges v into u.
inline Small contract(const Small& g, int u, int v) {
    Small h = g;
    uint64_t merged = (h.adj[static_cast<size_t>(u)] | h.adj[static_cast<size_t>(v)]) &
                      ~((uint64_t{1} << u) | (uint64_t{1} << v));
    h.adj[static_cast<size_t>(u)] = merged;
    for (int w = 0; w < h.n; ++w) {
        if ((merged >> w) & 1) h.adj[static_cast<size_t>(w)] |= uint64_t{1} << u;
    }
    return delete_vertex(h, v);
}

inline std::string small_cert(const Small& g) {
    std::vector<int> colors(static_cast<size_t>(g.n), 0);
    auto l = canon_detail::canonical_labeling(g.adj, colors, kCanonBudget);
    return canon_detail::certificate(g.adj, colors, l.order);
}

/// Is h isomorphic to a spanning subgraph of g (same order)?
inline bool spanning_subgraph(const Small& g, const Small& h) {
    std::vector<int> order(static_cast<size_t>(h.n));
    for (int i = 0; i < h.n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return h.degree(a) > h.degree(b); });
    std::vector<int> image(static_cast<size_t>(h.n), -1);
    uint64_t used = 0;
    std::function<bool(size_t)> place = [&](size_t i) {
        if (i == order.size()) return true;
        int x = order[i];
        for (int y = 0; y < g.n; ++y) {
            if ((used >> y) & 1) continue;
            if (g.degree(y) < h.degree(x)) continue;
            bool ok = true;
            for (size_t j = 0; j < i && ok; ++j) {
                int px = order[j];
                if (((h.adj[static_cast<size_t>(x)] >> px) & 1) && !((g.adj[static_cast<size_t>(y)] >> image[px]) & 1))
                    ok = false;
            }
            if (!ok) continue;
            image[static_cast<size_t>(x)] = y;
            used |= uint64_t{1} << y;
            if (place(i + 1)) return true;
            used &= ~(uint64_t{1} << y);
        }
        return false;
    };
    return place(0);
}

inline std::vector<Small> small_components(const Small& g) {
    std::vector<Small> out;
    uint64_t seen = 0;
    for (int s = 0; s < g.n; ++s) {
        if ((seen >> s) & 1) continue;
        uint64_t comp = uint64_t{1} << s, frontier = comp;
        while (frontier) {
            int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            uint64_t nb = g.adj[static_cast<size_t>(v)] & ~comp;
            comp |= nb;
            frontier |= nb;
        }
        seen |= comp;
        std::vector<int> idx;
        for (int v = 0; v < g.n; ++v)
            if ((comp >> v) & 1) idx.push_back(v);
        Small c;
        c.n = static_cast<int>(idx.size());
        for (int v : idx) {
            uint64_t m = 0;
            for (size_t j = 0; j < idx.size(); ++j)
                if ((g.adj[static_cast<size_t>(v)] >> idx[j]) & 1) m |= uint64_t{1} << j;
            c.adj.push_back(m);
        }
        out.push_back(std::move(c));
    }
    return out;
}

/// Branch on vertex deletion and edge contraction until the order matches h,
/// then test for a spanning copy. States are memoized by canonical form.
class MinorSearch {
public:
    explicit MinorSearch(const Graph& h) : h_(small_of(h)), hEdges_(h_.edges()) {
        hConnected_ = small_components(h_).size() <= 1;
        minDeg3_ = h_.n > 0;
        for (int v = 0; v < h_.n; ++v)
            if (h_.degree(v) < 3) minDeg3_ = false;
    }

    bool contains(Small g) {
        if (minDeg3_) g = reduce(std::move(g));
        if (g.n < h_.n || g.edges() < hEdges_) return false;
        if (hConnected_ && h_.n > 0) {
            auto comps = small_components(g);
            if (comps.size() > 1) {
                for (auto& c : comps)
                    if (contains(c)) return true;
                return false;
            }
        }
        auto key = small_cert(g);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool found = false;
        if (g.n == h_.n) {
            found = spanning_subgraph(g, h_);
        } else {
            for (int v = 0; v < g.n && !found; ++v) found = contains(delete_vertex(g, v));
            for (int u = 0; u < g.n && !found; ++u)
                for (int v = u + 1; v < g.n && !found; ++v)
                    if ((g.adj[static_cast<size_t>(u)] >> v) & 1) found = contains(contract(g, u, v));
        }
        memo_.emplace(std::move(key), found);
        return found;
    }

private:
    // Valid when every vertex of h has degree >= 3: leaves go, degree-2
    // vertices are suppressed.
    static Small reduce(Small g) {
        for (bool changed = true; changed;) {
            changed = false;
            for (int v = 0; v < g.n; ++v) {
                int d = g.degree(v);
                if (d <= 1) {
                    g = delete_vertex(g, v);
                    changed = true;
                    break;
                }
                if (d == 2) {
                    int u = std::countr_zero(g.adj[static_cast<size_t>(v)]);
                    g = contract(g, u, v);
                    changed = true;
                    break;
                }
            }
        }
        return g;
    }

    Small h_;
    int hEdges_;
    bool hConnected_ = true;
    bool minDeg3_ = false;
    std::unordered_map<std::string, bool> memo_;
};

} // namespace classes_detail

/// Exact minor containment by branching, n <= kMinorSearchOrder.
inline bool has_minor(const Graph& g, const Graph& h) {
    if (g.order() > kMinorSearchOrder)
        throw FeasibilityError("minor search is limited to " + std::to_string(kMinorSearchOrder) + " vertices");
    classes_detail::MinorSearch search(h);
    return search.contains(classes_detail::small_of(g));
}

/// Linear-time planarity via Boost's Boyer-Myrvold test.
inline bool is_planar_boyer_myrvold(const Graph& g) {
    using BG = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    BG bg(static_cast<size_t>(g.order()));
    for (auto [u, v] : g.edges()) boost::add_edge(static_cast<size_t>(u - 1), static_cast<size_t>(v - 1), bg);
    return boost::boyer_myrvold_planarity_test(bg);
}

/// Planarity: Euler bound, then K5 / K3,3 minor search for n <= 12;
/// Boyer-Myrvold above that.
inline bool is_planar(const Graph& g) {
    const int n = g.order();
    if (n <= 4 || g.size() < 9) return true;  // a Kuratowski subdivision has >= 9 edges
    if (static_cast<int>(g.size()) > 3 * n - 6) return false;
    if (n > kMinorSearchOrder) return is_planar_boyer_myrvold(g);
    static thread_local classes_detail::MinorSearch k5(complete_graph(5));
    static thread_local classes_detail::MinorSearch k33(complete_bipartite(3, 3));
    auto s = classes_detail::small_of(g);
    return !k5.contains(s) && !k33.contains(s);
}

inline bool is_forest(const Graph& g) {
    return static_cast<int>(g.size()) + static_cast<int>(component_vertices(g).size()) == g.order();
}

namespace classes_detail {

// Series-parallel reduction: leaves go, degree-2 vertices become an edge.
inline bool reduces_to_empty(const Graph& g) {
    std::vector<std::set<int>> adj(static_cast<size_t>(g.order()));
    for (auto [u, v] : g.edges()) {
        adj[static_cast<size_t>(u - 1)].insert(v - 1);
        adj[static_cast<size_t>(v - 1)].insert(u - 1);
    }
    std::vector<int> work;
    for (int v = 0; v < g.order(); ++v) work.push_back(v);
    std::vector<char> gone(adj.size(), 0);
    int left = g.order();
    while (!work.empty()) {
        int v = work.back();
        work.pop_back();
        auto& nb = adj[static_cast<size_t>(v)];
        if (gone[static_cast<size_t>(v)] || nb.size() > 2) continue;
        std::vector<int> ns(nb.begin(), nb.end());
        for (int w : ns) adj[static_cast<size_t>(w)].erase(v);
        if (ns.size() == 2) {
            adj[static_cast<size_t>(ns[0])].insert(ns[1]);
            adj[static_cast<size_t>(ns[1])].insert(ns[0]);
        }
        nb.clear();
        gone[static_cast<size_t>(v)] = 1;
        --left;
        for (int w : ns) work.push_back(w);
    }
    return left == 0;
}

// Vertices outside S and v reachable from v through S.
inline int q_size(const Small& g, uint64_t s, int v) {
    uint64_t seen = (uint64_t{1} << v), frontier = seen, out = 0;
    while (frontier) {
        int x = std::countr_zero(frontier);
        frontier &= frontier - 1;
        uint64_t nb = g.adj[static_cast<size_t>(x)] & ~seen;
        seen |= nb;
        out |= nb & ~s;
        frontier |= nb & s;
    }
    return std::popcount(out);
}

/// Exact treewidth: TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|).
inline int treewidth_exact(const Small& g) {
    const int n = g.n;
    if (n == 0) return -1;
    std::vector<int8_t> tw(size_t{1} << n, 0);
    tw[0] = -1;
    for (uint64_t s = 1; s < (uint64_t{1} << n); ++s) {
        int best = 127;
        for (uint64_t rest = s; rest; rest &= rest - 1) {
            int v = std::countr_zero(rest);
            uint64_t without = s & ~(uint64_t{1} << v);
            int val = std::max<int>(tw[without], q_size(g, without, v));
            best = std::min(best, val);
        }
        tw[s] = static_cast<int8_t>(best);
    }
    return tw[(uint64_t{1} << n) - 1];
}

} // namespace classes_detail

/// Treewidth at most k. Exact DP over vertex subsets for n <= kTreewidthOrder;
/// k <= 2 is decided by reduction at any order.
inline bool treewidth_le(const Graph& g, int k) {
    const int n = g.order();
    if (k < 0) return n == 0;
    if (n <= k + 1) return true;
    if (static_cast<long long>(g.size()) > static_cast<long long>(k) * n - static_cast<long long>(k) * (k + 1) / 2)
        return false;
    if (k == 0) return g.size() == 0;
    if (k == 1) return is_forest(g);
    if (k == 2) return classes_detail::reduces_to_empty(g);
    if (n > kTreewidthOrder)
        throw FeasibilityError("exact treewidth is limited to " + std::to_string(kTreewidthOrder) + " vertices");
    return classes_detail::treewidth_exact(classes_detail::small_of(g)) <= k;
}

inline int treewidth(const Graph& g) {
    if (g.order() > kTreewidthOrder)
        throw FeasibilityError("exact treewidth is limited to " + std::to_string(kTreewidthOrder) + " vertices");
    return classes_detail::treewidth_exact(classes_detail::small_of(g));
}

/// A minor-closed, addable class with its growth constant when known.
struct GraphClass {
    std::string name;
    std::function<bool(const Graph&)> contains;
    std::optional<double> gamma;
    std::string gammaSource;  // "builtin", "user" or empty
    bool addable = true;
    std::string addableNote;
    bool deletionClosed = true;  // every shipped class is minor-closed

    GraphClass with_gamma(double g) const {
        if (!(g > 1.0)) throw InputError("growth constant must exceed 1");
        GraphClass c = *this;
        c.gamma = g;
        c.gammaSource = "user";
        return c;
    }

    double require_gamma() const {
        if (!gamma) throw InputError("class " + name + " has no growth constant; supply one with --gamma");
        return *gamma;
    }
};

inline GraphClass planar_class() {
    return {"planar", [](const Graph& g) { return is_planar(g); }, 27.22679, "builtin", true,
            "Kuratowski: excluded minors K5 and K3,3 are 2-connected"};
}

inline GraphClass forests_class() {
    return {"forests", [](const Graph& g) { return is_forest(g); }, 2.718281828459045, "builtin", true,
            "excluded minor K3 is 2-connected"};
}

inline GraphClass treewidth_class(int k) {
    if (k < 1) throw InputError("treewidth class needs k >= 1");
    GraphClass c{"treewidth(" + std::to_string(k) + ")", [k](const Graph& g) { return treewidth_le(g, k); },
                 std::nullopt, "", true, "excluded minors of bounded treewidth are 2-connected"};
    if (k == 1) {
        c.gamma = 2.718281828459045;
        c.gammaSource = "builtin";
    }
    return c;
}

inline GraphClass minor_free_class(int k) {
    if (k < 3) throw InputError("minor-free class needs k >= 3");
    std::function<bool(const Graph&)> f;
    if (k == 3) f = [](const Graph& g) { return is_forest(g); };
    else if (k == 4) f = [](const Graph& g) { return treewidth_le(g, 2); };
    else f = [k](const Graph& g) { return g.order() < k || !has_minor(g, complete_graph(k)); };
    GraphClass c{"minor-free(K" + std::to_string(k) + ")", f, std::nullopt, "", true, "K_k is 2-connected"};
    if (k == 3) {
        c.gamma = 2.718281828459045;
        c.gammaSource = "builtin";
    }
    return c;
}

/// Parses "planar", "forests", "treewidth(k)", "minor-free(Kk)".
inline GraphClass class_by_name(const std::string& s) {
    if (s == "planar") return planar_class();
    if (s == "forests") return forests_class();
    auto arg = [&](const std::string& prefix) -> std::optional<int> {
        if (s.rfind(prefix, 0) != 0 || s.back() != ')') return std::nullopt;
        auto body = s.substr(prefix.size(), s.size() - prefix.size() - 1);
        if (body.empty() || !std::all_of(body.begin(), body.end(), ::isdigit) || body.size() > 3) return std::nullopt;
        return std::stoi(body);
    };
    if (auto k = arg("treewidth(")) return treewidth_class(*k);
    if (auto k = arg("minor-free(K")) return minor_free_class(*k);
    throw InputError("unknown graph class '" + s + "' (planar, forests, treewidth(k), minor-free(Kk))");
}

} // namespace msol
