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

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msol/errors.hpp"

namespace msol {

using Edge = std::pair<int, int>;

/// Simple undirected graph on the vertex set {1..n}. Immutable once built.
class Graph {
public:
    Graph() = default;

    explicit Graph(int n) : n_(n), adj_(static_cast<size_t>(n)) {
        if (n < 0) throw InputError("graph order must be non-negative");
    }

    /// Edges may be given in any orientation and order; self-loops,
    /// duplicates and out-of-range endpoints are rejected.
    Graph(int n, std::vector<Edge> edges) : Graph(n) {
        for (auto& [u, v] : edges) {
            if (u < 1 || v < 1 || u > n || v > n)
                throw InputError("edge endpoint out of range: {" + std::to_string(u) + "," +
                                 std::to_string(v) + "}");
            if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw InputError("duplicate edge");
        edges_ = std::move(edges);
        for (auto [u, v] : edges_) {
            adj_[u - 1].push_back(v);
            adj_[v - 1].push_back(u);
        }
        for (auto& a : adj_) std::sort(a.begin(), a.end());
    }

    static Graph from_masks(std::span<const uint64_t> masks) {
        int n = static_cast<int>(masks.size());
        std::vector<Edge> es;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if ((masks[u] >> v) & 1U) es.emplace_back(u + 1, v + 1);
        return Graph(n, std::move(es));
    }

    int order() const noexcept { return n_; }
    size_t size() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_.at(static_cast<size_t>(v - 1)); }
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

    bool has_edge(int u, int v) const {
        if (u < 1 || v < 1 || u > n_ || v > n_) return false;
        const auto& a = adj_[static_cast<size_t>(u - 1)];
        return std::binary_search(a.begin(), a.end(), v);
    }

    /// 0-based adjacency bitmasks; requires n <= 64.
    std::vector<uint64_t> masks() const {
        if (n_ > 64) throw FeasibilityError("bitmask adjacency needs at most 64 vertices");
        std::vector<uint64_t> m(static_cast<size_t>(n_), 0);
        for (auto [u, v] : edges_) {
            m[u - 1] |= uint64_t{1} << (v - 1);
            m[v - 1] |= uint64_t{1} << (u - 1);
        }
        return m;
    }

    /// Image under perm, where perm[v-1] is the new label of v.
    Graph relabeled(std::span<const int> perm) const {
        std::vector<Edge> es;
        es.reserve(edges_.size());
        for (auto [u, v] : edges_) es.emplace_back(perm[u - 1], perm[v - 1]);
        return Graph(n_, std::move(es));
    }

    /// Induced subgraph; vertices[i] becomes vertex i+1.
    Graph induced(std::span<const int> vertices) const {
        std::vector<int> pos(static_cast<size_t>(n_) + 1, 0);
        for (size_t i = 0; i < vertices.size(); ++i) pos[vertices[i]] = static_cast<int>(i) + 1;
        std::vector<Edge> es;
        for (auto [u, v] : edges_)
            if (pos[u] && pos[v]) es.emplace_back(pos[u], pos[v]);
        return Graph(static_cast<int>(vertices.size()), std::move(es));
    }

    Graph with_edge(int u, int v) const {
        auto es = edges_;
        es.emplace_back(u, v);
        return Graph(n_, std::move(es));
    }

    Graph without_edge(int u, int v) const {
        if (u > v) std::swap(u, v);
        auto es = edges_;
        es.erase(std::remove(es.begin(), es.end(), Edge{u, v}), es.end());
        return Graph(n_, std::move(es));
    }

    Graph without_vertex(int w) const {
        std::vector<int> keep;
        for (int v = 1; v <= n_; ++v)
            if (v != w) keep.push_back(v);
        return induced(keep);
    }

    Graph complement() const {
        std::vector<Edge> es;
        for (int u = 1; u <= n_; ++u)
            for (int v = u + 1; v <= n_; ++v)
                if (!has_edge(u, v)) es.emplace_back(u, v);
        return Graph(n_, std::move(es));
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }
    friend bool operator<(const Graph& a, const Graph& b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        return a.edges_ < b.edges_;
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

// Named fixtures.
inline Graph complete_graph(int n) {
    std::vector<Edge> es;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) es.emplace_back(u, v);
    return Graph(n, std::move(es));
}

inline Graph path_graph(int n) {
    std::vector<Edge> es;
    for (int v = 1; v < n; ++v) es.emplace_back(v, v + 1);
    return Graph(n, std::move(es));
}

inline Graph cycle_graph(int n) {
    auto es = path_graph(n).edges();
    if (n >= 3) es.emplace_back(1, n);
    return Graph(n, std::move(es));
}

inline Graph empty_graph(int n) { return Graph(n); }

inline Graph complete_bipartite(int a, int b) {
    std::vector<Edge> es;
    for (int u = 1; u <= a; ++u)
        for (int v = a + 1; v <= a + b; ++v) es.emplace_back(u, v);
    return Graph(a + b, std::move(es));
}

inline Graph star_graph(int leaves) { return complete_bipartite(1, leaves); }

inline Graph petersen_graph() {
    std::vector<Edge> es;
    for (int i = 0; i < 5; ++i) {
        es.emplace_back(i + 1, (i + 1) % 5 + 1);           // outer cycle
        es.emplace_back(i + 6, (i + 2) % 5 + 6);           // inner pentagram
        es.emplace_back(i + 1, i + 6);                     // spokes
    }
    return Graph(10, std::move(es));
}

/// Reserved first-order variable naming the root of a rooted structure.
inline const std::string kRoot = "Root";

/// Graph plus a partial valuation of first-order and set variables.
struct Structure {
    Graph graph;
    std::map<std::string, int> fo;
    std::map<std::string, std::vector<int>> so;

    Structure() = default;
    explicit Structure(Graph g) : graph(std::move(g)) {}
    Structure(Graph g, std::map<std::string, int> f, std::map<std::string, std::vector<int>> s)
        : graph(std::move(g)), fo(std::move(f)), so(std::move(s)) {
        validate();
    }

    static Structure rooted(Graph g, int root) {
        return Structure(std::move(g), {{kRoot, root}}, {});
    }

    int order() const noexcept { return graph.order(); }
    bool is_rooted() const { return fo.contains(kRoot); }

    /// Checks ranges and namespace disjointness; normalizes set images.
    void validate() {
        const int n = graph.order();
        for (auto& [name, v] : fo) {
            if (v < 1 || v > n) throw InputError("variable " + name + " assigned outside 1..n");
            if (so.contains(name))
                throw InputError("variable " + name + " used as both first-order and set variable");
        }
        for (auto& [name, vs] : so) {
            for (int v : vs)
                if (v < 1 || v > n) throw InputError("set variable " + name + " contains vertex outside 1..n");
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        }
    }

    Structure with_fo(const std::string& name, int v) const {
        Structure s = *this;
        s.fo[name] = v;
        s.validate();
        return s;
    }

    Structure without_fo(const std::string& name) const {
        Structure s = *this;
        s.fo.erase(name);
        return s;
    }

    /// Same structure with vertices renamed by perm (perm[v-1] = new label).
    Structure relabeled(std::span<const int> perm) const {
        Structure s(graph.relabeled(perm));
        for (auto& [k, v] : fo) s.fo[k] = perm[v - 1];
        for (auto& [k, vs] : so) {
            std::vector<int> w;
            for (int v : vs) w.push_back(perm[v - 1]);
            s.so[k] = std::move(w);
        }
        s.validate();
        return s;
    }

    friend bool operator==(const Structure&, const Structure&) = default;
};

/// Finite set of variable names of each kind.
struct VarSet {
    std::set<std::string> fo;
    std::set<std::string> so;

    static VarSet of(const Structure& s) {
        VarSet x;
        for (auto& [k, _] : s.fo) x.fo.insert(k);
        for (auto& [k, _] : s.so) x.so.insert(k);
        return x;
    }

    friend bool operator==(const VarSet&, const VarSet&) = default;
};

} // namespace msol
