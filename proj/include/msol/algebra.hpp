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

// Structure combination: disjoint sum, rooted sum, repeated rooted sum,
// component splitting and the appearance test.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "msol/canon.hpp"
#include "msol/errors.hpp"
#include "msol/graph.hpp"

namespace msol {

namespace algebra_detail {

inline Structure offset_union(const Structure& a, const Structure& b, bool skipRootOfB) {
    const int na = a.order();
    std::vector<Edge> es = a.graph.edges();
    for (auto [u, v] : b.graph.edges()) es.emplace_back(u + na, v + na);
    Structure out(Graph(na + b.order(), std::move(es)));
    out.fo = a.fo;
    for (auto& [k, v] : b.fo) {
        if (skipRootOfB && k == kRoot) continue;
        out.fo[k] = v + na;
    }
    out.so = a.so;
    for (auto& [k, vs] : b.so) {
        auto& dst = out.so[k];
        for (int v : vs) dst.push_back(v + na);
    }
    out.validate();
    return out;
}

} // namespace algebra_detail

/// a ⊕ b; b's vertices become n_a+1..n_a+n_b.
inline Structure disjoint_sum(const Structure& a, const Structure& b) {
    for (auto& [k, _] : b.fo)
        if (a.fo.contains(k)) throw InputError("disjoint sum: first-order variable " + k + " assigned in both operands");
    for (auto& [k, _] : b.so)
        if (a.fo.contains(k)) throw InputError("disjoint sum: variable " + k + " has different kinds");
    for (auto& [k, _] : a.so)
        if (b.fo.contains(k)) throw InputError("disjoint sum: variable " + k + " has different kinds");
    return algebra_detail::offset_union(a, b, false);
}

inline Graph disjoint_sum(const Graph& a, const Graph& b) {
    return disjoint_sum(Structure(a), Structure(b)).graph;
}

/// a + b: disjoint union plus the bridge between the two roots. The root
/// of the result is the root of a, so the operation is not commutative.
inline Structure rooted_sum(const Structure& a, const Structure& b) {
    if (!a.is_rooted() || !b.is_rooted()) throw InputError("rooted sum needs two rooted structures");
    for (auto& [k, _] : b.fo)
        if (k != kRoot && a.fo.contains(k))
            throw InputError("rooted sum: first-order variable " + k + " shared besides Root");
    for (auto& [k, _] : b.so)
        if (a.fo.contains(k)) throw InputError("rooted sum: variable " + k + " has different kinds");
    for (auto& [k, _] : a.so)
        if (b.fo.contains(k)) throw InputError("rooted sum: variable " + k + " has different kinds");
    Structure u = algebra_detail::offset_union(a, b, true);
    int ra = a.fo.at(kRoot);
    int rb = b.fo.at(kRoot) + a.order();
    Structure out(u.graph.with_edge(ra, rb), std::move(u.fo), std::move(u.so));
    return out;
}

/// a + c·b, folded left: a + 0b = a, a + (c+1)b = (a + cb) + b.
inline Structure repeat_sum(const Structure& a, const Structure& b, int c) {
    if (c < 0) throw InputError("repeat count must be non-negative");
    if (b.fo.size() != 1 || !b.is_rooted())
        throw InputError("repeated part must assign exactly the Root variable");
    Structure acc = a;
    for (int i = 0; i < c; ++i) acc = rooted_sum(acc, b);
    return acc;
}

/// Vertex sets of the connected components, each sorted, ordered by
/// minimum vertex.
inline std::vector<std::vector<int>> component_vertices(const Graph& g) {
    const int n = g.order();
    std::vector<int> comp(static_cast<size_t>(n) + 1, -1);
    std::vector<std::vector<int>> out;
    for (int s = 1; s <= n; ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::deque<int> q{s};
        comp[s] = id;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            out.back().push_back(v);
            for (int w : g.neighbors(v))
                if (comp[w] < 0) {
                    comp[w] = id;
                    q.push_back(w);
                }
        }
        std::sort(out.back().begin(), out.back().end());
    }
    return out;
}

/// Components as graphs, relabeled 1..k in increasing original order.
inline std::vector<Graph> components(const Graph& g) {
    std::vector<Graph> out;
    for (auto& vs : component_vertices(g)) out.push_back(g.induced(vs));
    return out;
}

/// The empty graph counts as not connected.
inline bool is_connected(const Graph& g) {
    return g.order() > 0 && component_vertices(g).size() == 1;
}

/// Does `rooted` appear in `host`: an induced copy whose only edge to the
/// rest of the host is a single edge at the copy of the root?
inline bool appears(const Structure& rooted, const Graph& host) {
    if (!rooted.is_rooted() || rooted.fo.size() != 1 || !rooted.so.empty())
        throw InputError("appearance needs a structure assigning only Root");
    const int root = rooted.fo.at(kRoot);

    std::vector<int> rootSide;
    std::multiset<std::string> rest;
    for (auto& vs : component_vertices(rooted.graph)) {
        if (std::binary_search(vs.begin(), vs.end(), root)) {
            rootSide = vs;
        } else {
            rest.insert(graph_certificate(rooted.graph.induced(vs)));
        }
    }
    const int want = static_cast<int>(rootSide.size());
    int rootPos = static_cast<int>(std::find(rootSide.begin(), rootSide.end(), root) - rootSide.begin()) + 1;
    const std::string rootCert =
        canonicalize(Structure::rooted(rooted.graph.induced(rootSide), rootPos)).cert;

    const int n = host.order();
    std::vector<std::vector<int>> hostComps;
    std::vector<int> compOf(static_cast<size_t>(n) + 1, -1);
    std::vector<std::string> compCert;
    if (!rest.empty()) {
        hostComps = component_vertices(host);
        for (size_t i = 0; i < hostComps.size(); ++i)
            for (int v : hostComps[i]) compOf[v] = static_cast<int>(i);
        for (auto& vs : hostComps) compCert.push_back(graph_certificate(host.induced(vs)));
    }

    std::vector<int> mark(static_cast<size_t>(n) + 1, 0);
    int stamp = 0;
    for (int r = 1; r <= n; ++r) {
        for (int w : host.neighbors(r)) {
            // Side of r once the edge rw is cut; w must not be reachable.
            ++stamp;
            std::vector<int> side{r};
            mark[r] = stamp;
            bool bridge = true;
            for (size_t i = 0; i < side.size() && bridge; ++i) {
                int v = side[i];
                for (int x : host.neighbors(v)) {
                    if (v == r && x == w) continue;
                    if (x == w) {
                        bridge = false;
                        break;
                    }
                    if (mark[x] != stamp) {
                        mark[x] = stamp;
                        side.push_back(x);
                    }
                }
                if (static_cast<int>(side.size()) > want) break;
            }
            if (!bridge || static_cast<int>(side.size()) != want) continue;
            std::sort(side.begin(), side.end());
            int rp = static_cast<int>(std::find(side.begin(), side.end(), r) - side.begin()) + 1;
            if (canonicalize(Structure::rooted(host.induced(side), rp)).cert != rootCert) continue;
            if (rest.empty()) return true;
            std::multiset<std::string> avail;
            for (size_t i = 0; i < hostComps.size(); ++i)
                if (static_cast<int>(i) != compOf[r]) avail.insert(compCert[i]);
            bool ok = true;
            for (auto it = rest.begin(); it != rest.end() && ok;) {
                auto range = rest.equal_range(*it);
                auto need = static_cast<size_t>(std::distance(range.first, range.second));
                ok = avail.count(*it) >= need;
                it = range.second;
            }
            if (ok) return true;
        }
    }
    return false;
}

} // namespace msol
