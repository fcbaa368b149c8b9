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

// Canonical labeling of small vertex-coloured graphs.
//
// Components and co-components are split off first; what remains is
// searched by individualization/refinement. The automorphism count is
// read off the search tree: at each node it is the number of children
// whose best leaf matches the overall best, times the count below one
// of them. Cells made entirely of twins are collapsed to one branch.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "msol/errors.hpp"
#include "msol/graph.hpp"

namespace msol {

namespace canon_detail {

inline uint64_t checked_mul(uint64_t a, uint64_t b) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    if (p > UINT64_MAX) throw FeasibilityError("automorphism count overflows 64 bits");
    return static_cast<uint64_t>(p);
}

inline uint64_t factorial(int k) {
    uint64_t f = 1;
    for (int i = 2; i <= k; ++i) f = checked_mul(f, static_cast<uint64_t>(i));
    return f;
}

struct Labeling {
    std::vector<int> order;   // order[i] = vertex placed at canonical position i
    uint64_t aut = 1;
};

// Certificate of (adj, colors) read in the given vertex order.
inline std::string certificate(const std::vector<uint64_t>& adj, const std::vector<int>& colors,
                               const std::vector<int>& order) {
    const int n = static_cast<int>(order.size());
    std::string c;
    c.push_back(static_cast<char>(n));
    for (int v : order) {
        c.push_back(static_cast<char>(colors[v] & 0xff));
        c.push_back(static_cast<char>((colors[v] >> 8) & 0xff));
    }
    unsigned char byte = 0;
    int bits = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            byte = static_cast<unsigned char>((byte << 1) | ((adj[order[i]] >> order[j]) & 1U));
            if (++bits == 8) {
                c.push_back(static_cast<char>(byte));
                byte = 0;
                bits = 0;
            }
        }
    if (bits) c.push_back(static_cast<char>(byte << (8 - bits)));
    return c;
}

class Searcher {
public:
    Searcher(const std::vector<uint64_t>& adj, const std::vector<int>& colors, uint64_t budget)
        : adj_(adj), colors_(colors), n_(static_cast<int>(adj.size())), budget_(budget) {}

    Labeling run() {
        std::vector<int> verts(static_cast<size_t>(n_));
        std::iota(verts.begin(), verts.end(), 0);
        std::stable_sort(verts.begin(), verts.end(),
                         [&](int a, int b) { return colors_[a] < colors_[b]; });
        std::vector<std::vector<int>> cells;
        for (int v : verts) {
            if (cells.empty() || colors_[cells.back().front()] != colors_[v]) cells.emplace_back();
            cells.back().push_back(v);
        }
        Node res = search(std::move(cells));
        return {std::move(res.order), res.aut};
    }

private:
    struct Node {
        std::string cert;
        std::vector<int> order;
        uint64_t aut = 1;
    };

    void refine(std::vector<std::vector<int>>& cells) const {
        for (;;) {
            std::vector<uint64_t> cmask(cells.size(), 0);
            for (size_t c = 0; c < cells.size(); ++c)
                for (int v : cells[c]) cmask[c] |= uint64_t{1} << v;
            std::vector<std::vector<int>> next;
            next.reserve(cells.size());
            for (auto& cell : cells) {
                if (cell.size() == 1) {
                    next.push_back(cell);
                    continue;
                }
                std::vector<std::pair<std::vector<int>, int>> sig;
                sig.reserve(cell.size());
                for (int v : cell) {
                    std::vector<int> s(cells.size());
                    for (size_t c = 0; c < cells.size(); ++c) s[c] = std::popcount(adj_[v] & cmask[c]);
                    sig.emplace_back(std::move(s), v);
                }
                std::sort(sig.begin(), sig.end());
                for (size_t i = 0; i < sig.size(); ++i) {
                    if (i == 0 || sig[i].first != sig[i - 1].first) next.emplace_back();
                    next.back().push_back(sig[i].second);
                }
            }
            bool stable = next.size() == cells.size();
            cells = std::move(next);
            if (stable) return;
        }
    }

    bool all_twins(const std::vector<int>& cell) const {
        for (size_t i = 0; i < cell.size(); ++i)
            for (size_t j = i + 1; j < cell.size(); ++j) {
                uint64_t bu = uint64_t{1} << cell[i], bv = uint64_t{1} << cell[j];
                if ((adj_[cell[i]] & ~bv) != (adj_[cell[j]] & ~bu)) return false;
            }
        return true;
    }

    Node search(std::vector<std::vector<int>> cells) {
        refine(cells);
        size_t target = cells.size();
        for (size_t c = 0; c < cells.size(); ++c)
            if (cells[c].size() > 1) {
                target = c;
                break;
            }
        if (target == cells.size()) {
            if (++leaves_ > budget_) throw FeasibilityError("canonical labeling search budget exceeded");
            Node leaf;
            for (auto& c : cells) leaf.order.push_back(c.front());
            leaf.cert = certificate(adj_, colors_, leaf.order);
            return leaf;
        }
        const auto& cell = cells[target];
        const bool twins = all_twins(cell);
        Node best;
        uint64_t ties = 0;
        for (size_t i = 0; i < cell.size(); ++i) {
            int v = cell[i];
            auto child = cells;
            std::vector<int> rest;
            for (int w : cell)
                if (w != v) rest.push_back(w);
            child[target] = {v};
            child.insert(child.begin() + static_cast<long>(target) + 1, rest);
            Node sub = search(std::move(child));
            if (ties == 0 || sub.cert < best.cert) {
                best = std::move(sub);
                ties = 1;
            } else if (sub.cert == best.cert) {
                ++ties;
            }
            if (twins) {
                ties = cell.size();
                break;
            }
        }
        best.aut = checked_mul(best.aut, ties);
        return best;
    }

    const std::vector<uint64_t>& adj_;
    const std::vector<int>& colors_;
    int n_;
    uint64_t budget_;
    uint64_t leaves_ = 0;
};

inline std::vector<std::vector<int>> mask_components(const std::vector<uint64_t>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> comps;
    uint64_t seen = 0;
    for (int s = 0; s < n; ++s) {
        if ((seen >> s) & 1U) continue;
        uint64_t comp = uint64_t{1} << s, frontier = comp;
        while (frontier) {
            int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            uint64_t nb = adj[v] & ~comp;
            comp |= nb;
            frontier |= nb;
        }
        seen |= comp;
        std::vector<int> c;
        for (uint64_t m = comp; m; m &= m - 1) c.push_back(std::countr_zero(m));
        comps.push_back(std::move(c));
    }
    return comps;
}

inline void induced_masks(const std::vector<uint64_t>& adj, const std::vector<int>& colors,
                          const std::vector<int>& verts, std::vector<uint64_t>& sub,
                          std::vector<int>& subColors) {
    const size_t k = verts.size();
    sub.assign(k, 0);
    subColors.assign(k, 0);
    for (size_t i = 0; i < k; ++i) {
        subColors[i] = colors[verts[i]];
        for (size_t j = 0; j < k; ++j)
            if ((adj[verts[i]] >> verts[j]) & 1U) sub[i] |= uint64_t{1} << j;
    }
}

inline Labeling canonical_labeling(const std::vector<uint64_t>& adj, const std::vector<int>& colors,
                                   uint64_t budget);

inline Labeling split_components(const std::vector<uint64_t>& adj, const std::vector<int>& colors,
                                 const std::vector<std::vector<int>>& comps, uint64_t budget) {
    struct Part {
        std::string cert;
        std::vector<int> order;
    };
    std::vector<Part> parts;
    uint64_t aut = 1;
    for (auto& comp : comps) {
        std::vector<uint64_t> sub;
        std::vector<int> subColors;
        induced_masks(adj, colors, comp, sub, subColors);
        Labeling l = canonical_labeling(sub, subColors, budget);
        aut = checked_mul(aut, l.aut);
        Part p;
        p.cert = certificate(sub, subColors, l.order);
        for (int i : l.order) p.order.push_back(comp[i]);
        parts.push_back(std::move(p));
    }
    std::sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) { return a.cert < b.cert; });
    Labeling out;
    for (size_t i = 0; i < parts.size();) {
        size_t j = i;
        while (j < parts.size() && parts[j].cert == parts[i].cert) ++j;
        aut = checked_mul(aut, factorial(static_cast<int>(j - i)));
        i = j;
    }
    for (auto& p : parts) out.order.insert(out.order.end(), p.order.begin(), p.order.end());
    out.aut = aut;
    return out;
}

inline Labeling canonical_labeling(const std::vector<uint64_t>& adj, const std::vector<int>& colors,
                                   uint64_t budget) {
    const int n = static_cast<int>(adj.size());
    if (n <= 1) return {std::vector<int>(static_cast<size_t>(n), 0), 1};
    auto comps = mask_components(adj);
    if (comps.size() > 1) return split_components(adj, colors, comps, budget);
    uint64_t all = (n == 64) ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
    std::vector<uint64_t> co(adj.size());
    for (int v = 0; v < n; ++v) co[v] = ~adj[v] & all & ~(uint64_t{1} << v);
    auto cocomps = mask_components(co);
    if (cocomps.size() > 1) return split_components(co, colors, cocomps, budget);
    return Searcher(adj, colors, budget).run();
}

} // namespace canon_detail

inline constexpr uint64_t kCanonBudget = 20'000'000;

/// Canonical labeling of a coloured graph. colors[v] must be a rank that
/// is itself isomorphism-invariant.
struct ColoredCanon {
    std::vector<int> order;  // canonical position -> original vertex (0-based)
    uint64_t aut = 1;
    std::string cert;
};

inline ColoredCanon canonicalize(const Graph& g, const std::vector<int>& colors) {
    auto adj = g.masks();
    auto l = canon_detail::canonical_labeling(adj, colors, kCanonBudget);
    ColoredCanon c;
    c.cert = canon_detail::certificate(adj, colors, l.order);
    c.order = std::move(l.order);
    c.aut = l.aut;
    return c;
}

inline std::vector<int> inverse_order(const std::vector<int>& order) {
    std::vector<int> perm(order.size());
    for (size_t i = 0; i < order.size(); ++i) perm[order[i]] = static_cast<int>(i) + 1;
    return perm;
}

/// Isomorphism-invariant, idempotent relabeling of g.
inline Graph canonical_form(const Graph& g) {
    auto c = canonicalize(g, std::vector<int>(static_cast<size_t>(g.order()), 0));
    return g.relabeled(inverse_order(c.order));
}

/// Compact string key equal for exactly the isomorphic graphs.
inline std::string graph_certificate(const Graph& g) {
    return canonicalize(g, std::vector<int>(static_cast<size_t>(g.order()), 0)).cert;
}

inline bool isomorphic(const Graph& g, const Graph& h) {
    if (g.order() != h.order() || g.size() != h.size()) return false;
    return graph_certificate(g) == graph_certificate(h);
}

inline uint64_t automorphism_count(const Graph& g) {
    if (g.order() == 0) throw InputError("automorphism count of the empty graph is not defined");
    return canonicalize(g, std::vector<int>(static_cast<size_t>(g.order()), 0)).aut;
}

namespace canon_detail {

// Per-vertex key: which variables point at or contain the vertex.
inline std::vector<std::string> vertex_keys(const Structure& s) {
    std::vector<std::string> keys(static_cast<size_t>(s.order()));
    for (auto& [name, v] : s.fo) keys[v - 1] += "f:" + name + ";";
    for (auto& [name, vs] : s.so)
        for (int v : vs) keys[v - 1] += "s:" + name + ";";
    return keys;
}

} // namespace canon_detail

struct StructureCanon {
    Structure form;
    std::string cert;
    uint64_t aut = 1;
};

/// Canonical relabeling of a structure; the certificate covers the valuation.
inline StructureCanon canonicalize(const Structure& s) {
    auto keys = canon_detail::vertex_keys(s);
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> colors;
    colors.reserve(keys.size());
    for (auto& k : keys)
        colors.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), k) - sorted.begin()));
    auto c = canonicalize(s.graph, colors);
    StructureCanon out;
    out.form = s.relabeled(inverse_order(c.order));
    out.aut = c.aut;
    out.cert = c.cert;
    for (auto& k : sorted) out.cert += "|" + k;
    return out;
}

inline bool isomorphic(const Structure& a, const Structure& b) {
    if (a.order() != b.order() || a.graph.size() != b.graph.size()) return false;
    return canonicalize(a).cert == canonicalize(b).cert;
}

} // namespace msol
