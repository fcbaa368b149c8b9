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

// Independent brute-force oracles used only by the test suites.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <random>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "msol/graph.hpp"

namespace oracle {

using msol::Edge;
using msol::Graph;

/// All labeled graphs on n vertices, indexed by the edge bitmask over
/// the pairs (1,2),(1,3),...,(n-1,n).
inline std::vector<Graph> all_labeled(int n) {
    std::vector<Edge> pairs;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) pairs.emplace_back(u, v);
    std::vector<Graph> out;
    const uint64_t total = uint64_t{1} << pairs.size();
    out.reserve(total);
    for (uint64_t m = 0; m < total; ++m) {
        std::vector<Edge> es;
        for (size_t i = 0; i < pairs.size(); ++i)
            if ((m >> i) & 1U) es.push_back(pairs[i]);
        out.emplace_back(n, std::move(es));
    }
    return out;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n) + 1) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Component vertex sets via union-find, ordered by minimum vertex.
inline std::vector<std::vector<int>> uf_components(const Graph& g) {
    UnionFind uf(g.order());
    for (auto [u, v] : g.edges()) uf.unite(u, v);
    std::vector<std::vector<int>> byRoot(static_cast<size_t>(g.order()) + 1);
    for (int v = 1; v <= g.order(); ++v) byRoot[uf.find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& c : byRoot)
        if (!c.empty()) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool uf_connected(const Graph& g) { return g.order() > 0 && uf_components(g).size() == 1; }

/// Number of permutations mapping g onto itself.
inline uint64_t brute_aut(const Graph& g) {
    std::vector<int> p(static_cast<size_t>(g.order()));
    std::iota(p.begin(), p.end(), 1);
    uint64_t count = 0;
    do {
        if (g.relabeled(p) == g) ++count;
    } while (std::next_permutation(p.begin(), p.end()));
    return count;
}

/// Isomorphism by trying every permutation.
inline bool brute_iso(const Graph& g, const Graph& h) {
    if (g.order() != h.order() || g.size() != h.size()) return false;
    std::vector<int> p(static_cast<size_t>(g.order()));
    std::iota(p.begin(), p.end(), 1);
    do {
        if (g.relabeled(p) == h) return true;
    } while (std::next_permutation(p.begin(), p.end()));
    return false;
}

inline Graph random_graph(int n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<Edge> es;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (coin(rng)) es.emplace_back(u, v);
    return Graph(n, std::move(es));
}

inline std::vector<int> random_perm(int n, std::mt19937_64& rng) {
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 1);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

/// Explicit board for the literal Ehrenfeucht-Fraisse game.
struct Board {
    std::vector<uint64_t> adj;
    int n = 0;
    std::vector<int> fo;  // 0-based vertices
    std::vector<uint64_t> so;
};

inline Board board_of(const msol::Structure& s) {
    Board b{s.graph.masks(), s.order(), {}, {}};
    for (auto& [_, v] : s.fo) b.fo.push_back(v - 1);
    for (auto& [_, vs] : s.so) {
        uint64_t m = 0;
        for (int v : vs) m |= uint64_t{1} << (v - 1);
        b.so.push_back(m);
    }
    return b;
}

inline bool same_atoms(const Board& a, const Board& b) {
    for (size_t i = 0; i < a.fo.size(); ++i) {
        for (size_t j = 0; j < a.fo.size(); ++j) {
            if ((a.fo[i] == a.fo[j]) != (b.fo[i] == b.fo[j])) return false;
            if (((a.adj[a.fo[i]] >> a.fo[j]) & 1) != ((b.adj[b.fo[i]] >> b.fo[j]) & 1)) return false;
        }
        for (size_t k = 0; k < a.so.size(); ++k)
            if (((a.so[k] >> a.fo[i]) & 1) != ((b.so[k] >> b.fo[i]) & 1)) return false;
    }
    return true;
}

/// Duplicator wins m rounds: every Spoiler move on either board is answered.
inline bool ef_game(Board& a, Board& b, int m) {
    if (!same_atoms(a, b)) return false;
    if (m == 0) return true;
    for (int side = 0; side < 2; ++side) {
        Board& x = side == 0 ? a : b;
        Board& y = side == 0 ? b : a;
        for (int v = 0; v < x.n; ++v) {
            x.fo.push_back(v);
            bool answered = false;
            for (int w = 0; w < y.n && !answered; ++w) {
                y.fo.push_back(w);
                answered = ef_game(a, b, m - 1);
                y.fo.pop_back();
            }
            x.fo.pop_back();
            if (!answered) return false;
        }
        for (uint64_t s = 0; s < (uint64_t{1} << x.n); ++s) {
            x.so.push_back(s);
            bool answered = false;
            for (uint64_t t = 0; t < (uint64_t{1} << y.n) && !answered; ++t) {
                y.so.push_back(t);
                answered = ef_game(a, b, m - 1);
                y.so.pop_back();
            }
            x.so.pop_back();
            if (!answered) return false;
        }
    }
    return true;
}

inline bool ef_game(const msol::Structure& a, const msol::Structure& b, int m) {
    Board x = board_of(a), y = board_of(b);
    return ef_game(x, y, m);
}

/// Agreement on formulas, computed as truth tables over a finite universe.
/// At rank k with a first-order and b set variables free, the domain is every
/// universe graph with every valuation. Rank-k formulas are Boolean
/// combinations of atoms and of "ex x. B" / "EX X. B" where B defines one block
/// of the rank k-1 partition of the extended domain; elements sharing a truth
/// row agree on every such formula.
class FormulaAgreement {
public:
    explicit FormulaAgreement(std::vector<Graph> universe) {
        for (auto& g : universe) graphs_.push_back(Board{g.masks(), g.order(), {}, {}});
    }

    /// Block of universe graph i among rank-k sentences.
    int sentence_block(size_t i, int k) {
        auto& p = partition(k, 0, 0);
        return p.block[p.index.at(Key{static_cast<int>(i), {}, {}})];
    }

private:
    using Key = std::tuple<int, std::vector<int>, std::vector<uint64_t>>;
    struct Partition {
        std::vector<Key> elems;
        std::map<Key, size_t> index;
        std::vector<int> block;
        int blocks = 0;
    };

    void enumerate(int g, int a, int b, std::vector<int>& fo, std::vector<uint64_t>& so, Partition& p) {
        const int n = graphs_[g].n;
        if (static_cast<int>(fo.size()) < a) {
            for (int v = 0; v < n; ++v) {
                fo.push_back(v);
                enumerate(g, a, b, fo, so, p);
                fo.pop_back();
            }
            return;
        }
        if (static_cast<int>(so.size()) < b) {
            for (uint64_t s = 0; s < (uint64_t{1} << n); ++s) {
                so.push_back(s);
                enumerate(g, a, b, fo, so, p);
                so.pop_back();
            }
            return;
        }
        p.index[Key{g, fo, so}] = p.elems.size();
        p.elems.emplace_back(g, fo, so);
    }

    Partition& partition(int k, int a, int b) {
        auto key = std::make_tuple(k, a, b);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        Partition p;
        for (int g = 0; g < static_cast<int>(graphs_.size()); ++g) {
            std::vector<int> fo;
            std::vector<uint64_t> so;
            enumerate(g, a, b, fo, so, p);
        }
        std::vector<std::vector<char>> rows(p.elems.size());
        for (size_t e = 0; e < p.elems.size(); ++e) {
            auto& [g, fo, so] = p.elems[e];
            const Board& B = graphs_[g];
            for (int i : fo) {
                for (int j : fo) {
                    rows[e].push_back(i == j);
                    rows[e].push_back(static_cast<char>((B.adj[i] >> j) & 1));
                }
                for (uint64_t s : so) rows[e].push_back(static_cast<char>((s >> i) & 1));
            }
        }
        if (k > 0) {
            for (int kind = 0; kind < 2; ++kind) {
                Partition& child = kind == 0 ? partition(k - 1, a + 1, b) : partition(k - 1, a, b + 1);
                std::vector<std::vector<char>> truth(p.elems.size(), std::vector<char>(child.blocks, 0));
                for (size_t e = 0; e < p.elems.size(); ++e) {
                    auto [g, fo, so] = p.elems[e];
                    const int n = graphs_[g].n;
                    if (kind == 0) {
                        for (int v = 0; v < n; ++v) {
                            auto f2 = fo;
                            f2.push_back(v);
                            truth[e][child.block[child.index.at(Key{g, f2, so})]] = 1;
                        }
                    } else {
                        for (uint64_t s = 0; s < (uint64_t{1} << n); ++s) {
                            auto s2 = so;
                            s2.push_back(s);
                            truth[e][child.block[child.index.at(Key{g, fo, s2})]] = 1;
                        }
                    }
                    rows[e].insert(rows[e].end(), truth[e].begin(), truth[e].end());
                }
            }
        }
        std::map<std::vector<char>, int> ids;
        for (auto& r : rows) {
            auto [it, _] = ids.try_emplace(r, static_cast<int>(ids.size()));
            p.block.push_back(it->second);
        }
        p.blocks = static_cast<int>(ids.size());
        return cache_.emplace(key, std::move(p)).first->second;
    }

    std::vector<Board> graphs_;
    std::map<std::tuple<int, int, int>, Partition> cache_;
};

/// Treewidth as the best elimination ordering over all permutations.
inline int brute_treewidth(const Graph& g) {
    const int n = g.order();
    if (n == 0) return -1;
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    int best = n;
    do {
        auto adj = g.masks();
        uint64_t alive = (n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1);
        int width = 0;
        for (int v : p) {
            uint64_t nb = adj[static_cast<size_t>(v)] & alive & ~(uint64_t{1} << v);
            width = std::max(width, static_cast<int>(std::popcount(nb)));
            for (int a = 0; a < n; ++a)
                if ((nb >> a) & 1) adj[static_cast<size_t>(a)] |= nb & ~(uint64_t{1} << a);
            alive &= ~(uint64_t{1} << v);
        }
        best = std::min(best, width);
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

} // namespace oracle
