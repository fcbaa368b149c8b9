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

// Unlabeled census of connected class members with automorphism counts.
// Small orders come from filtering every labeled graph; larger orders grow
// each connected member by one vertex and keep a child only when the new
// vertex lies in the orbit of the child's canonical deletion vertex.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "msol/algebra.hpp"
#include "msol/canon.hpp"
#include "msol/classes.hpp"
#include "msol/errors.hpp"
#include "msol/graph.hpp"
#include "msol/io.hpp"

namespace msol {

inline constexpr int kCensusVersion = 1;
inline constexpr int kBruteForceCensusOrder = 6;

struct CensusEntry {
    Graph graph;  // canonical form
    uint64_t aut = 1;
};

struct Census {
    std::string classRef;
    int maxN = 0;
    std::vector<uint64_t> labeledConnectedCounts;                // index n, entry 0 unused
    std::vector<std::vector<CensusEntry>> unlabeledConnectedReps;  // index n
};

inline int census_order_limit(const GraphClass& c) { return c.name == "forests" ? 12 : 10; }

namespace census_detail {

inline bool mask_connected(const std::vector<uint64_t>& adj) {
    const int n = static_cast<int>(adj.size());
    if (n == 0) return false;
    uint64_t seen = 1, frontier = 1;
    while (frontier) {
        int v = std::countr_zero(frontier);
        frontier &= frontier - 1;
        uint64_t nb = adj[static_cast<size_t>(v)] & ~seen;
        seen |= nb;
        frontier |= nb;
    }
    return seen == (n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1);
}

inline void sort_entries(std::vector<CensusEntry>& v) {
    std::sort(v.begin(), v.end(), [](const CensusEntry& a, const CensusEntry& b) {
        if (a.graph.size() != b.graph.size()) return a.graph.size() < b.graph.size();
        return a.graph.edges() < b.graph.edges();
    });
}

inline std::vector<CensusEntry> brute_force(const GraphClass& c, int n) {
    std::vector<Edge> pairs;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) pairs.emplace_back(u, v);
    std::map<std::string, CensusEntry> seen;
    for (uint64_t mask = 0; mask < (uint64_t{1} << pairs.size()); ++mask) {
        std::vector<uint64_t> adj(static_cast<size_t>(n), 0);
        std::vector<Edge> es;
        for (size_t i = 0; i < pairs.size(); ++i)
            if ((mask >> i) & 1) {
                auto [u, v] = pairs[i];
                adj[static_cast<size_t>(u - 1)] |= uint64_t{1} << (v - 1);
                adj[static_cast<size_t>(v - 1)] |= uint64_t{1} << (u - 1);
                es.push_back(pairs[i]);
            }
        if (!mask_connected(adj)) continue;
        Graph g(n, std::move(es));
        auto canon = canonicalize(g, std::vector<int>(static_cast<size_t>(n), 0));
        if (seen.contains(canon.cert)) continue;
        if (!c.contains(g)) {
            seen.emplace(canon.cert, CensusEntry{Graph(0), 0});
            continue;
        }
        seen.emplace(canon.cert, CensusEntry{g.relabeled(inverse_order(canon.order)), canon.aut});
    }
    std::vector<CensusEntry> out;
    for (auto& [_, e] : seen)
        if (e.aut > 0) out.push_back(std::move(e));
    return out;
}

inline std::string individualized_cert(const Graph& g, int v) {
    std::vector<int> colors(static_cast<size_t>(g.order()), 0);
    colors[static_cast<size_t>(v)] = 1;
    return canonicalize(g, colors).cert;
}

// The child is kept when its new vertex (last) is equivalent to the
// non-cut vertex placed last by the canonical labeling.
inline bool canonical_child(const Graph& g, const ColoredCanon& canon) {
    const int n = g.order();
    auto adj = g.masks();
    int chosen = -1;
    for (int pos = n - 1; pos >= 0 && chosen < 0; --pos) {
        int v = canon.order[static_cast<size_t>(pos)];
        std::vector<uint64_t> rest;
        for (int u = 0; u < n; ++u)
            if (u != v) rest.push_back(classes_detail::drop_bit(adj[static_cast<size_t>(u)], v));
        if (mask_connected(rest)) chosen = v;
    }
    if (chosen == n - 1) return true;
    return individualized_cert(g, chosen) == individualized_cert(g, n - 1);
}

inline std::vector<CensusEntry> augment(const GraphClass& c, const std::vector<CensusEntry>& parents, int n) {
    std::vector<CensusEntry> out;
    for (auto& p : parents) {
        const int k = p.graph.order();
        std::map<std::string, CensusEntry> local;
        for (uint64_t s = 1; s < (uint64_t{1} << k); ++s) {
            std::vector<Edge> es = p.graph.edges();
            for (int v = 0; v < k; ++v)
                if ((s >> v) & 1) es.emplace_back(v + 1, n);
            Graph g(n, std::move(es));
            if (!c.contains(g)) continue;
            auto canon = canonicalize(g, std::vector<int>(static_cast<size_t>(n), 0));
            if (local.contains(canon.cert) || !canonical_child(g, canon)) continue;
            local.emplace(canon.cert, CensusEntry{g.relabeled(inverse_order(canon.order)), canon.aut});
        }
        for (auto& [_, e] : local) out.push_back(std::move(e));
    }
    return out;
}

inline std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

inline std::map<std::string, std::vector<std::vector<CensusEntry>>>& cache() {
    static std::map<std::string, std::vector<std::vector<CensusEntry>>> c;
    return c;
}

} // namespace census_detail

/// Unlabeled connected members of order n with automorphism counts,
/// ordered by edge count then edge list of the canonical form.
inline std::vector<CensusEntry> enumerate_connected(const GraphClass& c, int n) {
    if (n < 1) throw InputError("census order must be positive");
    if (n > census_order_limit(c))
        throw FeasibilityError("census of " + c.name + " is limited to order " +
                               std::to_string(census_order_limit(c)));
    std::lock_guard lock(census_detail::cache_mutex());
    auto& levels = census_detail::cache()[c.name];
    if (levels.empty()) levels.emplace_back();  // order 0 placeholder
    while (static_cast<int>(levels.size()) <= n) {
        const int k = static_cast<int>(levels.size());
        auto next = k <= kBruteForceCensusOrder ? census_detail::brute_force(c, k)
                                                : census_detail::augment(c, levels[static_cast<size_t>(k - 1)], k);
        census_detail::sort_entries(next);
        levels.push_back(std::move(next));
    }
    return levels[static_cast<size_t>(n)];
}

inline uint64_t labeled_from_unlabeled(const std::vector<CensusEntry>& entries, int n) {
    const uint64_t nf = canon_detail::factorial(n);
    uint64_t total = 0;
    for (auto& e : entries) {
        if (nf % e.aut != 0) throw Error("automorphism count does not divide n!");
        total += nf / e.aut;
        if (total < nf / e.aut) throw FeasibilityError("labeled count overflows 64 bits");
    }
    return total;
}

inline uint64_t labeled_connected_count(const GraphClass& c, int n) {
    return labeled_from_unlabeled(enumerate_connected(c, n), n);
}

inline Census build_census(const GraphClass& c, int maxN) {
    Census out;
    out.classRef = c.name;
    out.maxN = maxN;
    out.labeledConnectedCounts.push_back(0);
    out.unlabeledConnectedReps.emplace_back();
    for (int n = 1; n <= maxN; ++n) {
        auto reps = enumerate_connected(c, n);
        out.labeledConnectedCounts.push_back(labeled_from_unlabeled(reps, n));
        out.unlabeledConnectedReps.push_back(std::move(reps));
    }
    return out;
}

/// Labeled counts of all members (any number of components) from the
/// connected counts: a_n = sum_k C(n-1, k-1) c_k a_{n-k}.
inline std::vector<uint64_t> labeled_member_counts(const Census& census) {
    std::vector<uint64_t> a{1};
    for (int n = 1; n <= census.maxN; ++n) {
        unsigned __int128 sum = 0;
        unsigned __int128 binom = 1;  // C(n-1, k-1)
        for (int k = 1; k <= n; ++k) {
            if (k > 1) binom = binom * static_cast<unsigned>(n - k + 1) / static_cast<unsigned>(k - 1);
            sum += binom * census.labeledConnectedCounts[static_cast<size_t>(k)] * a[static_cast<size_t>(n - k)];
        }
        if (sum > UINT64_MAX) throw FeasibilityError("labeled count overflows 64 bits");
        a.push_back(static_cast<uint64_t>(sum));
    }
    return a;
}

/// All members of order n up to isomorphism, built as multisets of
/// connected members. aut counts permutations of equal components too.
inline std::vector<CensusEntry> enumerate_members(const GraphClass& c, int n) {
    std::vector<std::vector<CensusEntry>> byOrder{{}};
    for (int k = 1; k <= n; ++k) byOrder.push_back(enumerate_connected(c, k));
    std::vector<CensusEntry> out;
    std::vector<std::pair<int, size_t>> parts;
    std::function<void(int, int, size_t)> rec = [&](int left, int minOrder, size_t minIdx) {
        if (left == 0) {
            Graph g(0);
            uint64_t aut = 1;
            size_t run = 0;
            for (size_t i = 0; i < parts.size(); ++i) {
                auto& e = byOrder[static_cast<size_t>(parts[i].first)][parts[i].second];
                g = disjoint_sum(g, e.graph);
                aut = canon_detail::checked_mul(aut, e.aut);
                run = (i > 0 && parts[i] == parts[i - 1]) ? run + 1 : 1;
                aut = canon_detail::checked_mul(aut, run);
            }
            out.push_back({g, aut});
            return;
        }
        for (int k = minOrder; k <= left; ++k)
            for (size_t i = k == minOrder ? minIdx : 0; i < byOrder[static_cast<size_t>(k)].size(); ++i) {
                parts.emplace_back(k, i);
                rec(left - k, k, i);
                parts.pop_back();
            }
    };
    rec(n, 1, 0);
    return out;
}

/// Ratios N_n / (n N_{n-1}) for n = 2..maxN, from connected or all-member counts.
inline std::vector<double> growth_ratio_sequence(const GraphClass& c, int maxN, bool connectedCounts) {
    auto census = build_census(c, maxN);
    std::vector<uint64_t> counts = connectedCounts ? census.labeledConnectedCounts : labeled_member_counts(census);
    std::vector<double> out;
    for (int n = 2; n <= maxN; ++n)
        out.push_back(static_cast<double>(counts[static_cast<size_t>(n)]) /
                      (n * static_cast<double>(counts[static_cast<size_t>(n - 1)])));
    return out;
}

/// Forests use full counts; other classes use connected counts as a proxy.
inline std::vector<double> growth_ratio_sequence(const GraphClass& c, int maxN) {
    return growth_ratio_sequence(c, maxN, c.name != "forests");
}

inline json census_level_json(const GraphClass& c, int n) {
    auto reps = enumerate_connected(c, n);
    json graphs = json::array();
    for (auto& e : reps) graphs.push_back({{"graph", to_json(e.graph)}, {"autCount", e.aut}});
    return {{"class", c.name},
            {"n", n},
            {"generatorVersion", kCensusVersion},
            {"labeledCount", labeled_from_unlabeled(reps, n)},
            {"graphs", graphs}};
}

inline json to_json(const Census& census) {
    json levels = json::array();
    for (int n = 1; n <= census.maxN; ++n) {
        json graphs = json::array();
        for (auto& e : census.unlabeledConnectedReps[static_cast<size_t>(n)])
            graphs.push_back({{"graph", to_json(e.graph)}, {"autCount", e.aut}});
        levels.push_back({{"class", census.classRef},
                          {"n", n},
                          {"generatorVersion", kCensusVersion},
                          {"labeledCount", census.labeledConnectedCounts[static_cast<size_t>(n)]},
                          {"graphs", graphs}});
    }
    return {{"class", census.classRef}, {"maxN", census.maxN}, {"generatorVersion", kCensusVersion},
            {"levels", levels}};
}

/// Reads a census cache; rejects a different class or generator version.
inline Census census_from_json(const json& j, const std::string& expectedClass) {
    try {
        if (j.at("generatorVersion").get<int>() != kCensusVersion)
            throw InputError("census cache has a different generator version");
        Census c;
        c.classRef = j.at("class").get<std::string>();
        if (c.classRef != expectedClass) throw InputError("census cache is for class " + c.classRef);
        c.maxN = j.at("maxN").get<int>();
        c.labeledConnectedCounts.push_back(0);
        c.unlabeledConnectedReps.emplace_back();
        for (auto& level : j.at("levels")) {
            std::vector<CensusEntry> reps;
            for (auto& e : level.at("graphs"))
                reps.push_back({structure_from_json(e.at("graph")).graph, e.at("autCount").get<uint64_t>()});
            c.labeledConnectedCounts.push_back(level.at("labeledCount").get<uint64_t>());
            c.unlabeledConnectedReps.push_back(std::move(reps));
        }
        if (static_cast<int>(c.unlabeledConnectedReps.size()) != c.maxN + 1)
            throw InputError("census cache levels do not match maxN");
        return c;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed census cache: ") + e.what());
    }
}

} // namespace msol
