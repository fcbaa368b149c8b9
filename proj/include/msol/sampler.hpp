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

// Uniform sampling from C_n: census-indexed exact sampling for small n,
// an exact recursive sampler for forests, and the edge-toggle chain.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "msol/algebra.hpp"
#include "msol/canon.hpp"
#include "msol/census.hpp"
#include "msol/classes.hpp"
#include "msol/errors.hpp"
#include "msol/graph.hpp"

namespace msol {

inline constexpr int kExactSampleOrder = 7;
inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64-seed/rejection-int/53bit-unit";
inline constexpr const char* kMixingCaveat = "mixing-unverified";

/// Reproducible generator. Streams are split by hashing (seed, stream id)
/// through splitmix64, so results do not depend on draw order elsewhere.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) {
        uint64_t s = seed ^ (stream * 0xD1B54A32D192ED03ULL);
        uint64_t a = splitmix64(s), b = splitmix64(s);
        eng_.seed(a ^ (b << 1));
    }

    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t next() { return eng_(); }

    /// Uniform on [0, n), n > 0, without modulo bias.
    uint64_t below(uint64_t n) {
        const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
        uint64_t x;
        do x = eng_();
        while (x >= limit);
        return x % n;
    }

    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    std::vector<int> permutation(int n) {
        std::vector<int> p(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) p[i] = i + 1;
        for (int i = n - 1; i > 0; --i) std::swap(p[i], p[below(static_cast<uint64_t>(i) + 1)]);
        return p;
    }

private:
    std::mt19937_64 eng_;
};

inline void require_deletion_closed(const GraphClass& c) {
    if (!c.deletionClosed)
        throw InputError("class " + c.name + " is not closed under edge deletion; the toggle chain needs it");
}

// ---------------------------------------------------------------- exact

/// i.i.d. uniform labeled members of order n <= 7: pick an unlabeled
/// member with weight n!/|Aut| by integer index, then relabel uniformly.
inline std::vector<Graph> sample_exact(const GraphClass& c, int n, size_t count, uint64_t seed) {
    if (n < 0) throw InputError("order must be non-negative");
    if (n > kExactSampleOrder)
        throw FeasibilityError("exact sampling needs n <= " + std::to_string(kExactSampleOrder));
    if (n == 0) return std::vector<Graph>(count, Graph(0));
    auto members = enumerate_members(c, n);
    std::vector<uint64_t> cum;
    uint64_t total = 0;
    const uint64_t nf = canon_detail::factorial(n);
    for (auto& e : members) cum.push_back(total += nf / e.aut);
    Rng rng(seed);
    std::vector<Graph> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        uint64_t x = rng.below(total);
        size_t k = static_cast<size_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
        auto perm = rng.permutation(n);
        out.push_back(members[k].graph.relabeled(perm));
    }
    return out;
}

// ---------------------------------------------------------------- forests

/// Exact uniform labeled forests of any order. The component of the least
/// remaining vertex has size k with weight C(m-1,k-1) k^(k-2) F(m-k);
/// the tree on it is drawn from a uniform Pruefer code.
class ForestSampler {
public:
    explicit ForestSampler(int maxN) : logF_(static_cast<size_t>(maxN) + 1, 0.0), cdf_(static_cast<size_t>(maxN) + 1) {
        for (int m = 1; m <= maxN; ++m) {
            std::vector<double> lw;
            for (int k = 1; k <= m; ++k) lw.push_back(log_binom(m - 1, k - 1) + log_trees(k) + logF_[m - k]);
            double mx = *std::max_element(lw.begin(), lw.end());
            double s = 0;
            for (double& w : lw) s += (w = std::exp(w - mx));
            logF_[m] = mx + std::log(s);
            double acc = 0;
            for (double w : lw) cdf_[m].push_back(acc += w / s);
            cdf_[m].back() = 1.0;
        }
    }

    /// Natural log of the number of labeled forests on m vertices.
    double log_count(int m) const { return logF_.at(static_cast<size_t>(m)); }

    Graph sample(int n, Rng& rng) const {
        if (n >= static_cast<int>(logF_.size())) throw InputError("forest sampler built for smaller order");
        std::vector<int> rest(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) rest[i] = i + 1;
        std::vector<Edge> es;
        while (!rest.empty()) {
            const int m = static_cast<int>(rest.size());
            const auto& cdf = cdf_[m];
            int k = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), rng.unit()) - cdf.begin()) + 1;
            k = std::min(k, m);
            // rest[0] is the least remaining vertex; choose k-1 partners.
            for (int i = 1; i < k; ++i) std::swap(rest[i], rest[i + rng.below(static_cast<uint64_t>(m - i))]);
            std::vector<int> part(rest.begin(), rest.begin() + k);
            for (auto [a, b] : random_tree(k, rng)) es.emplace_back(part[a], part[b]);
            rest.erase(rest.begin(), rest.begin() + k);
            std::sort(rest.begin(), rest.end());
        }
        return Graph(n, std::move(es));
    }

    /// Uniform labeled tree on {0..k-1}.
    static std::vector<Edge> random_tree(int k, Rng& rng) {
        std::vector<Edge> es;
        if (k <= 1) return es;
        if (k == 2) return {{0, 1}};
        std::vector<int> code(static_cast<size_t>(k - 2));
        for (int& x : code) x = static_cast<int>(rng.below(static_cast<uint64_t>(k)));
        std::vector<int> deg(static_cast<size_t>(k), 1);
        for (int x : code) ++deg[x];
        // Linear Pruefer decoding.
        int ptr = 0;
        while (deg[ptr] != 1) ++ptr;
        int leaf = ptr;
        for (int v : code) {
            es.emplace_back(leaf, v);
            if (--deg[v] == 1 && v < ptr) {
                leaf = v;
            } else {
                ++ptr;
                while (deg[ptr] != 1) ++ptr;
                leaf = ptr;
            }
        }
        es.emplace_back(leaf, k - 1);
        return es;
    }

private:
    static double log_binom(int a, int b) { return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0); }
    static double log_trees(int k) { return k <= 2 ? 0.0 : (k - 2) * std::log(static_cast<double>(k)); }

    std::vector<double> logF_;
    std::vector<std::vector<double>> cdf_;
};

inline std::vector<Graph> sample_forests(int n, size_t count, uint64_t seed) {
    ForestSampler fs(n);
    Rng rng(seed);
    std::vector<Graph> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) out.push_back(fs.sample(n, rng));
    return out;
}

// ---------------------------------------------------------------- chain

struct ChainStats {
    uint64_t proposals = 0;
    uint64_t added = 0;
    uint64_t removed = 0;
    uint64_t rejected = 0;
};

/// Toggle chain on the members of C with vertex set [n]. Removals are
/// always accepted (deletion-closed classes); additions are tested.
/// Orders with at most 64 vertex pairs run on an edge bitmask with a
/// membership memo; larger orders keep an explicit graph.
class ChainState {
public:
    std::string classRef;
    uint64_t seed = 0;
    uint64_t steps = 0;
    ChainStats stats;

    ChainState(const GraphClass& c, int n, uint64_t seedValue)
        : classRef(c.name), seed(seedValue), n_(n), graph_(n), cls_(std::make_shared<GraphClass>(c)),
          rng_(seedValue, 1) {
        require_deletion_closed(c);
        if (n < 0) throw InputError("chain order must be non-negative");
        small_ = n * (n - 1) / 2 <= 64;
        if (small_) memo_ = std::make_shared<std::unordered_map<uint64_t, bool>>();
    }

    int order() const { return n_; }

    const Graph& current() const {
        if (small_ && dirty_) {
            std::vector<Edge> es;
            for (uint64_t m = mask_; m; m &= m - 1) es.push_back(pair_of(static_cast<uint64_t>(std::countr_zero(m))));
            graph_ = Graph(n_, std::move(es));
            dirty_ = false;
        }
        return graph_;
    }

    /// Restarts from the member g.
    void reset(const Graph& g) {
        if (g.order() != n_) throw InputError("chain order is fixed");
        if (!cls_->contains(g)) throw InputError("chain state must be a class member");
        graph_ = g;
        dirty_ = false;
        mask_ = 0;
        if (small_)
            for (auto [u, v] : g.edges()) mask_ |= uint64_t{1} << pair_index(u, v);
    }

    const GraphClass& graph_class() const { return *cls_; }

    /// One kernel step: uniform pair, toggle iff the result is a member.
    void step() {
        ++steps;
        if (n_ < 2) return;
        ++stats.proposals;
        const uint64_t p = rng_.below(static_cast<uint64_t>(n_) * (n_ - 1) / 2);
        if (small_) {
            const uint64_t bit = uint64_t{1} << p;
            if (mask_ & bit) {
                mask_ &= ~bit;
                dirty_ = true;
                ++stats.removed;
                return;
            }
            const uint64_t key = mask_ | bit;
            auto it = memo_->find(key);
            if (it == memo_->end()) {
                const Graph& g = current();
                auto [u, v] = pair_of(p);
                it = memo_->emplace(key, cls_->contains(g.with_edge(u, v))).first;
            }
            if (it->second) {
                mask_ = key;
                dirty_ = true;
                ++stats.added;
            } else {
                ++stats.rejected;
            }
            return;
        }
        auto [u, v] = pair_of(p);
        if (graph_.has_edge(u, v)) {
            graph_ = graph_.without_edge(u, v);
            ++stats.removed;
            return;
        }
        Graph next = graph_.with_edge(u, v);
        if (cls_->contains(next)) {
            graph_ = std::move(next);
            ++stats.added;
        } else {
            ++stats.rejected;
        }
    }

    void run(uint64_t k) {
        for (uint64_t i = 0; i < k; ++i) step();
    }

    // Pairs (1,2),(1,3),(2,3),(1,4),... ordered by larger endpoint.
    static uint64_t pair_index(int u, int v) {
        if (u > v) std::swap(u, v);
        return static_cast<uint64_t>(v - 1) * (v - 2) / 2 + static_cast<uint64_t>(u - 1);
    }
    static Edge pair_of(uint64_t p) {
        int v = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(p))) / 2.0) + 1;
        while (static_cast<uint64_t>(v - 1) * (v - 2) / 2 > p) --v;
        while (static_cast<uint64_t>(v) * (v - 1) / 2 <= p) ++v;
        return {static_cast<int>(p - static_cast<uint64_t>(v - 1) * (v - 2) / 2) + 1, v};
    }

private:
    int n_;
    bool small_ = false;
    mutable Graph graph_;
    mutable bool dirty_ = false;
    uint64_t mask_ = 0;
    std::shared_ptr<GraphClass> cls_;
    Rng rng_;
    std::shared_ptr<std::unordered_map<uint64_t, bool>> memo_;
};

/// Exact one-step kernel probability P(g -> h) for members g, h on [n].
inline double kernel_probability(const GraphClass& c, const Graph& g, const Graph& h) {
    const int n = g.order();
    if (h.order() != n || n < 2) return n == h.order() && g == h ? 1.0 : 0.0;
    const double pairs = n * (n - 1) / 2.0;
    if (g == h) {
        int stay = 0;
        for (int u = 1; u <= n; ++u)
            for (int v = u + 1; v <= n; ++v)
                if (!g.has_edge(u, v) && !c.contains(g.with_edge(u, v))) ++stay;
        return stay / pairs;
    }
    std::vector<Edge> diff;
    std::set_symmetric_difference(g.edges().begin(), g.edges().end(), h.edges().begin(), h.edges().end(),
                                  std::back_inserter(diff));
    if (diff.size() != 1 || !c.contains(h)) return 0.0;
    return 1.0 / pairs;
}

inline ChainState& chain_step(ChainState& s) {
    s.step();
    return s;
}

inline uint64_t default_burnin(int n) { return 50ULL * static_cast<uint64_t>(n) * (n - 1) / 2; }
inline uint64_t default_thinning(int n) { return std::max<uint64_t>(1, static_cast<uint64_t>(n) * (n - 1) / 2); }

struct SampleRun {
    std::vector<Graph> graphs;
    std::string method;  // exact | exact-forest | chain
    uint64_t burnin = 0;
    uint64_t thinning = 0;
    ChainStats stats;
    std::vector<std::string> caveats;
};

/// Samples by the best available route: exact for n <= 7, the forest
/// sampler for forests, otherwise `chains` toggle chains concatenated.
inline SampleRun draw_samples(const GraphClass& c, int n, size_t count, uint64_t seed,
                              std::optional<uint64_t> burnin = std::nullopt,
                              std::optional<uint64_t> thinning = std::nullopt, int chains = 1,
                              bool forceChain = false) {
    if (n < 1) throw InputError("sample order must be positive");
    if (chains < 1) throw InputError("need at least one chain");
    SampleRun r;
    if (!forceChain && n <= kExactSampleOrder) {
        r.method = "exact";
        r.graphs = sample_exact(c, n, count, seed);
        return r;
    }
    if (!forceChain && c.name == "forests") {
        r.method = "exact-forest";
        r.graphs = sample_forests(n, count, seed);
        return r;
    }
    r.method = "chain";
    r.burnin = burnin.value_or(default_burnin(n));
    r.thinning = thinning.value_or(default_thinning(n));
    if (r.thinning == 0) throw InputError("thinning must be positive");
    r.caveats.push_back(kMixingCaveat);
    for (int k = 0; k < chains; ++k) {
        const size_t share = count / static_cast<size_t>(chains) + (static_cast<size_t>(k) < count % static_cast<size_t>(chains));
        uint64_t s = seed;
        for (int j = 0; j <= k; ++j) Rng::splitmix64(s);
        ChainState st(c, n, k == 0 ? seed : s);
        st.run(r.burnin);
        for (size_t i = 0; i < share; ++i) {
            st.run(r.thinning);
            r.graphs.push_back(st.current());
        }
        r.stats.proposals += st.stats.proposals;
        r.stats.added += st.stats.added;
        r.stats.removed += st.stats.removed;
        r.stats.rejected += st.stats.rejected;
    }
    return r;
}

/// Connected members of order n, by rejection from draw_samples (trees
/// directly for forests).
inline std::vector<Graph> sample_connected(const GraphClass& c, int n, size_t count, uint64_t seed) {
    std::vector<Graph> out;
    if (c.name == "forests") {
        Rng rng(seed);
        for (size_t i = 0; i < count; ++i) {
            std::vector<Edge> es;
            for (auto [a, b] : ForestSampler::random_tree(n, rng)) es.emplace_back(a + 1, b + 1);
            out.emplace_back(n, std::move(es));
        }
        return out;
    }
    uint64_t round = 0;
    while (out.size() < count) {
        if (round > 64) throw InconclusiveError("connected members too rare to sample at this order");
        size_t want = count - out.size();
        auto run = draw_samples(c, n, want + want / 8 + 4, seed + round++);
        for (auto& g : run.graphs)
            if (out.size() < count && is_connected(g)) out.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------- report

struct Proportion {
    double value = 0;
    double halfWidth = 0;  // 95% normal approximation
};

inline Proportion proportion(size_t hits, size_t n) {
    if (n == 0) return {};
    double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, 1.959963984540054 * std::sqrt(p * (1 - p) / static_cast<double>(n))};
}

struct AppearanceQuery {
    std::string name;
    Structure rooted;
};

struct SampleReport {
    std::string classRef;
    int n = 0;
    uint64_t seed = 0;
    std::string method;
    uint64_t burnin = 0;
    uint64_t thinning = 0;
    size_t sampleSize = 0;
    Proportion connectedness;
    Proportion meanIsolatedVertices;  // value is the mean, halfWidth from the sample variance
    std::map<int, uint64_t> isolatedVertexHistogram;
    std::map<int, uint64_t> smallComponentCountHistogram;
    std::map<int, uint64_t> giantComplementSizeHistogram;
    std::vector<std::pair<std::string, Proportion>> appearanceFrequency;
    ChainStats stats;
    std::vector<std::string> caveats;
};

inline SampleReport summarize(const std::vector<Graph>& graphs, const std::vector<AppearanceQuery>& queries) {
    SampleReport r;
    r.sampleSize = graphs.size();
    size_t connected = 0;
    std::vector<size_t> hits(queries.size(), 0);
    double sum = 0, sumSq = 0;
    for (auto& g : graphs) {
        auto comps = component_vertices(g);
        int isolated = 0;
        size_t largest = 0;
        for (auto& vs : comps) {
            isolated += vs.size() == 1;
            largest = std::max(largest, vs.size());
        }
        connected += comps.size() == 1;
        ++r.isolatedVertexHistogram[isolated];
        ++r.smallComponentCountHistogram[comps.empty() ? 0 : static_cast<int>(comps.size()) - 1];
        ++r.giantComplementSizeHistogram[g.order() - static_cast<int>(largest)];
        sum += isolated;
        sumSq += static_cast<double>(isolated) * isolated;
        for (size_t q = 0; q < queries.size(); ++q) hits[q] += appears(queries[q].rooted, g);
    }
    r.connectedness = proportion(connected, graphs.size());
    if (!graphs.empty()) {
        const double n = static_cast<double>(graphs.size());
        const double mean = sum / n;
        const double var = std::max(0.0, sumSq / n - mean * mean);
        r.meanIsolatedVertices = {mean, 1.959963984540054 * std::sqrt(var / n)};
    }
    for (size_t q = 0; q < queries.size(); ++q)
        r.appearanceFrequency.emplace_back(queries[q].name, proportion(hits[q], graphs.size()));
    return r;
}

inline SampleReport run_report(const GraphClass& c, int n, size_t count, std::optional<uint64_t> burnin,
                               std::optional<uint64_t> thinning, const std::vector<AppearanceQuery>& queries,
                               uint64_t seed, int chains = 1) {
    auto run = draw_samples(c, n, count, seed, burnin, thinning, chains);
    SampleReport r = summarize(run.graphs, queries);
    r.classRef = c.name;
    r.n = n;
    r.seed = seed;
    r.method = run.method;
    r.burnin = run.burnin;
    r.thinning = run.thinning;
    r.stats = run.stats;
    r.caveats = run.caveats;
    return r;
}

inline nlohmann::json to_json(const Proportion& p) { return {{"value", p.value}, {"halfWidth", p.halfWidth}}; }

inline nlohmann::json to_json(const SampleReport& r) {
    auto hist = [](const std::map<int, uint64_t>& h) {
        nlohmann::json j = nlohmann::json::object();
        for (auto [k, v] : h) j[std::to_string(k)] = v;
        return j;
    };
    nlohmann::json app = nlohmann::json::object();
    for (auto& [name, p] : r.appearanceFrequency) app[name] = to_json(p);
    return {
        {"class", r.classRef},
        {"n", r.n},
        {"seed", r.seed},
        {"method", r.method},
        {"rng", kRngAlgorithm},
        {"burnin", r.burnin},
        {"thinning", r.thinning},
        {"sampleSize", r.sampleSize},
        {"connectednessFrequency", to_json(r.connectedness)},
        {"meanIsolatedVertices", to_json(r.meanIsolatedVertices)},
        {"isolatedVertexHistogram", hist(r.isolatedVertexHistogram)},
        {"smallComponentCountHistogram", hist(r.smallComponentCountHistogram)},
        {"giantComplementSizeHistogram", hist(r.giantComplementSizeHistogram)},
        {"appearanceFrequency", app},
        {"chain", {{"proposals", r.stats.proposals}, {"added", r.stats.added}, {"removed", r.stats.removed},
                   {"rejected", r.stats.rejected}}},
        {"caveats", r.caveats},
    };
}

} // namespace msol
