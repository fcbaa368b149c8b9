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

// Poisson component model, m-profiles and limiting probabilities of
// sentences over random members of an addable class.
//
// A large random member is a giant component plus small components whose
// counts per isomorphism type are independent Poisson variables. The type of
// the whole graph is fixed by the giant's type and, for each class of small
// components, the count capped where further copies stop mattering. Limits
// are sums of profile probabilities; everything the truncation cannot see is
// carried as interval slack.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msol/algebra.hpp"
#include "msol/canon.hpp"
#include "msol/census.hpp"
#include "msol/classes.hpp"
#include "msol/ef.hpp"
#include "msol/errors.hpp"
#include "msol/eval.hpp"
#include "msol/io.hpp"
#include "msol/logic.hpp"
#include "msol/sampler.hpp"
#include "msol/types.hpp"

namespace msol {

struct Interval {
    double lo = 0;
    double hi = 0;  // may be +inf for unbounded estimates

    bool contains(double x) const { return lo <= x && x <= hi; }
    double width() const { return hi - lo; }
};

inline nlohmann::json to_json(const Interval& i) {
    auto num = [](double x) -> nlohmann::json {
        if (std::isfinite(x)) return x;
        return nullptr;
    };
    return nlohmann::json::array({num(i.lo), num(i.hi)});
}

// ---------------------------------------------------------------- model

struct ComponentTerm {
    Graph graph;  // canonical connected member
    std::string cert;
    uint64_t aut = 1;
    double lambda = 0;  // gamma^-|H| / |Aut(H)|
};

struct ComponentModel {
    std::string classRef;
    double gamma = 0;
    int sizeBound = 0;
    std::vector<ComponentTerm> terms;       // by order, then certificate
    std::vector<double> perSizeLambda;      // index n; C_n / (n! gamma^n)
    std::vector<uint64_t> labeledCounts;    // index n
    double lambdaTotalLower = 0;
    double tailEstimate = 0;                // +inf when it cannot be extrapolated
    std::string tailMethod;

    const ComponentTerm* find(const Graph& h) const {
        auto cert = graph_certificate(h);
        for (auto& t : terms)
            if (t.graph.order() == h.order() && t.cert == cert) return &t;
        return nullptr;
    }
};

inline ComponentModel build_component_model(const GraphClass& c, int s) {
    const double gamma = c.require_gamma();
    if (s < 1) throw InputError("size bound must be at least 1");
    if (s > census_order_limit(c))
        throw FeasibilityError("census for " + c.name + " is limited to order " + std::to_string(census_order_limit(c)));
    ComponentModel m;
    m.classRef = c.name;
    m.gamma = gamma;
    m.sizeBound = s;
    m.perSizeLambda.assign(static_cast<size_t>(s) + 1, 0.0);
    m.labeledCounts.assign(static_cast<size_t>(s) + 1, 0);
    for (int n = 1; n <= s; ++n) {
        const auto reps = enumerate_connected(c, n);
        const uint64_t nf = canon_detail::factorial(n);
        uint64_t labeled = 0;
        double sum = 0;
        for (auto& e : reps) {
            ComponentTerm t{e.graph, graph_certificate(e.graph), e.aut,
                            std::pow(gamma, -n) / static_cast<double>(e.aut)};
            labeled += nf / e.aut;
            sum += t.lambda;
            m.terms.push_back(std::move(t));
        }
        m.labeledCounts[n] = labeled;
        m.perSizeLambda[n] = static_cast<double>(labeled) / static_cast<double>(nf) * std::pow(gamma, -n);
        // n!/|Aut| sums to C_n exactly, so the per-graph terms must agree.
        if (std::abs(sum - m.perSizeLambda[n]) > 1e-12 * m.perSizeLambda[n])
            throw Error("per-graph and per-size component weights disagree at order " + std::to_string(n));
        m.lambdaTotalLower += m.perSizeLambda[n];
    }
    if (s >= 2) {
        const double a = m.perSizeLambda[s - 1], b = m.perSizeLambda[s];
        const double ratio = b / a;
        m.tailMethod = "geometric extrapolation of the last two per-size terms (heuristic)";
        m.tailEstimate = ratio < 1 ? b * ratio / (1 - ratio) : std::numeric_limits<double>::infinity();
    } else {
        m.tailMethod = "none: a single term cannot be extrapolated";
        m.tailEstimate = std::numeric_limits<double>::infinity();
    }
    return m;
}

/// [truncated sum, truncated sum + tail estimate].
inline Interval lambda_total(const ComponentModel& model) {
    return {model.lambdaTotalLower, model.lambdaTotalLower + model.tailEstimate};
}

inline double poisson_pmf(double lambda, int k) {
    if (k < 0) return 0.0;
    if (lambda == 0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
}

/// P(count >= k).
inline double poisson_upper(double lambda, int k) {
    double below = 0;
    for (int j = 0; j < k; ++j) below += poisson_pmf(lambda, j);
    return std::max(0.0, 1.0 - below);
}

/// Probability of exactly k components isomorphic to h.
inline double p_k_graph(const ComponentModel& model, const Graph& h, int k) {
    if (!is_connected(h)) throw InputError("component must be connected");
    if (h.order() > model.sizeBound) throw InputError("component larger than the size bound");
    const auto* t = model.find(h);
    if (!t) throw InputError("graph is not a connected member of " + model.classRef);
    return poisson_pmf(t->lambda, k);
}

/// Members (indices into model.terms) of the rank-m class of a.
inline std::vector<size_t> class_members(const ComponentModel& model, const EquivClassId& a) {
    if (!(a.rep.fo.empty() && a.rep.so.empty()) || !is_connected(a.rep.graph))
        throw InputError("class representative must be a connected graph");
    std::vector<size_t> out;
    std::lock_guard lock(shared_type_store_mutex());
    auto& store = shared_type_store();
    const int want = type_structure(store, a.rep, a.m).id;
    for (size_t i = 0; i < model.terms.size(); ++i)
        if (type_graph(store, model.terms[i].graph, a.m).id == want) out.push_back(i);
    if (out.empty()) throw InputError("class has no member within the size bound");
    return out;
}

/// Pmf at k of the Poisson class count, as an interval over the class mass
/// [truncated, truncated + tail].
inline Interval p_k_class(const ComponentModel& model, const EquivClassId& a, int k) {
    double lam = 0;
    for (size_t i : class_members(model, a)) lam += model.terms[i].lambda;
    const double hiLam = lam + model.tailEstimate;
    double x = poisson_pmf(lam, k);
    double y = std::isfinite(hiLam) ? poisson_pmf(hiLam, k) : 0.0;
    Interval out{std::min(x, y), std::max(x, y)};
    // The pmf in lambda peaks at lambda = k.
    if (k > 0 && lam < k && k < hiLam) out.hi = poisson_pmf(static_cast<double>(k), k);
    return out;
}

inline Interval clustering_bound(const ComponentModel& model) {
    auto l = lambda_total(model);
    return {1 - std::exp(-l.lo), std::isfinite(l.hi) ? 1 - std::exp(-l.hi) : 1.0};
}

inline Interval clustering_bound(const GraphClass& c, int s = 5) { return clustering_bound(build_component_model(c, s)); }

// ---------------------------------------------------------------- profiles

/// A class of small components: members of the model with one type.
struct ProfileClass {
    Graph rep;                   // least canonical member
    std::vector<size_t> members; // indices into model.terms
    double lambda = 0;
    int cap = 1;                 // counts >= cap are indistinguishable
    TypedStructure type;
};

/// Classes of the model's components under types over `pattern` (the full
/// rank-m pattern gives exactly the realized rank-m classes).
struct ProfileSpace {
    int m = 0;
    int pattern = 0;
    std::vector<ProfileClass> classes;  // decreasing lambda
};

struct Profile {
    std::vector<int> counts;  // per class of the space; value cap means "at least cap"
    double probability = 0;
};

/// Callers hold the store lock.
inline ProfileSpace build_profile_space(TypeStore& store, const ComponentModel& model, int m, int pattern) {
    ProfileSpace sp;
    sp.m = m;
    sp.pattern = pattern;
    std::map<int, size_t> byType;
    for (size_t i = 0; i < model.terms.size(); ++i) {
        auto t = type_structure_over(store, Structure(model.terms[i].graph), pattern);
        auto [it, fresh] = byType.try_emplace(t.id, sp.classes.size());
        if (fresh) {
            ProfileClass pc;
            pc.rep = model.terms[i].graph;
            pc.type = t;
            sp.classes.push_back(std::move(pc));
        }
        auto& pc = sp.classes[it->second];
        pc.members.push_back(i);
        pc.lambda += model.terms[i].lambda;
    }
    for (auto& pc : sp.classes) {
        auto r = copies_threshold(store, pc.type, 64);
        if (!r) throw FeasibilityError("copy threshold above 64 for a component class");
        pc.cap = std::max(1, *r);
    }
    std::stable_sort(sp.classes.begin(), sp.classes.end(),
                     [](const ProfileClass& a, const ProfileClass& b) { return a.lambda > b.lambda; });
    return sp;
}

inline ProfileSpace build_profile_space(const ComponentModel& model, int m) {
    std::lock_guard lock(shared_type_store_mutex());
    auto& store = shared_type_store();
    return build_profile_space(store, model, m, store.patterns.full(m));
}

inline double count_probability(const ProfileClass& pc, int k) {
    return k < pc.cap ? poisson_pmf(pc.lambda, k) : poisson_upper(pc.lambda, pc.cap);
}

inline double profile_probability(const ProfileSpace& sp, const std::vector<int>& counts) {
    double p = 1;
    for (size_t i = 0; i < sp.classes.size(); ++i) p *= count_probability(sp.classes[i], counts[i]);
    return p;
}

inline constexpr uint64_t kMaxProfiles = 2'000'000;

/// Every profile, in lexicographic order of counts.
inline std::vector<Profile> enumerate_profiles(const ProfileSpace& sp) {
    uint64_t total = 1;
    for (auto& pc : sp.classes) {
        total *= static_cast<uint64_t>(pc.cap) + 1;
        if (total > kMaxProfiles) throw FeasibilityError("profile space too large to list; use the pruned search");
    }
    std::vector<Profile> out;
    std::vector<int> counts(sp.classes.size(), 0);
    for (uint64_t i = 0; i < total; ++i) {
        out.push_back({counts, profile_probability(sp, counts)});
        for (size_t j = counts.size(); j-- > 0;) {
            if (++counts[j] <= sp.classes[j].cap) break;
            counts[j] = 0;
        }
    }
    return out;
}

/// Small components of a profile: count copies of each class representative
/// (each class's representative repeated, classes in space order).
inline Graph profile_graph(const ProfileSpace& sp, const std::vector<int>& counts) {
    Graph g(0);
    for (size_t i = 0; i < sp.classes.size(); ++i)
        for (int k = 0; k < counts[i]; ++k) g = disjoint_sum(g, sp.classes[i].rep);
    return g;
}

// ---------------------------------------------------------------- giant

inline constexpr int kMaxLimitRank = 5;

struct LimitConfig {
    int sizeBound = 5;
    std::optional<int> rank;
    std::string mode = "truncated";  // truncated | exact-tiny | empirical
    uint64_t seed = 1;
    double epsilon = 1e-13;          // profile search prunes branches below this mass
    size_t maxStates = 4096;         // merged profile states kept per step
    int empiricalOrder = 40;
    int empiricalSamples = 200;
    std::optional<int> universeOrder;  // rooted graphs feeding the universal structure
    int threads = 1;
};

inline void check_mode(const std::string& mode) {
    if (mode != "truncated" && mode != "exact-tiny" && mode != "empirical")
        throw InputError("unknown mode '" + mode + "' (truncated, exact-tiny, empirical)");
}

/// Largest order of rooted connected graphs fed to the typed universal
/// structure. Set moves at rank >= 3 blow up the type algebra beyond order 2.
inline int default_universe_order(const PatternTable& pt, int pattern, int sizeBound) {
    const auto& ws = pt.words(pattern);
    const bool sets = std::any_of(ws.begin(), ws.end(), [](const std::string& w) { return w.find('S') != std::string::npos; });
    return sets && pt.level(pattern) >= 3 ? std::min(2, sizeBound) : sizeBound;
}

struct GiantRepresentative {
    std::string mode;
    int universeOrder = 0;     // typed / exact-tiny
    int copies = 0;            // copies of each rooted representative
    int rootedClasses = 0;
    std::optional<TypedStructure> type;  // typed mode: unrooted type over the formula's pattern
    std::optional<Graph> graph;          // explicit modes
    std::optional<Proportion> frequency; // empirical: share of samples satisfying the formula
    size_t sampleSize = 0;
    int sampleOrder = 0;
};

namespace limit_detail {

// Rooted connected members of order <= u, one per type over `pattern`.
inline std::vector<TypedStructure> rooted_reps(TypeStore& store, const GraphClass& c, int u, int pattern,
                                               std::vector<Structure>* explicitReps = nullptr) {
    std::vector<TypedStructure> reps;
    std::set<int> seen;
    for (int n = 1; n <= u; ++n)
        for (auto& e : enumerate_connected(c, n))
            for (int r = 1; r <= n; ++r) {
                auto s = Structure::rooted(e.graph, r);
                auto t = type_structure_over(store, s, pattern);
                if (seen.insert(t.id).second) {
                    reps.push_back(t);
                    if (explicitReps) explicitReps->push_back(s);
                }
            }
    return reps;
}

inline Formula closed_formula(const Formula& phi) {
    if (!is_sentence(phi)) throw InputError("formula must be a sentence (no free variables)");
    return phi;
}

inline int rank_for(const Formula& phi, const LimitConfig& cfg) {
    const int q = quantifier_rank(phi);
    int m = cfg.rank.value_or(q);
    if (m < q) throw InputError("rank override " + std::to_string(m) + " is below the formula's rank " + std::to_string(q));
    if (m > kMaxLimitRank) throw FeasibilityError("rank " + std::to_string(m) + " exceeds the supported bound " + std::to_string(kMaxLimitRank));
    return m;
}

} // namespace limit_detail

/// Representative of the giant component for phi. Callers hold the store lock
/// for the typed and exact-tiny modes.
inline GiantRepresentative giant_representative(TypeStore& store, const Formula& phi, const GraphClass& c, int m,
                                                const LimitConfig& cfg, bool typeExplicit = true) {
    check_mode(cfg.mode);
    GiantRepresentative g;
    g.mode = cfg.mode;
    const int pattern = store.patterns.of_formula(phi);
    if (cfg.mode == "truncated") {
        g.universeOrder = cfg.universeOrder.value_or(default_universe_order(store.patterns, pattern, cfg.sizeBound));
        if (g.universeOrder > census_order_limit(c)) throw FeasibilityError("universe order beyond the census bound");
        auto reps = limit_detail::rooted_reps(store, c, g.universeOrder, pattern);
        auto u = universal_type(store, reps, pattern);
        g.copies = u.copies;
        g.rootedClasses = static_cast<int>(reps.size());
        g.type = typed_forget(store, u.type, kRoot);
        return g;
    }
    if (cfg.mode == "exact-tiny") {
        if (m > 3) throw FeasibilityError("exact-tiny mode supports rank <= 3");
        g.universeOrder = cfg.universeOrder.value_or(std::min(2, cfg.sizeBound));
        std::vector<Structure> explicitReps;
        auto reps = limit_detail::rooted_reps(store, c, g.universeOrder, pattern, &explicitReps);
        auto u = universal_type(store, reps, pattern);
        g.copies = u.copies;
        g.rootedClasses = static_cast<int>(reps.size());
        g.graph = build_universal(explicitReps, u.copies).graph;
        // Brute-force type of the explicit structure, independent of the algebra.
        if (typeExplicit) g.type = type_structure_over(store, Structure(*g.graph), pattern);
        return g;
    }
    // empirical
    g.sampleOrder = cfg.empiricalOrder;
    auto sample = sample_connected(c, cfg.empiricalOrder, static_cast<size_t>(cfg.empiricalSamples), cfg.seed);
    size_t hits = 0;
    std::optional<Graph> yes, no;  // first sample on each side
    for (auto& h : sample) {
        const bool t = eval(h, phi);
        hits += t;
        auto& slot = t ? yes : no;
        if (!slot) slot = h;
    }
    g.sampleSize = sample.size();
    g.frequency = proportion(hits, sample.size());
    const double f = g.frequency->value;
    if (f > 0.05 && f < 0.95)
        throw InconclusiveError("empirical frequency " + std::to_string(f) + " is between 0.05 and 0.95");
    g.graph = f >= 0.95 ? *yes : *no;
    return g;
}

struct GiantVerdict {
    bool truth = false;
    std::string confidence;  // typed-universal | exact-tiny | empirical
    GiantRepresentative giant;
};

inline GiantVerdict giant_truth(const Formula& phiIn, const GraphClass& c, int m, const LimitConfig& cfg) {
    Formula phi = limit_detail::closed_formula(phiIn);
    if (m < quantifier_rank(phi)) throw InputError("rank below the formula's quantifier rank");
    GiantVerdict v;
    std::unique_lock lock(shared_type_store_mutex());
    auto& store = shared_type_store();
    v.giant = giant_representative(store, phi, c, m, cfg, false);
    if (v.giant.type) {
        v.truth = typed_eval(store, *v.giant.type, phi);
        v.confidence = "typed-universal";
    } else if (cfg.mode == "exact-tiny") {
        lock.unlock();
        v.truth = eval(*v.giant.graph, phi);
        v.confidence = "exact-tiny";
    } else {
        v.truth = v.giant.frequency->value >= 0.95;
        v.confidence = "empirical";
    }
    return v;
}

/// The connected-class law: the limit over connected members is 0 or 1.
inline int zero_one_connected(const Formula& phi, const GraphClass& c, const LimitConfig& cfg = {}) {
    auto m = limit_detail::rank_for(phi, cfg);
    return giant_truth(phi, c, m, cfg).truth ? 1 : 0;
}

// ---------------------------------------------------------------- limit

/// An implying profile. Profiles composing to one type are reported once,
/// by the most likely of them, with the mass of the whole group.
struct ProfileHit {
    std::vector<int> counts;
    double probability = 0;
    double groupMass = 0;
};

struct LimitResult {
    std::string formula;
    std::string classRef;
    int m = 0;
    std::string mode;
    Interval probability;
    Interval lambdaTotal;
    double implyingMass = 0;  // sum of p_f over explored implying profiles
    double exploredMass = 0;
    double prunedMass = 0;
    double tailSlack = 0;     // 1 - exp(-tail): chance of an unseen component
    std::vector<ProfileHit> implyingProfiles;
    std::vector<Graph> classReps;
    std::vector<int> caps;
    std::vector<double> classLambda;
    int censusSizeBound = 0;
    double gamma = 0;
    GiantVerdict giant;
    size_t profilesVisited = 0;
};

/// Limit of P(phi) over random members of c, as an interval.
inline LimitResult limit_probability(const Formula& phiIn, const GraphClass& c, const LimitConfig& cfg = {}) {
    Formula phi = limit_detail::closed_formula(phiIn);
    check_mode(cfg.mode);
    LimitResult res;
    res.formula = to_string(phi);
    res.classRef = c.name;
    res.m = limit_detail::rank_for(phi, cfg);
    res.mode = cfg.mode;
    res.censusSizeBound = cfg.sizeBound;
    const auto model = build_component_model(c, cfg.sizeBound);
    res.gamma = model.gamma;
    res.lambdaTotal = lambda_total(model);

    std::unique_lock lock(shared_type_store_mutex());
    auto& store = shared_type_store();
    const int pattern = store.patterns.of_formula(phi);
    const auto sp = build_profile_space(store, model, res.m, pattern);
    for (auto& pc : sp.classes) {
        res.classReps.push_back(pc.rep);
        res.caps.push_back(pc.cap);
        res.classLambda.push_back(pc.lambda);
    }
    res.giant.giant = giant_representative(store, phi, c, res.m, cfg);
    const auto& giant = res.giant.giant;

    double implied = 0, explored = 0, pruned = 0;
    const size_t t = sp.classes.size();

    if (giant.type) {
        // Small components are composed first, from the empty graph; profiles
        // reaching the same type merge into one state carrying their mass and
        // the most likely profile. The giant joins at the end.
        struct State {
            TypedStructure type;
            double mass = 0;
            std::vector<int> best;
            double bestP = 0;
        };
        std::map<int, State> states;
        const auto empty = type_structure_over(store, Structure(Graph(0)), pattern);
        states[empty.id] = {empty, 1.0, {}, 1.0};
        for (size_t i = 0; i < t; ++i) {
            const auto& pc = sp.classes[i];
            std::map<int, State> next;
            for (auto& [_, st] : states) {
                TypedStructure acc = st.type;
                for (int k = 0; k <= pc.cap; ++k) {
                    if (k > 0) acc = typed_disjoint_sum(store, acc, pc.type);
                    const double pk = count_probability(pc, k);
                    const double q = st.mass * pk;
                    if (q < cfg.epsilon) {
                        pruned += q;
                        continue;
                    }
                    auto [it, fresh] = next.try_emplace(acc.id);
                    auto& dst = it->second;
                    if (fresh) dst.type = acc;
                    dst.mass += q;
                    if (st.bestP * pk > dst.bestP) {
                        dst.bestP = st.bestP * pk;
                        dst.best = st.best;
                        dst.best.push_back(k);
                    }
                }
                ++res.profilesVisited;
            }
            if (next.size() > cfg.maxStates) {
                // Keep the heaviest states; the rest become slack.
                std::vector<std::pair<double, int>> order;
                for (auto& [id, st] : next) order.emplace_back(st.mass, id);
                std::sort(order.begin(), order.end(), std::greater<>());
                for (size_t j = cfg.maxStates; j < order.size(); ++j) {
                    pruned += order[j].first;
                    next.erase(order[j].second);
                }
            }
            states = std::move(next);
        }
        for (auto& [_, st] : states) {
            explored += st.mass;
            if (typed_eval(store, typed_disjoint_sum(store, *giant.type, st.type), phi)) {
                implied += st.mass;
                res.implyingProfiles.push_back({st.best, st.bestP, st.mass});
            }
        }
        res.giant.truth = typed_eval(store, *giant.type, phi);
        res.giant.confidence = cfg.mode == "truncated" ? "typed-universal" : cfg.mode;
    } else {
        lock.unlock();
        // Explicit graphs: depth-first over profiles, pruning light branches.
        std::vector<int> counts(t, 0);
        std::function<void(size_t, const Graph&, double)> walk = [&](size_t i, const Graph& cur, double p) {
            if (p < cfg.epsilon) {
                pruned += p;
                return;
            }
            if (i == t) {
                ++res.profilesVisited;
                explored += p;
                if (eval(cur, phi)) {
                    implied += p;
                    res.implyingProfiles.push_back({counts, p, p});
                }
                return;
            }
            Graph acc = cur;
            for (int k = 0; k <= sp.classes[i].cap; ++k) {
                if (k > 0) acc = disjoint_sum(acc, sp.classes[i].rep);
                counts[i] = k;
                walk(i + 1, acc, p * count_probability(sp.classes[i], k));
            }
            counts[i] = 0;
        };
        walk(0, *giant.graph, 1.0);
        res.giant.truth = eval(*giant.graph, phi);
        res.giant.confidence = cfg.mode;
    }
    std::sort(res.implyingProfiles.begin(), res.implyingProfiles.end(),
              [](const ProfileHit& a, const ProfileHit& b) { return a.groupMass > b.groupMass; });

    res.implyingMass = implied;
    res.exploredMass = explored;
    res.prunedMass = std::max(0.0, pruned);
    // Components above the size bound are unseen; condition on there being none.
    const double stay = std::isfinite(model.tailEstimate) ? std::exp(-model.tailEstimate) : 0.0;
    res.tailSlack = 1 - stay;
    res.probability.lo = std::clamp(stay * implied, 0.0, 1.0);
    res.probability.hi = std::clamp(stay * (implied + res.prunedMass) + res.tailSlack, 0.0, 1.0);
    if (res.probability.hi < res.probability.lo) res.probability.hi = res.probability.lo;
    return res;
}

inline nlohmann::json to_json(const LimitResult& r, size_t maxProfiles = 64) {
    nlohmann::json profiles = nlohmann::json::array();
    for (size_t i = 0; i < r.implyingProfiles.size() && i < maxProfiles; ++i)
        profiles.push_back({{"counts", r.implyingProfiles[i].counts},
                            {"probability", r.implyingProfiles[i].probability},
                            {"groupMass", r.implyingProfiles[i].groupMass}});
    nlohmann::json classes = nlohmann::json::array();
    for (size_t i = 0; i < r.classReps.size(); ++i)
        classes.push_back({{"representative", to_json(r.classReps[i])}, {"lambda", r.classLambda[i]}, {"cap", r.caps[i]}});
    const auto& g = r.giant.giant;
    nlohmann::json giant = {{"truth", r.giant.truth}, {"confidence", r.giant.confidence}};
    if (g.mode != "empirical") {
        giant["universeOrder"] = g.universeOrder;
        giant["copies"] = g.copies;
        giant["rootedClasses"] = g.rootedClasses;
    }
    if (g.frequency) {
        giant["frequency"] = to_json(*g.frequency);
        giant["sampleSize"] = g.sampleSize;
        giant["sampleOrder"] = g.sampleOrder;
    }
    return {
        {"formula", r.formula},
        {"class", r.classRef},
        {"m", r.m},
        {"mode", r.mode},
        {"interval", to_json(r.probability)},
        {"lambdaTotal", to_json(r.lambdaTotal)},
        {"implyingProfiles", profiles},
        {"implyingProfileCount", r.implyingProfiles.size()},
        {"profileClasses", classes},
        {"slack", {{"pruned", r.prunedMass}, {"tail", r.tailSlack}, {"explored", r.exploredMass}}},
        {"giant", giant},
        {"censusSizeBound", r.censusSizeBound},
        {"constants", {{"gamma", r.gamma}}},
    };
}

inline nlohmann::json to_json(const ComponentModel& m) {
    nlohmann::json per = nlohmann::json::object();
    for (int n = 1; n <= m.sizeBound; ++n) per[std::to_string(n)] = m.perSizeLambda[n];
    nlohmann::json graphs = nlohmann::json::array();
    for (auto& t : m.terms) graphs.push_back({{"graph", to_json(t.graph)}, {"aut", t.aut}, {"lambda", t.lambda}});
    return {{"class", m.classRef},
            {"gamma", m.gamma},
            {"sizeBound", m.sizeBound},
            {"perSizeLambda", per},
            {"perGraphLambda", graphs},
            {"lambdaTotalLower", m.lambdaTotalLower},
            {"tailEstimate", std::isfinite(m.tailEstimate) ? nlohmann::json(m.tailEstimate) : nlohmann::json(nullptr)},
            {"tailMethod", m.tailMethod}};
}

} // namespace msol
