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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "msol/limit.hpp"

using namespace msol;

namespace {

const double kGamma = 27.22679;

Formula F(const char* s) { return parse_formula(s); }

// Sentences used for the complement and band properties.
const std::vector<std::string> kSuite = {
    sentences::kNonempty,
    sentences::kIsolatedVertex,
    sentences::kConnected,
    "ex x. ex y. E(x,y)",
    "all x. ex y. E(x,y)",
    "ex x. ex y. ex z. E(x,y) & E(y,z) & E(x,z)",
};

} // namespace

TEST_CASE("component model numbers", "[limit]") {
    auto planar = planar_class();
    auto m = build_component_model(planar, 5);
    CHECK(m.perSizeLambda[1] == Catch::Approx(1 / kGamma).epsilon(1e-12));
    CHECK((m.perSizeLambda[1] > 0.03672 && m.perSizeLambda[1] < 0.03674));
    CHECK(m.perSizeLambda[2] == Catch::Approx(1 / (2 * kGamma * kGamma)));
    CHECK(m.perSizeLambda[2] < 0.0007);
    CHECK(m.perSizeLambda[3] < 0.00004);
    CHECK((m.lambdaTotalLower >= 0.03742 && m.lambdaTotalLower <= 0.03745));
    CHECK(std::abs(m.lambdaTotalLower - 0.037439) < 1e-5);
    CHECK(m.labeledCounts == std::vector<uint64_t>{0, 1, 1, 4, 38, 727});
    for (auto& t : m.terms) CHECK(t.lambda > 0);
    auto tot = lambda_total(m);
    CHECK(tot.lo <= tot.hi);
    CHECK(std::isfinite(tot.hi));
    CHECK_THAT(m.tailMethod, Catch::Matchers::ContainsSubstring("heuristic"));

    double prev = 0;
    for (int s = 1; s <= 6; ++s) {
        auto ms = build_component_model(planar, s);
        CHECK(ms.lambdaTotalLower >= prev);
        prev = ms.lambdaTotalLower;
    }
    auto one = build_component_model(planar, 1);
    CHECK(lambda_total(one).lo == Catch::Approx(1 / kGamma));
    CHECK(std::isinf(lambda_total(one).hi));

    auto forests = build_component_model(forests_class(), 10);
    CHECK((forests.lambdaTotalLower > 0.48 && forests.lambdaTotalLower < 0.5));
    CHECK_THROWS_AS(build_component_model(treewidth_class(3), 3), InputError);
    CHECK(build_component_model(treewidth_class(3).with_gamma(10), 3).gamma == 10);
    CHECK_THROWS_AS(build_component_model(planar, 11), FeasibilityError);
}

TEST_CASE("Poisson counts of single graphs", "[limit]") {
    auto m = build_component_model(planar_class(), 4);
    CHECK(p_k_graph(m, Graph(1), 0) == Catch::Approx(std::exp(-1 / kGamma)));
    CHECK(std::abs(p_k_graph(m, Graph(1), 0) - 0.963937) < 1e-6);
    for (auto& t : m.terms) {
        double sum = 0, mean = 0;
        for (int k = 0; k <= 20; ++k) {
            double p = p_k_graph(m, t.graph, k);
            sum += p;
            mean += k * p;
        }
        CHECK(sum >= 1 - 1e-12);
        CHECK(mean == Catch::Approx(t.lambda).epsilon(1e-9));
    }
    CHECK_THROWS_AS(p_k_graph(m, Graph(2), 0), InputError);
    CHECK_THROWS_AS(p_k_graph(m, path_graph(5), 0), InputError);
    CHECK_THROWS_AS(p_k_graph(m, complete_graph(5).without_edge(1, 2).without_edge(3, 4), 0), InputError);
}

TEST_CASE("Poisson counts of classes", "[limit]") {
    auto m = build_component_model(planar_class(), 5);
    EquivClassId k1{2, Structure(Graph(1)), ""};
    auto members = class_members(m, k1);
    REQUIRE(members.size() == 1);
    CHECK(p_k_class(m, k1, 0).contains(std::exp(-1 / kGamma)));
    CHECK(p_k_class(m, k1, 12).hi < 1e-20);
    double lo = 0, hi = 0;
    for (int k = 0; k <= 30; ++k) {
        auto i = p_k_class(m, k1, k);
        lo += i.lo;
        hi += i.hi;
    }
    CHECK(lo <= 1 + 1e-12);
    CHECK(hi >= 1 - 1e-12);
    CHECK(1 - lo < 1e-6);

    // Rank 1 cannot tell connected graphs apart: a single class holding all mass.
    EquivClassId any{1, Structure(Graph(1)), ""};
    CHECK(class_members(m, any).size() == m.terms.size());
    CHECK_THROWS_AS(class_members(m, EquivClassId{2, Structure(Graph(2)), ""}), InputError);
}

TEST_CASE("profiles", "[limit]") {
    auto planar = planar_class();
    auto m = build_component_model(planar, 5);

    auto one = build_profile_space(m, 1);
    REQUIRE(one.classes.size() == 1);
    CHECK(one.classes[0].cap == 1);
    CHECK(enumerate_profiles(one).size() == 2);

    auto sp = build_profile_space(m, 2);
    auto all = enumerate_profiles(sp);
    uint64_t expect = 1;
    for (auto& pc : sp.classes) expect *= static_cast<uint64_t>(pc.cap) + 1;
    REQUIRE(all.size() == expect);
    double sum = 0;
    for (auto& p : all) {
        sum += p.probability;
        for (size_t i = 0; i < p.counts.size(); ++i) REQUIRE(p.counts[i] <= sp.classes[i].cap);
    }
    const double slack = 1 - std::exp(-m.tailEstimate);
    CHECK(std::abs(sum - 1) <= slack + 1e-12);
    CHECK(slack < 1e-3);
    double zero = 1;
    for (auto& pc : sp.classes) zero *= std::exp(-pc.lambda);
    CHECK(all.front().probability == Catch::Approx(zero));
    for (size_t i = 1; i < sp.classes.size(); ++i) CHECK(sp.classes[i - 1].lambda >= sp.classes[i].lambda);
}

TEST_CASE("graphs matching one profile are equivalent", "[limit]") {
    auto planar = planar_class();
    auto model = build_component_model(planar, 3);
    const Graph giant = cycle_graph(5);
    for (int m = 1; m <= 2; ++m) {
        auto sp = build_profile_space(model, m);
        size_t checked = 0;
        for (auto& prof : enumerate_profiles(sp)) {
            // Same profile, different members and more copies beyond the cap.
            Graph a(0), b(0);
            for (size_t i = 0; i < sp.classes.size(); ++i) {
                const auto& pc = sp.classes[i];
                const int extra = prof.counts[i] == pc.cap ? 1 : 0;
                for (int k = 0; k < prof.counts[i]; ++k) a = disjoint_sum(a, pc.rep);
                for (int k = 0; k < prof.counts[i] + extra; ++k)
                    b = disjoint_sum(b, model.terms[pc.members[static_cast<size_t>(k) % pc.members.size()]].graph);
            }
            if (a.order() + giant.order() > 18 || b.order() + giant.order() > 18) continue;
            INFO("m = " << m);
            REQUIRE(equivalent_m(a, b, m));
            REQUIRE(equivalent_m(disjoint_sum(giant, a), disjoint_sum(giant, b), m));
            ++checked;
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("limit probability examples", "[limit]") {
    auto planar = planar_class();
    auto nonempty = limit_probability(F(sentences::kNonempty), planar);
    CHECK(nonempty.probability.lo > 1 - 1e-6);
    CHECK(nonempty.probability.hi == 1.0);

    auto iso = limit_probability(F(sentences::kIsolatedVertex), planar);
    const double closed = 1 - std::exp(-1 / kGamma);
    CHECK(iso.probability.contains(closed));
    CHECK(std::abs(iso.probability.lo - 0.036063) < 1e-4);
    CHECK(iso.probability.width() < 1e-4);
    CHECK(!iso.giant.truth);
    CHECK(!iso.implyingProfiles.empty());

    auto conn = limit_probability(F(sentences::kConnected), planar);
    CHECK(std::abs(conn.probability.lo - 0.963254) < 1e-5);
    CHECK(conn.giant.truth);
    CHECK(conn.probability.lo >= std::exp(-0.5));

    auto j = to_json(conn);
    CHECK(j["class"] == "planar");
    CHECK(j["m"] == 3);
    CHECK(j["constants"]["gamma"] == kGamma);
    CHECK(j["censusSizeBound"] == 5);
    CHECK(j["interval"].size() == 2);

    CHECK_THROWS_AS(limit_probability(F("ex x. E(x,y)"), planar), InputError);
    LimitConfig low;
    low.rank = 1;
    CHECK_THROWS_AS(limit_probability(F(sentences::kIsolatedVertex), planar, low), InputError);
    LimitConfig bad;
    bad.mode = "fast";
    CHECK_THROWS_AS(limit_probability(F(sentences::kNonempty), planar, bad), InputError);
}

TEST_CASE("complements, bands and zero-one consistency", "[limit]") {
    auto planar = planar_class();
    auto cstar = clustering_bound(planar);
    CHECK(std::abs(cstar.lo - 0.036746) < 2e-6);
    for (auto& text : kSuite) {
        INFO(text);
        auto phi = F(text.c_str());
        auto neg = F(("!(" + text + ")").c_str());
        auto a = limit_probability(phi, planar);
        auto b = limit_probability(neg, planar);
        const double slackA = a.probability.width(), slackB = b.probability.width();
        CHECK(std::abs(a.probability.lo + b.probability.hi - 1) <= slackA + slackB + 1e-12);
        CHECK(a.probability.lo <= a.probability.hi);
        CHECK((a.probability.lo >= 0 && a.probability.hi <= 1));
        // Every limit lies in [0, c] or [1 - c, 1].
        const bool low = a.probability.hi <= cstar.hi + 1e-9;
        const bool high = a.probability.lo >= 1 - cstar.hi - 1e-9;
        CHECK((low || high));
        int z = zero_one_connected(phi, planar);
        CHECK(z + zero_one_connected(neg, planar) == 1);
        if (z == 1) CHECK(a.probability.lo >= 1 - cstar.hi - 1e-9);
        else CHECK(a.probability.hi <= cstar.hi + 1e-9);
    }
}

TEST_CASE("zero-one verdicts", "[limit]") {
    auto planar = planar_class();
    CHECK(zero_one_connected(F(sentences::kConnected), planar) == 1);
    CHECK(zero_one_connected(F(sentences::kIsolatedVertex), planar) == 0);
    CHECK(zero_one_connected(F(sentences::kNonempty), planar) == 1);
    CHECK(zero_one_connected(F("!(ex x. all y. !E(x,y))"), planar) == 1);

    LimitConfig tiny;
    tiny.mode = "exact-tiny";
    CHECK(zero_one_connected(F(sentences::kConnected), planar, tiny) == 1);
    CHECK(zero_one_connected(F(sentences::kIsolatedVertex), planar, tiny) == 0);
    auto g = giant_truth(F(sentences::kIsolatedVertex), planar, 2, tiny);
    CHECK(g.confidence == "exact-tiny");
    REQUIRE(g.giant.graph);
    CHECK(g.giant.graph->order() >= 2);
    LimitConfig four = tiny;
    four.rank = 4;
    CHECK_THROWS_AS(zero_one_connected(F(sentences::kNonempty), planar, four), FeasibilityError);

    LimitConfig emp;
    emp.mode = "empirical";
    emp.empiricalOrder = 16;
    emp.empiricalSamples = 60;
    CHECK(zero_one_connected(F(sentences::kIsolatedVertex), planar, emp) == 0);
    CHECK(zero_one_connected(F("ex x. ex y. E(x,y)"), planar, emp) == 1);
    // A sentence that splits small connected samples: some vertex is a leaf.
    emp.empiricalOrder = 8;
    emp.empiricalSamples = 200;
    auto leafy = F("ex x. ex y. (E(x,y) & all z. (E(x,z) -> z = y))");
    CHECK_THROWS_AS(zero_one_connected(leafy, planar, emp), InconclusiveError);
}

TEST_CASE("typed universal agrees with the explicit universal", "[limit]") {
    auto planar = planar_class();
    std::lock_guard lock(shared_type_store_mutex());
    auto& store = shared_type_store();
    for (const char* text : {sentences::kIsolatedVertex, "all x. ex y. E(x,y)", sentences::kNonempty}) {
        auto phi = F(text);
        LimitConfig a;
        a.universeOrder = 2;
        LimitConfig b = a;
        b.mode = "exact-tiny";
        auto typed = giant_representative(store, phi, planar, quantifier_rank(phi), a);
        auto tiny = giant_representative(store, phi, planar, quantifier_rank(phi), b);
        REQUIRE(typed.type);
        REQUIRE(tiny.type);
        CHECK(typed.type->id == tiny.type->id);
        CHECK(typed_eval(store, *typed.type, phi) == eval(*tiny.graph, phi));
    }
}

TEST_CASE("truncation is monotone", "[limit]") {
    auto planar = planar_class();
    double prevWidth = 1, prevLower = 0;
    for (int s = 2; s <= 5; ++s) {
        LimitConfig cfg;
        cfg.sizeBound = s;
        auto r = limit_probability(F(sentences::kIsolatedVertex), planar, cfg);
        CHECK(r.lambdaTotal.lo >= prevLower);
        CHECK(r.probability.width() <= prevWidth + 1e-15);
        prevWidth = r.probability.width();
        prevLower = r.lambdaTotal.lo;
    }
}

TEST_CASE("connectivity is at least one over root e", "[limit]") {
    for (auto c : {planar_class(), forests_class(), treewidth_class(1)}) {
        LimitConfig cfg;
        cfg.sizeBound = 5;
        auto r = limit_probability(F(sentences::kConnected), c, cfg);
        INFO(c.name);
        CHECK(r.probability.hi >= std::exp(-0.5));
        CHECK(r.giant.truth);
    }
    auto forests = clustering_bound(forests_class(), 10);
    CHECK(std::abs(forests.lo - (1 - std::exp(-0.5))) < 0.01);
}
