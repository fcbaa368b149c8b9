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

// msolimit: batch front end for limits, zero-one verdicts, censuses,
// sampling, EF equivalence and model checking. Output is JSON.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "msol/census.hpp"
#include "msol/ef.hpp"
#include "msol/eval.hpp"
#include "msol/io.hpp"
#include "msol/limit.hpp"
#include "msol/logic.hpp"
#include "msol/sampler.hpp"

using nlohmann::ordered_json;
using namespace msol;

namespace {

// Everything that shapes a run; validated before work starts and echoed
// into the output unchanged.
struct RunConfig {
    std::vector<std::string> arguments;  // raw argv after the program name
    std::string command;
    std::string className = "planar";
    std::optional<int> k;
    int sizeBound = 5;
    std::optional<int> rank;
    std::string mode = "truncated";
    uint64_t seed = 1;
    std::optional<double> gamma;
    int threads = 1;
    std::string out;
    // command inputs
    std::vector<std::string> inputs;
    int n = 40;
    size_t count = 200;
    std::optional<uint64_t> burnin, thinning;
    int chains = 1;
    std::vector<std::string> queries;
    int empiricalOrder = 40;
    int empiricalSamples = 200;
};

ordered_json echo(const RunConfig& c) {
    ordered_json j;
    j["arguments"] = c.arguments;
    j["command"] = c.command;
    j["class"] = c.className;
    j["k"] = c.k ? ordered_json(*c.k) : ordered_json(nullptr);
    j["sizeBound"] = c.sizeBound;
    j["rank"] = c.rank ? ordered_json(*c.rank) : ordered_json(nullptr);
    j["mode"] = c.mode;
    j["seed"] = c.seed;
    j["gamma"] = c.gamma ? ordered_json(*c.gamma) : ordered_json(nullptr);
    j["threads"] = c.threads;
    j["out"] = c.out;
    j["inputs"] = c.inputs;
    if (c.command == "sample") {
        j["n"] = c.n;
        j["count"] = c.count;
        j["burnin"] = c.burnin ? ordered_json(*c.burnin) : ordered_json(nullptr);
        j["thinning"] = c.thinning ? ordered_json(*c.thinning) : ordered_json(nullptr);
        j["chains"] = c.chains;
        j["queries"] = c.queries;
    }
    if (c.mode == "empirical") {
        j["empiricalOrder"] = c.empiricalOrder;
        j["empiricalSamples"] = c.empiricalSamples;
    }
    return j;
}

GraphClass resolve_class(const RunConfig& c) {
    std::string name = c.className;
    if (c.k) {
        if (name == "treewidth") name = "treewidth(" + std::to_string(*c.k) + ")";
        else if (name == "minor-free") name = "minor-free(K" + std::to_string(*c.k) + ")";
        else throw InputError("--k applies to treewidth and minor-free only");
    } else if (name == "treewidth" || name == "minor-free") {
        throw InputError("class " + name + " needs --k");
    }
    GraphClass cls = class_by_name(name);
    if (c.gamma) cls = cls.with_gamma(*c.gamma);
    return cls;
}

void validate(const RunConfig& c) {
    check_mode(c.mode);
    if (c.sizeBound < 1) throw InputError("--size-bound must be at least 1");
    if (c.rank && *c.rank < 0) throw InputError("--rank must be non-negative");
    if (c.threads < 1) throw InputError("--threads must be at least 1");
    if (c.k && *c.k < 1) throw InputError("--k must be positive");
    if (c.count == 0 && c.command == "sample") throw InputError("--count must be positive");
    if (c.thinning && *c.thinning == 0) throw InputError("--thinning must be positive");
    if (c.chains < 1) throw InputError("--chains must be positive");
    resolve_class(c);
}

Formula read_sentence(const std::string& path) {
    Formula f = parse_formula(read_file(path));
    if (!is_sentence(f)) throw InputError("formula in " + path + " has free variables");
    return f;
}

LimitConfig limit_config(const RunConfig& c) {
    LimitConfig l;
    l.sizeBound = c.sizeBound;
    l.rank = c.rank;
    l.mode = c.mode;
    l.seed = c.seed;
    l.threads = c.threads;
    l.empiricalOrder = c.empiricalOrder;
    l.empiricalSamples = c.empiricalSamples;
    return l;
}

AppearanceQuery query_of(const std::string& q) {
    if (q == "K1") return {q, Structure::rooted(Graph(1), 1)};
    if (q == "K2") return {q, Structure::rooted(path_graph(2), 1)};
    if (q == "P3") return {q, Structure::rooted(path_graph(3), 1)};
    if (q == "K3") return {q, Structure::rooted(complete_graph(3), 1)};
    // A GRAPH v1 file rooted at vertex 1.
    Graph g = read_graph_file(q);
    if (g.order() < 1) throw InputError("query graph " + q + " is empty");
    return {std::filesystem::path(q).stem().string(), Structure::rooted(g, 1)};
}

ordered_json run(const RunConfig& c) {
    ordered_json out;
    out["config"] = echo(c);
    if (c.command == "limit") {
        auto r = limit_probability(read_sentence(c.inputs.at(0)), resolve_class(c), limit_config(c));
        out["result"] = to_json(r);
    } else if (c.command == "zeroone") {
        auto phi = read_sentence(c.inputs.at(0));
        auto cfg = limit_config(c);
        const int m = c.rank.value_or(quantifier_rank(phi));
        if (m < quantifier_rank(phi)) throw InputError("--rank is below the formula's quantifier rank");
        auto v = giant_truth(phi, resolve_class(c), m, cfg);
        ordered_json r;
        r["formula"] = to_string(phi);
        r["class"] = resolve_class(c).name;
        r["m"] = m;
        r["mode"] = c.mode;
        r["verdict"] = v.truth ? 1 : 0;
        r["confidence"] = v.confidence;
        if (v.giant.frequency) {
            r["frequency"] = to_json(*v.giant.frequency);
            r["sampleSize"] = v.giant.sampleSize;
            r["sampleOrder"] = v.giant.sampleOrder;
        } else {
            r["universeOrder"] = v.giant.universeOrder;
            r["copies"] = v.giant.copies;
        }
        out["result"] = r;
    } else if (c.command == "census") {
        auto cls = resolve_class(c);
        if (c.sizeBound > census_order_limit(cls))
            throw FeasibilityError("census for " + cls.name + " is limited to order " +
                                   std::to_string(census_order_limit(cls)));
        out["result"] = to_json(build_census(cls, c.sizeBound));
    } else if (c.command == "sample") {
        std::vector<AppearanceQuery> qs;
        for (auto& q : c.queries) qs.push_back(query_of(q));
        out["result"] = to_json(run_report(resolve_class(c), c.n, c.count, c.burnin, c.thinning, qs, c.seed, c.chains));
    } else if (c.command == "ef") {
        if (!c.rank) throw InputError("ef needs --rank");
        Graph a = read_graph_file(c.inputs.at(0)), b = read_graph_file(c.inputs.at(1));
        ordered_json r;
        r["m"] = *c.rank;
        r["equivalent"] = equivalent_m(a, b, *c.rank);
        out["result"] = r;
    } else if (c.command == "check") {
        Graph g = read_graph_file(c.inputs.at(0));
        auto phi = read_sentence(c.inputs.at(1));
        ordered_json r;
        r["formula"] = to_string(phi);
        r["satisfied"] = eval(g, phi);
        out["result"] = r;
    }
    return out;
}

void emit(const ordered_json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << text;
}

ordered_json error_json(const std::string& kind, const std::string& message, int code,
                        const RunConfig* c = nullptr) {
    ordered_json j;
    if (c) j["config"] = echo(*c);
    ordered_json e;
    e["kind"] = kind;
    e["message"] = message;
    e["exitCode"] = code;
    j["error"] = e;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limit laws for monadic second-order sentences on random graphs from addable classes"};
    app.require_subcommand(1);
    RunConfig c;
    for (int i = 1; i < argc; ++i) c.arguments.emplace_back(argv[i]);

    auto common = [&](CLI::App* s, bool classOpts) {
        if (classOpts) {
            s->add_option("--class", c.className, "planar, forests, treewidth, minor-free or a full name like treewidth(2)");
            s->add_option("--k", c.k, "parameter for treewidth (k) or minor-free (K_k)");
            s->add_option("--gamma", c.gamma, "growth constant override");
        }
        s->add_option("--size-bound", c.sizeBound, "census / component size bound s");
        s->add_option("--seed", c.seed, "random seed");
        s->add_option("--threads", c.threads, "worker cap");
        s->add_option("--out", c.out, "write JSON here instead of stdout");
    };

    auto* limit = app.add_subcommand("limit", "limiting probability of a sentence");
    limit->add_option("formula", c.inputs, "formula file")->required()->expected(1);
    common(limit, true);
    limit->add_option("--rank", c.rank, "rank m (at least the formula's quantifier rank)");
    limit->add_option("--mode", c.mode, "truncated, exact-tiny or empirical");
    limit->add_option("--empirical-order", c.empiricalOrder, "order of sampled giants");
    limit->add_option("--empirical-samples", c.empiricalSamples, "number of sampled giants");

    auto* zeroone = app.add_subcommand("zeroone", "zero-one verdict over connected members");
    zeroone->add_option("formula", c.inputs, "formula file")->required()->expected(1);
    common(zeroone, true);
    zeroone->add_option("--rank", c.rank, "rank m");
    zeroone->add_option("--mode", c.mode, "truncated, exact-tiny or empirical");
    zeroone->add_option("--empirical-order", c.empiricalOrder, "order of sampled giants");
    zeroone->add_option("--empirical-samples", c.empiricalSamples, "number of sampled giants");

    auto* census = app.add_subcommand("census", "connected members up to isomorphism");
    common(census, true);

    auto* sample = app.add_subcommand("sample", "sample members and report statistics");
    common(sample, true);
    sample->add_option("--n", c.n, "order");
    sample->add_option("--count", c.count, "sample size");
    sample->add_option("--burnin", c.burnin, "chain burn-in steps");
    sample->add_option("--thinning", c.thinning, "chain steps between samples");
    sample->add_option("--chains", c.chains, "independent chains");
    sample->add_option("--query", c.queries, "rooted structure: K1, K2, P3, K3 or a GRAPH v1 file rooted at 1");

    auto* ef = app.add_subcommand("ef", "rank-m equivalence of two graphs");
    ef->add_option("graphs", c.inputs, "two GRAPH v1 files")->required()->expected(2);
    ef->add_option("--rank", c.rank, "rank m")->required();
    ef->add_option("--out", c.out, "write JSON here instead of stdout");

    auto* check = app.add_subcommand("check", "evaluate a sentence on a graph");
    check->add_option("inputs", c.inputs, "GRAPH v1 file and formula file")->required()->expected(2);
    check->add_option("--out", c.out, "write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit(error_json("usage", e.what(), 2), "");
        return 2;
    }
    for (auto* s : app.get_subcommands()) c.command = s->get_name();

    try {
        validate(c);
        emit(run(c), c.out);
        return 0;
    } catch (const ParseError& e) {
        auto j = error_json(e.kind(), e.what(), e.exit_code(), &c);
        j["error"]["line"] = e.line();
        j["error"]["column"] = e.column();
        emit(j, c.out);
        return e.exit_code();
    } catch (const Error& e) {
        emit(error_json(e.kind(), e.what(), e.exit_code(), &c), c.out);
        return e.exit_code();
    } catch (const std::exception& e) {
        emit(error_json("internal", e.what(), 1, &c), c.out);
        return 1;
    }
}
