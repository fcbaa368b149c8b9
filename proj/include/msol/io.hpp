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

// GRAPH v1 text format and the structure JSON encoding.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "msol/errors.hpp"
#include "msol/graph.hpp"

namespace msol {

using json = nlohmann::json;

/// Emits `graph <n>` then `edge <u> <v>` per edge, edges sorted.
inline std::string write_graph(const Graph& g) {
    std::string out = "graph " + std::to_string(g.order()) + "\n";
    for (auto [u, v] : g.edges()) out += "edge " + std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

inline Graph read_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    int n = -1;
    std::vector<Edge> es;
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "graph") {
            if (n >= 0) throw ParseError("duplicate graph header", lineNo, 1);
            if (!(ls >> n) || n < 0) throw ParseError("expected vertex count", lineNo, 7);
        } else if (word == "edge") {
            if (n < 0) throw ParseError("edge before graph header", lineNo, 1);
            int u = 0, v = 0;
            if (!(ls >> u >> v)) throw ParseError("expected two endpoints", lineNo, 6);
            es.emplace_back(u, v);
        } else {
            throw ParseError("unknown directive '" + word + "'", lineNo, 1);
        }
        if (ls >> word) throw ParseError("trailing tokens", lineNo, 1);
    }
    if (n < 0) throw ParseError("missing graph header", lineNo, 1);
    return Graph(n, std::move(es));
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Graph read_graph_file(const std::string& path) { return read_graph(read_file(path)); }

inline json to_json(const Graph& g) {
    json edges = json::array();
    for (auto [u, v] : g.edges()) edges.push_back({u, v});
    return {{"n", g.order()}, {"edges", edges}};
}

inline json to_json(const Structure& s) {
    json j = to_json(s.graph);
    j["fo"] = json::object();
    for (auto& [k, v] : s.fo) j["fo"][k] = v;
    j["so"] = json::object();
    for (auto& [k, vs] : s.so) j["so"][k] = vs;
    return j;
}

inline Structure structure_from_json(const json& j) {
    try {
        int n = j.at("n").get<int>();
        std::vector<Edge> es;
        for (auto& e : j.at("edges")) es.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        Structure s(Graph(n, std::move(es)));
        if (j.contains("fo"))
            for (auto& [k, v] : j.at("fo").items()) s.fo[k] = v.get<int>();
        if (j.contains("so"))
            for (auto& [k, v] : j.at("so").items()) s.so[k] = v.get<std::vector<int>>();
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed structure JSON: ") + e.what());
    }
}

} // namespace msol
