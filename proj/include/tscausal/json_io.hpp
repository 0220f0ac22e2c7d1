#pragma once

// JSON round-trips for discovery graphs and synthetic model specs. Key order
// is fixed by insertion so serialized output is byte-stable for a given run.

#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"

#include "tscausal/errors.hpp"
#include "tscausal/pcmci.hpp"
#include "tscausal/synthgen.hpp"

namespace tscausal {

using ordered_json = nlohmann::ordered_json;

inline void save_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw io_error("write failure on '" + path + "'");
}

inline ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error("'" + path + "': " + e.what());
    }
}

inline ordered_json graph_to_json(const TimeSeriesGraph& g) {
    ordered_json j;
    j["method"] = g.method;
    j["test"] = g.test;
    j["n_vars"] = g.n_vars;
    j["tau_max"] = g.tau_max;
    j["contemporaneous"] = g.contemporaneous;
    ordered_json links = ordered_json::array();
    for (const LinkResult& l : g.links) {
        if (!l.tested) continue;
        ordered_json e;
        e["source"] = l.source;
        e["lag"] = l.lag;
        e["target"] = l.target;
        e["stat"] = l.stat;
        e["p"] = l.p;
        if (std::isfinite(l.q)) e["q"] = l.q;
        e["decided"] = l.decided;
        if (l.undirected) e["undirected"] = true;
        links.push_back(std::move(e));
    }
    j["links"] = std::move(links);
    return j;
}

inline TimeSeriesGraph graph_from_json(const ordered_json& j) {
    try {
        TimeSeriesGraph g;
        g.method = j.at("method").get<std::string>();
        g.test = j.at("test").get<std::string>();
        g.n_vars = j.at("n_vars").get<int>();
        g.tau_max = j.at("tau_max").get<int>();
        g.contemporaneous = j.at("contemporaneous").get<bool>();
        if (g.n_vars < 1 || g.tau_max < 1) throw parse_error("graph: bad dimensions");
        g.links.resize(size_t(g.n_vars) * size_t(g.tau_max) * size_t(g.n_vars));
        for (std::size_t idx = 0; idx < g.links.size(); ++idx) {
            const int source = int(idx) / (g.tau_max * g.n_vars);
            const int rem = int(idx) % (g.tau_max * g.n_vars);
            g.links[idx].source = source;
            g.links[idx].lag = rem / g.n_vars + 1;
            g.links[idx].target = rem % g.n_vars;
        }
        for (const auto& e : j.at("links")) {
            LinkResult l;
            l.source = e.at("source").get<int>();
            l.lag = e.at("lag").get<int>();
            l.target = e.at("target").get<int>();
            l.stat = e.at("stat").get<double>();
            l.p = e.at("p").get<double>();
            if (e.contains("q")) l.q = e.at("q").get<double>();
            l.decided = e.at("decided").get<bool>();
            l.undirected = e.value("undirected", false);
            l.tested = true;
            if (l.lag == 0) {
                g.links.push_back(l);
            } else {
                if (l.source < 0 || l.source >= g.n_vars || l.target < 0 ||
                    l.target >= g.n_vars || l.lag > g.tau_max)
                    throw parse_error("graph: link outside the (n_vars, tau_max) frame");
                g.links[size_t(g.lagged_index(l.source, l.lag, l.target))] = l;
            }
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("graph json: ") + e.what());
    }
}

inline std::string to_string(LinkFunc f) {
    switch (f) {
        case LinkFunc::f1: return "f1";
        case LinkFunc::f2: return "f2";
        default: return "f3";
    }
}

inline LinkFunc link_func_from_string(const std::string& s) {
    if (s == "f1") return LinkFunc::f1;
    if (s == "f2") return LinkFunc::f2;
    if (s == "f3") return LinkFunc::f3;
    throw parse_error("unknown link function tag '" + s + "'");
}

inline ordered_json spec_to_json(const SyntheticModelSpec& spec) {
    ordered_json j;
    j["N"] = spec.n_vars;
    j["L"] = spec.n_links;
    ordered_json links = ordered_json::array();
    for (const ModelLink& l : spec.links) {
        ordered_json e;
        e["i"] = l.i;
        e["j"] = l.j;
        e["tau"] = l.tau;
        e["coeff"] = l.coeff;
        e["func"] = to_string(l.func);
        links.push_back(std::move(e));
    }
    j["links"] = std::move(links);
    j["autos"] = spec.autos;
    j["obs_noise_sd"] = spec.obs_noise_sd;
    j["seed"] = spec.seed;
    return j;
}

inline SyntheticModelSpec spec_from_json(const ordered_json& j) {
    try {
        SyntheticModelSpec spec;
        spec.n_vars = j.at("N").get<int>();
        spec.n_links = j.at("L").get<int>();
        for (const auto& e : j.at("links")) {
            ModelLink l;
            l.i = e.at("i").get<int>();
            l.j = e.at("j").get<int>();
            l.tau = e.at("tau").get<int>();
            l.coeff = e.at("coeff").get<double>();
            l.func = link_func_from_string(e.at("func").get<std::string>());
            if (l.i == l.j) throw parse_error("model spec: self cross-link");
            if (l.tau != 1 && l.tau != 2) throw parse_error("model spec: lag outside {1,2}");
            spec.links.push_back(l);
        }
        spec.autos = j.at("autos").get<std::vector<double>>();
        if (int(spec.autos.size()) != spec.n_vars)
            throw parse_error("model spec: autos length != N");
        spec.obs_noise_sd = j.at("obs_noise_sd").get<double>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("model spec json: ") + e.what());
    }
}

}  // namespace tscausal
