// Copyright 2026 Chainlab Developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "chainlab/compile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "chainlab/spectral.hpp"
#include "json.hpp"

namespace chainlab {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= p[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string embedding_id(const Embedding& emb) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const auto& chain : emb.chains) {
        hash = fnv1a(chain.data(), chain.size() * sizeof(int), hash);
        hash = fnv1a("|", 1, hash);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "emb-%zu-%016llx", emb.chains.size(),
                  static_cast<unsigned long long>(hash));
    return buf;
}

void require_valid(const Instance& inst, const Embedding& emb, const PhysicalGraph& graph) {
    const ValidationReport report = validate(emb, inst, graph);
    if (report.pass()) return;
    std::string msg = "embedding does not fit the instance:";
    if (!report.chain_count_matches) msg += " chain count mismatch;";
    if (!report.overlapping_qubits.empty()) msg += " chains overlap;";
    if (!report.invalid_qubits.empty()) msg += " missing qubits;";
    if (!report.broken_chains.empty()) msg += " disconnected chains;";
    if (!report.uncovered_edges.empty()) msg += " uncovered logical couplings;";
    throw std::invalid_argument(msg);
}

// Spreads fields and (already reweighted) couplings over the hardware.
PhysicalProblem spread(const Instance& inst, const Embedding& emb, const PhysicalGraph& graph,
                       double lambda, const std::vector<double>& coupling, Provenance prov) {
    PhysicalProblem out;
    out.lambda = lambda;
    prov.instance_id = inst.id();
    prov.embedding_id = embedding_id(emb);
    prov.grid_size = graph.grid_size();
    out.provenance = std::move(prov);

    for (int a = 0; a < inst.n; ++a) {
        const auto& chain = emb.chains[a];
        const double share = inst.h[a] / static_cast<double>(chain.size());
        for (int q : chain) out.h.emplace_back(q, share);
        for (std::size_t i = 0; i + 1 < chain.size(); ++i)
            out.chain_couplers.emplace_back(std::min(chain[i], chain[i + 1]),
                                            std::max(chain[i], chain[i + 1]));
    }
    for (std::size_t e = 0; e < inst.j.size(); ++e) {
        const auto& [a, b, v] = inst.j[e];
        (void)v;
        const auto couplers = connecting_couplers(graph, emb.chains[a], emb.chains[b]);
        const double share = coupling[e] / static_cast<double>(couplers.size());
        for (const auto& [qa, qb] : couplers)
            out.j.emplace_back(std::min(qa, qb), std::max(qa, qb), share);
    }
    std::sort(out.h.begin(), out.h.end());
    std::sort(out.j.begin(), out.j.end());
    std::sort(out.chain_couplers.begin(), out.chain_couplers.end());
    return out;
}

const char* method_name(CompensationMethod m) {
    switch (m) {
        case CompensationMethod::None: return "none";
        case CompensationMethod::Susceptibility: return "susceptibility";
        case CompensationMethod::Spectral: return "spectral";
    }
    return "none";
}

}  // namespace

double chain_strength(const Instance& inst, double lambda0) {
    if (lambda0 <= 0.0) throw std::invalid_argument("chain strength prefactor must be positive");
    if (inst.n < 2) throw std::invalid_argument("chain strength needs at least two variables");
    double sumsq = 0.0;
    for (const auto& [a, b, v] : inst.j) sumsq += v * v;
    const double pairs = 0.5 * inst.n * (inst.n - 1);
    const double sigma_sq = sumsq / pairs;
    return lambda0 * std::sqrt(sigma_sq * inst.n);
}

PhysicalProblem uniform_spread(const Instance& inst, const Embedding& emb,
                               const PhysicalGraph& graph, double lambda) {
    require_valid(inst, emb, graph);
    std::vector<double> coupling(inst.j.size());
    for (std::size_t e = 0; e < inst.j.size(); ++e) coupling[e] = std::get<2>(inst.j[e]);
    return spread(inst, emb, graph, lambda, coupling, Provenance{});
}

double chi_pair(const Embedding& emb, const PhysicalGraph& graph, int a, int b, double xi) {
    if (xi <= 0.0) throw std::invalid_argument("correlation length must be positive");
    const auto& ca = emb.chains.at(a);
    const auto& cb = emb.chains.at(b);
    for (const auto* chain : {&ca, &cb}) {
        if (chain->empty()) throw std::invalid_argument("empty chain");
        for (std::size_t i = 0; i + 1 < chain->size(); ++i)
            if (!graph.has_coupler((*chain)[i], (*chain)[i + 1]))
                throw std::invalid_argument("chain path is disconnected");
    }
    const auto pos = connecting_positions(graph, ca, cb);
    if (pos.empty()) throw std::invalid_argument("chains share no coupler");

    const double la = static_cast<double>(ca.size());
    const double lb = static_cast<double>(cb.size());
    double log_sum = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < cb.size(); ++j) {
            double acc = 0.0;
            for (const auto& [pi, pj] : pos) {
                const double d = std::abs(static_cast<int>(i) - pi) +
                                 std::abs(static_cast<int>(j) - pj);
                acc += std::exp(-d / xi);
            }
            log_sum += std::log(acc / static_cast<double>(pos.size()));
        }
    return std::exp(log_sum / (la * lb));
}

PhysicalProblem compensate(const Instance& inst, const Embedding& emb, const PhysicalGraph& graph,
                           double lambda, const CompensationConfig& config) {
    require_valid(inst, emb, graph);
    Provenance prov;
    prov.method = method_name(config.method);
    prov.xi = config.xi;
    prov.gamma = config.gamma;

    std::vector<double> coupling(inst.j.size());
    for (std::size_t e = 0; e < inst.j.size(); ++e) coupling[e] = std::get<2>(inst.j[e]);

    if (config.method != CompensationMethod::None && !inst.j.empty()) {
        std::vector<double> log_chi(inst.j.size());
        if (config.method == CompensationMethod::Susceptibility) {
            for (std::size_t e = 0; e < inst.j.size(); ++e) {
                const auto& [a, b, v] = inst.j[e];
                (void)v;
                log_chi[e] = std::log(chi_pair(emb, graph, a, b, config.xi));
            }
        } else {
            const auto chi = spectral_edge_chi(inst, emb, graph, lambda, config.gamma);
            for (std::size_t e = 0; e < chi.size(); ++e) log_chi[e] = std::log(chi[e]);
        }
        double mean_log = 0.0;
        for (double lc : log_chi) mean_log += lc;
        mean_log /= static_cast<double>(log_chi.size());
        // ratio = exp(mean_log - log_chi): exactly one when chi == 1
        // everywhere, so the infinite-xi limit reproduces uniform spreading
        // bit for bit.
        for (std::size_t e = 0; e < inst.j.size(); ++e)
            coupling[e] *= std::exp(mean_log - log_chi[e]);
    }
    return spread(inst, emb, graph, lambda, coupling, std::move(prov));
}

PhysicalProblem rescale(const PhysicalProblem& problem) {
    double max_j = 0.0, max_h = 0.0;
    for (const auto& [a, b, v] : problem.j) {
        (void)a, (void)b;
        max_j = std::max(max_j, std::abs(v));
    }
    for (const auto& [q, v] : problem.h) {
        (void)q;
        max_h = std::max(max_h, std::abs(v));
    }
    double r = std::numeric_limits<double>::infinity();
    if (problem.lambda > 0.0) r = std::min(r, 2.0 / problem.lambda);
    if (max_j > 0.0) r = std::min(r, 1.0 / max_j);
    if (max_h > 0.0) r = std::min(r, 2.0 / max_h);
    if (!std::isfinite(r)) throw std::invalid_argument("rescale undefined for an all-zero problem");
    PhysicalProblem out = problem;
    out.rescale_factor = r;
    return out;
}

std::vector<int> live_qubits(const PhysicalProblem& problem) {
    std::vector<int> out;
    for (const auto& [q, v] : problem.h) {
        (void)v;
        out.push_back(q);
    }
    for (const auto& [a, b, v] : problem.j) {
        (void)v;
        out.push_back(a);
        out.push_back(b);
    }
    for (const auto& [a, b] : problem.chain_couplers) {
        out.push_back(a);
        out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SpinVector chain_aligned(const Embedding& emb, const SpinVector& x, int num_qubits) {
    if (x.size() != emb.chains.size())
        throw std::invalid_argument("logical state length does not match chain count");
    SpinVector z(num_qubits, 0);
    for (std::size_t a = 0; a < emb.chains.size(); ++a)
        for (int q : emb.chains[a]) z[q] = x[a];
    return z;
}

double physical_energy(const PhysicalProblem& problem, const SpinVector& z) {
    double e = 0.0;
    for (const auto& [qa, qb, v] : problem.j) e += v * z[qa] * z[qb];
    for (const auto& [qa, qb] : problem.chain_couplers) e -= problem.lambda * z[qa] * z[qb];
    for (const auto& [q, v] : problem.h) e += v * z[q];
    return problem.rescale_factor * e;
}

std::string PhysicalProblem::to_json() const {
    nlohmann::json out;
    auto& hh = out["h"] = nlohmann::json::array();
    for (const auto& [q, v] : h) hh.push_back({q, v});
    auto& jj = out["j"] = nlohmann::json::array();
    for (const auto& [qa, qb, v] : j) jj.push_back({qa, qb, v});
    out["lambda"] = lambda;
    out["R"] = rescale_factor;
    auto& cc = out["chain_couplers"] = nlohmann::json::array();
    for (const auto& [qa, qb] : chain_couplers) cc.push_back({qa, qb});
    out["provenance"] = nlohmann::json::parse(provenance.to_json());
    return out.dump(2);
}

std::string Provenance::to_json() const {
    nlohmann::json prov;
    prov["instance_id"] = instance_id;
    prov["embedding_id"] = embedding_id;
    prov["method"] = method;
    if (std::isfinite(xi))
        prov["xi"] = xi;
    else
        prov["xi"] = "inf";
    prov["gamma"] = gamma;
    prov["grid_size"] = grid_size;
    return prov.dump(2);
}

Provenance Provenance::from_json(const std::string& text) {
    const auto prov = nlohmann::json::parse(text);
    Provenance out;
    out.instance_id = prov.at("instance_id").get<std::string>();
    out.embedding_id = prov.at("embedding_id").get<std::string>();
    out.method = prov.at("method").get<std::string>();
    if (prov.at("xi").is_string())
        out.xi = std::numeric_limits<double>::infinity();
    else
        out.xi = prov.at("xi").get<double>();
    out.gamma = prov.at("gamma").get<double>();
    out.grid_size = prov.at("grid_size").get<int>();
    return out;
}

PhysicalProblem PhysicalProblem::from_json(const std::string& text) {
    const auto in = nlohmann::json::parse(text);
    PhysicalProblem out;
    for (const auto& e : in.at("h"))
        out.h.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    for (const auto& e : in.at("j"))
        out.j.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
    out.lambda = in.at("lambda").get<double>();
    out.rescale_factor = in.at("R").get<double>();
    for (const auto& e : in.at("chain_couplers"))
        out.chain_couplers.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    out.provenance = Provenance::from_json(in.at("provenance").dump());
    return out;
}

}  // namespace chainlab
