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

#include "chainlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "chainlab/rng.hpp"
#include "json.hpp"

namespace chainlab {

namespace {

const char* mode_name(SampleMode mode) {
    return mode == SampleMode::Anneal ? "anneal" : "equilibrium";
}

SampleMode mode_from(const std::string& name) {
    if (name == "anneal") return SampleMode::Anneal;
    if (name == "equilibrium") return SampleMode::Equilibrium;
    throw std::invalid_argument("unknown sampler mode: " + name);
}

void validate(const SamplerParams& p) {
    if (p.num_reads < 1) throw std::invalid_argument("sampler: num_reads must be positive");
    if (p.sweeps < 1) throw std::invalid_argument("sampler: sweeps must be positive");
    if (p.mode == SampleMode::Anneal) {
        if (!(p.beta_start > 0.0) || !(p.beta_end >= p.beta_start))
            throw std::invalid_argument("sampler: need beta_end >= beta_start > 0");
    } else if (!(p.beta > 0.0)) {
        throw std::invalid_argument("sampler: equilibrium beta must be positive");
    }
}

// Programmed problem flattened to contiguous local indices.
struct Lattice {
    std::vector<int> qubits;
    std::vector<double> field;
    std::vector<std::vector<std::pair<int, double>>> adj;
    // connected components of the chain-coupler graph, each with the weighted
    // couplers internal to it; singletons are dropped
    std::vector<std::vector<int>> groups;
    std::vector<std::vector<std::tuple<int, int, double>>> group_bonds;

    explicit Lattice(const PhysicalProblem& problem) {
        const double r = problem.rescale_factor;
        qubits = live_qubits(problem);
        if (qubits.empty()) throw std::invalid_argument("sampler: the problem is empty");

        std::unordered_map<int, int> local;
        local.reserve(qubits.size());
        for (std::size_t i = 0; i < qubits.size(); ++i) local.emplace(qubits[i], static_cast<int>(i));

        field.assign(qubits.size(), 0.0);
        adj.assign(qubits.size(), {});
        for (const auto& [q, v] : problem.h) field[static_cast<std::size_t>(local.at(q))] += r * v;
        auto couple = [&](int a, int b, double w) {
            const int ia = local.at(a), ib = local.at(b);
            adj[static_cast<std::size_t>(ia)].emplace_back(ib, w);
            adj[static_cast<std::size_t>(ib)].emplace_back(ia, w);
        };
        for (const auto& [a, b, v] : problem.j) couple(a, b, r * v);
        for (const auto& [a, b] : problem.chain_couplers) couple(a, b, -r * problem.lambda);

        // chains as union-find components over the chain couplers
        std::vector<int> parent(qubits.size());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        for (const auto& [a, b] : problem.chain_couplers)
            parent[static_cast<std::size_t>(find(local.at(a)))] = find(local.at(b));

        std::unordered_map<int, int> group_of;
        for (const auto& [a, b] : problem.chain_couplers) {
            const int root = find(local.at(a));
            auto it = group_of.find(root);
            if (it == group_of.end()) {
                it = group_of.emplace(root, static_cast<int>(groups.size())).first;
                groups.emplace_back();
                group_bonds.emplace_back();
            }
            group_bonds[static_cast<std::size_t>(it->second)].emplace_back(
                local.at(a), local.at(b), -r * problem.lambda);
        }
        for (std::size_t i = 0; i < qubits.size(); ++i) {
            const auto it = group_of.find(find(static_cast<int>(i)));
            if (it != group_of.end())
                groups[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(i));
        }
        // logical couplers landing inside one component are internal too
        for (const auto& [a, b, v] : problem.j) {
            const int ra = find(local.at(a)), rb = find(local.at(b));
            if (ra != rb) continue;
            const auto it = group_of.find(ra);
            if (it != group_of.end())
                group_bonds[static_cast<std::size_t>(it->second)].emplace_back(local.at(a),
                                                                               local.at(b), r * v);
        }
    }

    double energy(const SpinVector& z) const {
        double e = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double nb = 0.0;
            for (const auto& [j, w] : adj[i]) nb += w * z[static_cast<std::size_t>(j)];
            e += z[i] * (0.5 * nb + field[i]);
        }
        return e;
    }
};

}  // namespace

std::string SamplerParams::to_json() const {
    nlohmann::json doc;
    doc["num_reads"] = num_reads;
    doc["mode"] = mode_name(mode);
    doc["sweeps"] = sweeps;
    doc["beta_start"] = beta_start;
    doc["beta_end"] = beta_end;
    doc["beta"] = beta;
    doc["seed"] = seed;
    return doc.dump(2);
}

SamplerParams SamplerParams::from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    SamplerParams p;
    p.num_reads = doc.at("num_reads").get<int>();
    p.mode = mode_from(doc.at("mode").get<std::string>());
    p.sweeps = doc.at("sweeps").get<int>();
    p.beta_start = doc.at("beta_start").get<double>();
    p.beta_end = doc.at("beta_end").get<double>();
    p.beta = doc.at("beta").get<double>();
    p.seed = doc.at("seed").get<std::uint64_t>();
    return p;
}

int SampleSet::qubit_index(int qubit) const {
    const auto it = std::lower_bound(qubits.begin(), qubits.end(), qubit);
    if (it == qubits.end() || *it != qubit) return -1;
    return static_cast<int>(it - qubits.begin());
}

SpinVector SampleSet::full(std::size_t read) const {
    SpinVector z(static_cast<std::size_t>(total_qubits), 0);
    const auto& s = samples.at(read);
    for (std::size_t i = 0; i < qubits.size(); ++i)
        z[static_cast<std::size_t>(qubits[i])] = s[i];
    return z;
}

std::string SampleSet::to_json() const {
    nlohmann::json doc;
    doc["provenance"] = nlohmann::json::parse(provenance.to_json());
    doc["total_qubits"] = total_qubits;
    doc["qubits"] = qubits;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : samples) {
        nlohmann::json row = nlohmann::json::array();
        for (Spin v : s) row.push_back(static_cast<int>(v));
        rows.push_back(std::move(row));
    }
    doc["samples"] = std::move(rows);
    doc["energies"] = energies;
    doc["params"] = nlohmann::json::parse(params.to_json());
    doc["streams"] = streams;
    return doc.dump(2);
}

SampleSet SampleSet::from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    SampleSet out;
    out.provenance = Provenance::from_json(doc.at("provenance").dump());
    out.total_qubits = doc.at("total_qubits").get<int>();
    out.qubits = doc.at("qubits").get<std::vector<int>>();
    for (const auto& row : doc.at("samples")) {
        SpinVector s;
        s.reserve(row.size());
        for (const auto& v : row) s.push_back(static_cast<Spin>(v.get<int>()));
        out.samples.push_back(std::move(s));
    }
    out.energies = doc.at("energies").get<std::vector<double>>();
    out.params = SamplerParams::from_json(doc.at("params").dump());
    out.streams = doc.at("streams").get<std::vector<std::uint64_t>>();
    return out;
}

SampleSet sample(const PhysicalProblem& problem, const SamplerParams& params) {
    validate(params);
    const Lattice lattice(problem);
    const std::size_t q = lattice.qubits.size();

    SampleSet out;
    out.provenance = problem.provenance;
    out.total_qubits = problem.provenance.grid_size > 0
                           ? 8 * problem.provenance.grid_size * problem.provenance.grid_size
                           : lattice.qubits.back() + 1;
    out.qubits = lattice.qubits;
    out.params = params;
    out.samples.reserve(static_cast<std::size_t>(params.num_reads));
    out.energies.reserve(static_cast<std::size_t>(params.num_reads));

    // per-sweep temperatures; equilibrium holds beta, anneal ramps it
    std::vector<double> betas(static_cast<std::size_t>(params.sweeps));
    if (params.mode == SampleMode::Equilibrium) {
        std::fill(betas.begin(), betas.end(), params.beta);
    } else if (params.sweeps == 1) {
        betas[0] = params.beta_end;
    } else {
        const double ratio = params.beta_end / params.beta_start;
        for (int t = 0; t < params.sweeps; ++t)
            betas[static_cast<std::size_t>(t)] =
                params.beta_start * std::pow(ratio, static_cast<double>(t) / (params.sweeps - 1));
    }

    for (int read = 0; read < params.num_reads; ++read) {
        Rng rng(params.seed, static_cast<std::uint64_t>(read));
        SpinVector z(q);
        for (auto& s : z) s = static_cast<Spin>(rng.sign());
        double e = lattice.energy(z);

        for (double beta : betas) {
            for (std::size_t i = 0; i < q; ++i) {
                double local = lattice.field[i];
                for (const auto& [j, w] : lattice.adj[i])
                    local += w * z[static_cast<std::size_t>(j)];
                const double de = -2.0 * z[i] * local;
                if (de <= 0.0 || rng.uniform() < std::exp(-beta * de)) {
                    z[i] = static_cast<Spin>(-z[i]);
                    e += de;
                }
            }

            // One collective flip proposal per chain. Single-qubit moves cross
            // a programmed chain only through a domain wall whose creation is
            // suppressed like exp(-2 beta R lambda), so whole-chain proposals
            // are what let the logical state keep mixing once chains order.
            // The proposal is symmetric and uses the same acceptance rule, so
            // the Gibbs measure stays invariant.
            for (std::size_t g = 0; g < lattice.groups.size(); ++g) {
                double s1 = 0.0;
                for (int i : lattice.groups[g]) {
                    double local = lattice.field[static_cast<std::size_t>(i)];
                    for (const auto& [j, w] : lattice.adj[static_cast<std::size_t>(i)])
                        local += w * z[static_cast<std::size_t>(j)];
                    s1 += z[static_cast<std::size_t>(i)] * local;
                }
                double s2 = 0.0;
                for (const auto& [a, b, w] : lattice.group_bonds[g])
                    s2 += w * z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(b)];
                const double de = -2.0 * s1 + 4.0 * s2;
                if (de <= 0.0 || rng.uniform() < std::exp(-beta * de)) {
                    for (int i : lattice.groups[g])
                        z[static_cast<std::size_t>(i)] = static_cast<Spin>(-z[static_cast<std::size_t>(i)]);
                    e += de;
                }
            }
        }
        out.samples.push_back(std::move(z));
        out.energies.push_back(e);
        out.streams.push_back(static_cast<std::uint64_t>(read));
    }
    return out;
}

}  // namespace chainlab
