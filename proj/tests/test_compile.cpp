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

#include <cmath>
#include <map>
#include <stdexcept>

#include "chainlab/compile.hpp"
#include "chainlab/rng.hpp"
#include "doctest.h"

using namespace chainlab;

namespace {

double coupling_between(const PhysicalProblem& p, int qa, int qb) {
    if (qa > qb) std::swap(qa, qb);
    double total = 0.0;
    for (const auto& [a, b, v] : p.j)
        if (a == qa && b == qb) total += v;
    return total;
}

int count_chain_couplers(const Embedding& emb) {
    int c = 0;
    for (const auto& chain : emb.chains) c += static_cast<int>(chain.size()) - 1;
    return c;
}

}  // namespace

TEST_CASE("chain strength scales with coupling variance and size") {
    const Instance csg = gen_csg(64, 1);
    CHECK(chain_strength(csg, 1.6) == doctest::Approx(12.8).epsilon(1e-12));

    Instance pair;
    pair.kind = "csg";
    pair.n = 2;
    pair.h = {0.0, 0.0};
    pair.j = {{0, 1, -1.0}};
    CHECK(chain_strength(pair, 0.5) == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-12));

    // Bipartite instances have roughly half the pair density.
    const Instance bsg = gen_bsg(64, 3);
    const double sigma_sq = 1024.0 / 2016.0;
    CHECK(chain_strength(bsg, 1.6) ==
          doctest::Approx(1.6 * std::sqrt(sigma_sq * 64.0)).epsilon(1e-12));
    CHECK(sigma_sq == doctest::Approx(0.5).epsilon(0.02));

    CHECK_THROWS_AS(chain_strength(csg, 0.0), std::invalid_argument);
}

TEST_CASE("uniform spreading divides fields and couplings equally") {
    const PhysicalGraph c2 = build_chimera(2);
    // Two length-4 chains inside one cell, 8 connecting couplers.
    Embedding emb;
    emb.chains = {
        {qubit_id(2, {0, 0, 0, 0}), qubit_id(2, {0, 0, 1, 0}), qubit_id(2, {0, 0, 0, 1}),
         qubit_id(2, {0, 0, 1, 1})},
        {qubit_id(2, {0, 0, 0, 2}), qubit_id(2, {0, 0, 1, 2}), qubit_id(2, {0, 0, 0, 3}),
         qubit_id(2, {0, 0, 1, 3})},
    };
    Instance inst;
    inst.kind = "csg";
    inst.n = 2;
    inst.h = {2.0, 0.0};
    inst.j = {{0, 1, 1.0}};

    const PhysicalProblem p = uniform_spread(inst, emb, c2, 3.0);
    std::map<int, double> fields(p.h.begin(), p.h.end());
    for (int q : emb.chains[0]) CHECK(fields.at(q) == 0.5);
    for (int q : emb.chains[1]) CHECK(fields.at(q) == 0.0);
    CHECK(p.j.size() == 8);
    for (const auto& [qa, qb, v] : p.j) {
        (void)qa, (void)qb;
        CHECK(v == 0.125);
    }
    CHECK(p.chain_couplers.size() == 6);
    CHECK(p.lambda == 3.0);
    CHECK(p.rescale_factor == 1.0);
}

TEST_CASE("chain-aligned physical energies reproduce logical energies") {
    struct Setup {
        Instance inst;
        Embedding emb;
        PhysicalGraph graph;
    };
    std::vector<Setup> setups;
    setups.push_back({gen_csg(8, 5), embed_clique(8, build_chimera(2)), build_chimera(2)});
    setups.push_back({gen_bsg(8, 6), embed_biclique(8, build_chimera(1)), build_chimera(1)});
    setups.push_back({gen_3dsg({2, 2, 2}, 7), embed_cubic({2, 2, 2}, build_chimera(4)),
                      build_chimera(4)});
    setups.push_back({gen_cdma(8, 8), embed_clique(8, build_chimera(2)), build_chimera(2)});

    Rng rng(17, 0);
    for (const auto& s : setups) {
        const double lambda = chain_strength(s.inst, 1.6);
        for (const PhysicalProblem& p :
             {uniform_spread(s.inst, s.emb, s.graph, lambda),
              rescale(uniform_spread(s.inst, s.emb, s.graph, lambda))}) {
            const int chain_edges = count_chain_couplers(s.emb);
            for (int trial = 0; trial < 20; ++trial) {
                SpinVector x(s.inst.n);
                for (auto& v : x) v = rng.sign();
                const SpinVector z = chain_aligned(s.emb, x, s.graph.num_qubits());
                const double lhs = physical_energy(p, z) / p.rescale_factor +
                                   lambda * chain_edges + s.inst.offset;
                CHECK(lhs == doctest::Approx(energy(s.inst, x)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("pairwise susceptibility matches closed forms") {
    const PhysicalGraph c3 = build_chimera(3);
    const Embedding bic = embed_biclique(24, c3);  // length-3 wires
    // End-to-end coupled pair: chain 0 (row wire) and chain 12 (column wire)
    // meet in the corner cell at positions (0, 0).
    CHECK(connecting_positions(c3, bic.chains[0], bic.chains[12]) ==
          std::vector<std::pair<int, int>>{{0, 0}});
    const double chi = chi_pair(bic, c3, 0, 12, 3.0);
    CHECK(chi == doctest::Approx(std::exp(-2.0 / 3.0)).epsilon(1e-12));

    // Middle-to-middle coupled pair decays less.
    CHECK(connecting_positions(c3, bic.chains[4], bic.chains[16]) ==
          std::vector<std::pair<int, int>>{{1, 1}});
    CHECK(chi_pair(bic, c3, 4, 16, 3.0) == doctest::Approx(std::exp(-4.0 / 9.0)).epsilon(1e-12));

    // Infinite correlation length gives exactly one, any geometry.
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(chi_pair(bic, c3, 0, 12, inf) == 1.0);
    CHECK(chi_pair(bic, c3, 4, 16, inf) == 1.0);

    // Single-site chains are transparent.
    const PhysicalGraph c1 = build_chimera(1);
    const Embedding native = embed_biclique(8, c1);
    CHECK(chi_pair(native, c1, 0, 4, 2.0) == 1.0);

    // Monotone non-decreasing in xi, always in (0, 1].
    double prev = 0.0;
    for (double xi : {0.5, 1.0, 2.0, 4.0, 64.0}) {
        const double c = chi_pair(bic, c3, 0, 12, xi);
        CHECK(c > prev);
        CHECK(c <= 1.0);
        prev = c;
    }

    CHECK_THROWS_AS(chi_pair(bic, c3, 0, 1, 3.0), std::invalid_argument);  // no coupler
    CHECK_THROWS_AS(chi_pair(bic, c3, 0, 12, 0.0), std::invalid_argument);
}

TEST_CASE("single-coupler susceptibility factorizes over the two chains") {
    const PhysicalGraph c8 = build_chimera(8);
    const Embedding emb = embed_clique(32, c8);
    auto profile = [&](const std::vector<int>& chain, int site, double xi) {
        double dist_sum = 0.0;
        for (std::size_t s = 0; s < chain.size(); ++s)
            dist_sum += std::abs(static_cast<int>(s) - site);
        return std::exp(-dist_sum / (xi * static_cast<double>(chain.size())));
    };
    for (double xi : {1.0, 4.5, 9.0}) {
        for (const auto& [a, b] : std::vector<std::pair<int, int>>{{0, 8}, {4, 22}, {1, 30}}) {
            const auto pos = connecting_positions(c8, emb.chains[a], emb.chains[b]);
            REQUIRE(pos.size() == 1);
            const double expect =
                profile(emb.chains[a], pos[0].first, xi) * profile(emb.chains[b], pos[0].second, xi);
            CHECK(chi_pair(emb, c8, a, b, xi) == doctest::Approx(expect).epsilon(1e-13));
        }
    }
}

TEST_CASE("two-coupler pairs follow the coupler-averaged generalization") {
    const PhysicalGraph c8 = build_chimera(8);
    const Embedding emb = embed_clique(32, c8);
    // Same-bundle pair: couplers at positions (b, b+1) and (b+1, b).
    const int a = 8, b = 9;  // bundle 2
    const auto pos = connecting_positions(c8, emb.chains[a], emb.chains[b]);
    REQUIRE(pos.size() == 2);
    const double xi = 4.0;
    const int len = static_cast<int>(emb.chains[a].size());
    double log_sum = 0.0;
    for (int i = 0; i < len; ++i)
        for (int j = 0; j < len; ++j) {
            double acc = 0.0;
            for (const auto& [pi, pj] : pos)
                acc += std::exp(-(std::abs(i - pi) + std::abs(j - pj)) / xi);
            log_sum += std::log(acc / 2.0);
        }
    const double expect = std::exp(log_sum / (len * len));
    CHECK(chi_pair(emb, c8, a, b, xi) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("compensation reweights couplings and preserves their geometry") {
    const PhysicalGraph c8 = build_chimera(8);
    const Instance inst = gen_csg(32, 11);
    const Embedding emb = embed_clique(32, c8);
    const double lambda = chain_strength(inst, 1.6);

    // Infinite xi reproduces uniform spreading bit for bit.
    CompensationConfig inf_cfg{CompensationMethod::Susceptibility,
                               std::numeric_limits<double>::infinity(), 1.0};
    const PhysicalProblem uni = uniform_spread(inst, emb, c8, lambda);
    const PhysicalProblem inf = compensate(inst, emb, c8, lambda, inf_cfg);
    CHECK(inf.h == uni.h);
    CHECK(inf.j == uni.j);
    CHECK(inf.chain_couplers == uni.chain_couplers);

    // method = none ignores xi entirely.
    CompensationConfig none_cfg{CompensationMethod::None, 2.0, 1.0};
    const PhysicalProblem none = compensate(inst, emb, c8, lambda, none_cfg);
    CHECK(none.j == uni.j);

    // Finite xi: geometric mean of the reweight ratios is one, and fields
    // are untouched.
    CompensationConfig cfg{CompensationMethod::Susceptibility, 9.0, 1.0};
    const PhysicalProblem comp = compensate(inst, emb, c8, lambda, cfg);
    CHECK(comp.h == uni.h);
    REQUIRE(comp.j.size() == uni.j.size());
    double log_ratio = 0.0;
    int edges = 0;
    for (std::size_t e = 0; e < inst.j.size(); ++e) {
        const auto& [a, b, v] = inst.j[e];
        const double chi = chi_pair(emb, c8, a, b, 9.0);
        (void)v;
        ++edges;
        log_ratio += std::log(chi);  // ratio = N / chi; sum log N cancels
    }
    // Geometric mean of N/chi equals one iff mean log chi equals log N.
    double mean_log_chi = log_ratio / edges;
    double sum_check = 0.0;
    for (std::size_t e = 0; e < inst.j.size(); ++e) {
        const auto& [a, b, v] = inst.j[e];
        (void)v;
        sum_check += mean_log_chi - std::log(chi_pair(emb, c8, a, b, 9.0));
    }
    CHECK(sum_check == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("single-edge problems are unchanged by compensation") {
    const PhysicalGraph c3 = build_chimera(3);
    Instance inst;
    inst.kind = "csg";
    inst.n = 2;
    inst.h = {0.0, 0.0};
    inst.j = {{0, 1, 1.0}};
    Embedding emb;
    const Embedding bic = embed_biclique(24, c3);
    emb.chains = {bic.chains[0], bic.chains[12]};
    const PhysicalProblem uni = uniform_spread(inst, emb, c3, 2.0);
    CompensationConfig cfg{CompensationMethod::Susceptibility, 3.0, 1.0};
    const PhysicalProblem comp = compensate(inst, emb, c3, 2.0, cfg);
    CHECK(comp.j == uni.j);  // N/chi = exp(log chi - log chi) = 1 exactly
}

TEST_CASE("end-connected pairs receive larger couplings than center-connected") {
    const PhysicalGraph c3 = build_chimera(3);
    const Instance inst = gen_bsg(24, 4);
    const Embedding emb = embed_biclique(24, c3);
    CompensationConfig cfg{CompensationMethod::Susceptibility, 3.0, 1.0};
    const PhysicalProblem comp = compensate(inst, emb, c3, chain_strength(inst, 1.6), cfg);
    // Variable 0 is the first row wire, 12 the first column wire (meet at
    // their ends); 4 and 16 meet at their middles.
    const auto [qa, qb] = connecting_couplers(c3, emb.chains[0], emb.chains[12]).front();
    const auto [qc, qd] = connecting_couplers(c3, emb.chains[4], emb.chains[16]).front();
    CHECK(std::abs(coupling_between(comp, qa, qb)) >
          std::abs(coupling_between(comp, qc, qd)));
}

TEST_CASE("rescaling honors all hardware bounds") {
    PhysicalProblem toy;
    toy.lambda = 2.0;
    toy.j = {{0, 4, 0.5}, {1, 5, -0.25}};
    toy.h = {{0, 0.0}, {1, 0.0}};
    toy.chain_couplers = {{0, 1}};
    const PhysicalProblem scaled = rescale(toy);
    CHECK(scaled.rescale_factor == 1.0);

    const PhysicalGraph c16 = build_chimera(16);
    const Instance csg = gen_csg(64, 2);
    const PhysicalProblem p =
        rescale(uniform_spread(csg, embed_clique(64, c16), c16, chain_strength(csg, 1.6)));
    CHECK(p.rescale_factor == doctest::Approx(2.0 / 12.8).epsilon(1e-12));
    // Chain couplers saturate the extended range.
    CHECK(p.rescale_factor * p.lambda == doctest::Approx(2.0).epsilon(1e-12));
    double max_j = 0.0, max_h = 0.0;
    for (const auto& [a, b, v] : p.j) {
        (void)a, (void)b;
        max_j = std::max(max_j, std::abs(v));
    }
    for (const auto& [q, v] : p.h) {
        (void)q;
        max_h = std::max(max_h, std::abs(v));
    }
    CHECK(p.rescale_factor * max_j <= 1.0 + 1e-12);
    CHECK(p.rescale_factor * max_h <= 2.0 + 1e-12);

    // A field-dominated problem binds on the h limit.
    PhysicalProblem fieldy;
    fieldy.lambda = 1.0;
    fieldy.h = {{0, 8.0}};
    fieldy.chain_couplers = {{0, 1}};
    CHECK(rescale(fieldy).rescale_factor == doctest::Approx(0.25).epsilon(1e-12));

    PhysicalProblem nothing;
    CHECK_THROWS_AS(rescale(nothing), std::invalid_argument);
}

TEST_CASE("physical problems survive a JSON round trip") {
    const PhysicalGraph c2 = build_chimera(2);
    const Instance inst = gen_cdma(8, 3);
    const Embedding emb = embed_clique(8, c2);
    CompensationConfig cfg{CompensationMethod::Susceptibility, 3.0, 1.0};
    const PhysicalProblem p = rescale(compensate(inst, emb, c2, chain_strength(inst, 1.6), cfg));
    const PhysicalProblem back = PhysicalProblem::from_json(p.to_json());
    CHECK(back.h == p.h);
    CHECK(back.j == p.j);
    CHECK(back.chain_couplers == p.chain_couplers);
    CHECK(back.lambda == p.lambda);
    CHECK(back.rescale_factor == p.rescale_factor);
    CHECK(back.provenance.instance_id == p.provenance.instance_id);
    CHECK(back.provenance.embedding_id == p.provenance.embedding_id);
    CHECK(back.provenance.method == "susceptibility");
    CHECK(back.provenance.xi == 3.0);
    CHECK(back.provenance.grid_size == 2);

    // Infinity round-trips through the text format.
    const PhysicalProblem uni = uniform_spread(inst, emb, c2, 2.0);
    const PhysicalProblem uback = PhysicalProblem::from_json(uni.to_json());
    CHECK(std::isinf(uback.provenance.xi));
}

TEST_CASE("compilation rejects embeddings that do not fit") {
    const PhysicalGraph c2 = build_chimera(2);
    const Instance inst = gen_csg(8, 1);
    Embedding emb = embed_clique(8, c2);
    emb.chains[0].clear();
    CHECK_THROWS_AS(uniform_spread(inst, emb, c2, 1.0), std::invalid_argument);
}
