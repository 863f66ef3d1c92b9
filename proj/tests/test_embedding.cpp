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

#include <algorithm>
#include <set>
#include <stdexcept>

#include "chainlab/embedding.hpp"
#include "doctest.h"

using namespace chainlab;

namespace {

bool uniform_length(const Embedding& emb, int length) {
    return std::all_of(emb.chains.begin(), emb.chains.end(), [&](const auto& c) {
        return static_cast<int>(c.size()) == length;
    });
}

bool disjoint(const Embedding& emb) {
    std::set<int> seen;
    for (const auto& c : emb.chains)
        for (int q : c)
            if (!seen.insert(q).second) return false;
    return true;
}

}  // namespace

TEST_CASE("clique embeddings have the expected shape and validate") {
    const PhysicalGraph c8 = build_chimera(8);
    const Embedding e32 = embed_clique(32, c8);
    CHECK(e32.chains.size() == 32);
    CHECK(uniform_length(e32, 9));
    CHECK(disjoint(e32));
    const auto report = validate(e32, gen_csg(32, 1), c8);
    CHECK(report.pass());
    for (int c : report.edge_coupler_counts) CHECK((c == 1 || c == 2));

    const PhysicalGraph c16 = build_chimera(16);
    const Embedding e64 = embed_clique(64, c16);
    CHECK(e64.chains.size() == 64);
    CHECK(uniform_length(e64, 17));
    CHECK(validate(e64, gen_csg(64, 1), c16).pass());

    const Embedding e4 = embed_clique(4, build_chimera(1));
    CHECK(e4.chains.size() == 4);
    CHECK(uniform_length(e4, 2));
    CHECK(validate(e4, gen_csg(4, 1), build_chimera(1)).pass());

    // Deterministic for fixed (n, m).
    CHECK(embed_clique(32, c8).to_json() == e32.to_json());
}

TEST_CASE("clique embedding fails loudly on defects or lack of space") {
    CHECK_THROWS_AS(embed_clique(5, build_chimera(1)), std::runtime_error);
    // Kill a qubit inside the triangle region.
    const PhysicalGraph broken = build_chimera(8, {qubit_id(8, {0, 0, 1, 0})});
    CHECK_THROWS_AS(embed_clique(32, broken), std::runtime_error);
    // The single coupler joining two cross-bundle chains is gone.
    const int va = qubit_id(8, {2, 0, 0, 0});
    const int hb = qubit_id(8, {2, 0, 1, 1});
    const PhysicalGraph cut = build_chimera(8, {}, {{va, hb}});
    CHECK_THROWS_AS(embed_clique(32, cut), std::runtime_error);
    // Defects outside the region are harmless.
    const PhysicalGraph outside = build_chimera(9, {qubit_id(9, {0, 8, 0, 0})});
    CHECK(embed_clique(32, outside).chains.size() == 32);
}

TEST_CASE("biclique embeddings are crossing wire bundles") {
    const PhysicalGraph c8 = build_chimera(8);
    const Embedding e64 = embed_biclique(64, c8);
    CHECK(e64.chains.size() == 64);
    CHECK(uniform_length(e64, 8));
    CHECK(disjoint(e64));
    const auto report = validate(e64, gen_bsg(64, 2), c8);
    CHECK(report.pass());
    // Every logical edge is realized by exactly one coupler.
    for (int c : report.edge_coupler_counts) CHECK(c == 1);

    CHECK(uniform_length(embed_biclique(8, build_chimera(1)), 1));
    CHECK(uniform_length(embed_biclique(16, build_chimera(2)), 2));
    CHECK_THROWS_AS(embed_biclique(7, c8), std::invalid_argument);
    CHECK_THROWS_AS(embed_biclique(16, build_chimera(1)), std::runtime_error);
}

TEST_CASE("cubic embeddings tile blocks with length-4 chains") {
    const PhysicalGraph c16 = build_chimera(16);
    const Embedding big = embed_cubic({8, 8, 8}, c16);
    CHECK(big.chains.size() == 512);
    CHECK(uniform_length(big, 4));
    CHECK(disjoint(big));
    // The full lattice uses every qubit of the grid.
    std::set<int> used;
    for (const auto& c : big.chains) used.insert(c.begin(), c.end());
    CHECK(used.size() == 2048);
    CHECK(validate(big, gen_3dsg({8, 8, 8}, 3), c16).pass());

    const PhysicalGraph c8 = build_chimera(8);
    const Instance lattice = gen_3dsg({4, 4, 4}, 5);
    const Embedding mid = embed_cubic({4, 4, 4}, c8);
    CHECK(mid.chains.size() == 64);
    CHECK(uniform_length(mid, 4));
    const auto report = validate(mid, lattice, c8);
    CHECK(report.pass());
    // Depth links use two couplers, in-plane links one.
    for (std::size_t e = 0; e < lattice.j.size(); ++e) {
        const auto& [a, b, v] = lattice.j[e];
        (void)v;
        const bool depth_link = b - a == 16;  // site stride between z layers
        CHECK(report.edge_coupler_counts[e] == (depth_link ? 2 : 1));
    }

    CHECK(uniform_length(embed_cubic({1, 1, 1}, build_chimera(2)), 4));
    CHECK_THROWS_AS(embed_cubic({1, 1, 1}, build_chimera(1)), std::runtime_error);
    CHECK_THROWS_AS(embed_cubic({2, 2, 9}, c16), std::runtime_error);
    CHECK(validate(embed_cubic({2, 2, 2}, build_chimera(4)), gen_3dsg({2, 2, 2}, 9),
                   build_chimera(4))
              .pass());
}

TEST_CASE("validation flags each failure mode") {
    const PhysicalGraph c2 = build_chimera(2);
    const Instance inst = gen_csg(4, 7);
    const Embedding emb = embed_clique(4, c2);
    CHECK(validate(emb, inst, c2).pass());

    Embedding shared = emb;
    shared.chains[1][0] = shared.chains[0][0];
    const auto r1 = validate(shared, inst, c2);
    CHECK(!r1.pass());
    CHECK(!r1.overlapping_qubits.empty());

    Embedding torn = emb;
    torn.chains[2] = {emb.chains[2][0], qubit_id(2, {1, 1, 0, 3})};  // far apart
    const auto r2 = validate(torn, inst, c2);
    CHECK(!r2.pass());
    CHECK(std::count(r2.broken_chains.begin(), r2.broken_chains.end(), 2) == 1);

    Embedding missing = emb;
    missing.chains.pop_back();
    CHECK(!validate(missing, inst, c2).chain_count_matches);

    Embedding empty = emb;
    empty.chains[3].clear();
    CHECK(!validate(empty, inst, c2).pass());

    // Uncovered logical edge: isolate variable 3's chain from variable 0's.
    Instance far = inst;
    Embedding apart = emb;
    apart.chains[3] = {qubit_id(2, {1, 1, 1, 3})};
    const auto r3 = validate(apart, far, c2);
    CHECK(!r3.pass());
    CHECK(!r3.uncovered_edges.empty());

    Embedding bogus = emb;
    bogus.chains[0][0] = 10000;
    CHECK(!validate(bogus, inst, c2).invalid_qubits.empty());
}

TEST_CASE("connecting couplers and positions agree with the layout") {
    const PhysicalGraph c8 = build_chimera(8);
    const Embedding emb = embed_clique(32, c8);
    // Same bundle: two couplers at the bend, positions (b, b+1) and (b+1, b).
    for (int b : {0, 3, 7}) {
        const auto pos = connecting_positions(c8, emb.chains[4 * b], emb.chains[4 * b + 1]);
        REQUIRE(pos.size() == 2);
        CHECK(pos[0] == std::pair<int, int>{b, b + 1});
        CHECK(pos[1] == std::pair<int, int>{b + 1, b});
    }
    // Cross bundle b < b': one coupler at (b' + 1, b).
    const auto pos = connecting_positions(c8, emb.chains[4 * 1], emb.chains[4 * 5 + 2]);
    REQUIRE(pos.size() == 1);
    CHECK(pos[0] == std::pair<int, int>{5 + 1, 1});

    const auto qub = connecting_couplers(c8, emb.chains[4], emb.chains[22]);
    for (const auto& [qa, qb] : qub) CHECK(c8.has_coupler(qa, qb));
}

TEST_CASE("embeddings survive a JSON round trip") {
    const Embedding emb = embed_biclique(16, build_chimera(2));
    const Embedding back = Embedding::from_json(emb.to_json());
    CHECK(back.chains == emb.chains);
}
