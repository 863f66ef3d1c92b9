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

#pragma once
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "chainlab/instance.hpp"
#include "chainlab/topology.hpp"

namespace chainlab {

// One ordered qubit path per logical variable. The path order defines the
// within-chain distances used by compensation.
struct Embedding {
    std::vector<std::vector<int>> chains;

    std::string to_json() const;
    static Embedding from_json(const std::string& text);
};

struct ValidationReport {
    // qubits appearing in more than one chain, or out of range / dead
    std::vector<int> overlapping_qubits;
    std::vector<int> invalid_qubits;
    // chain indices that are empty or whose induced subgraph is disconnected
    std::vector<int> broken_chains;
    // per logical coupling (aligned with instance.j): number of physical
    // couplers joining the two chains
    std::vector<int> edge_coupler_counts;
    // logical couplings with zero connecting couplers, as (a, b)
    std::vector<std::pair<int, int>> uncovered_edges;
    bool chain_count_matches = false;

    bool pass() const {
        return chain_count_matches && overlapping_qubits.empty() && invalid_qubits.empty() &&
               broken_chains.empty() && uncovered_edges.empty();
    }
};

ValidationReport validate(const Embedding& emb, const Instance& inst, const PhysicalGraph& graph);

// How a pair of chains is joined: both lengths plus the coupler endpoints as
// path positions, reduced to a canonical form so that pairs differing only
// by chain reversal or swapping the two chains compare equal.
struct PatternKey {
    int len_a = 0;
    int len_b = 0;
    std::vector<std::pair<int, int>> positions;

    auto operator<=>(const PatternKey&) const = default;
    std::string label() const;  // compact "La-Lb:p,q;..." form
};

PatternKey canonical_pattern(int len_a, int len_b, std::vector<std::pair<int, int>> positions);

// Physical couplers joining two chains, as (qubit in a, qubit in b).
std::vector<std::pair<int, int>> connecting_couplers(const PhysicalGraph& graph,
                                                     const std::vector<int>& chain_a,
                                                     const std::vector<int>& chain_b);

// Same couplers expressed as path positions (index in a, index in b).
std::vector<std::pair<int, int>> connecting_positions(const PhysicalGraph& graph,
                                                      const std::vector<int>& chain_a,
                                                      const std::vector<int>& chain_b);

// Complete graph on n variables, chains of length ceil(n/4) + 1. Variables
// are grouped four to a bundle; bundle b runs horizontally through cells
// (b, 0..b) and then vertically through cells (b..g-1, b), bending on the
// grid diagonal. Requires a defect-free g x g corner region with g = ceil(n/4).
Embedding embed_clique(int n, const PhysicalGraph& graph);

// Complete bipartite graph between halves [0, n/2) and [n/2, n). First-half
// chains are horizontal wires through a row of cells, second-half chains
// vertical wires through a column; every cross pair meets in exactly one
// cell. Chains have length ceil(n/8). n must be even.
Embedding embed_biclique(int n, const PhysicalGraph& graph);

// Open-boundary cubic lattice, four qubits per site, site (x, y, z) at index
// x + Lx*(y + Ly*z) to match the lattice instance generator. Each 2x2 cell
// block hosts the eight sites of one (x, y) column: group z%2 bends at one
// block corner, the other group at the diagonally opposite corner, and the
// corner assignment mirrors with x and y parity so neighboring blocks meet
// end to end. Requires m >= 2*max(Lx, Ly) and Lz <= 8.
Embedding embed_cubic(std::array<int, 3> dims, const PhysicalGraph& graph);

}  // namespace chainlab
