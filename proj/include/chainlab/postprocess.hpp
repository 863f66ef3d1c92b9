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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chainlab/embedding.hpp"
#include "chainlab/sampler.hpp"

namespace chainlab {

// Physical reads mapped into logical space. Four strategies: random qubit per
// chain (one uniform pick), majority vote (sign of the chain sum, ties
// uniform), aligned-only (drop any read with a split chain), and greedy
// descent run on top of any of them. Energies are recomputed from the logical
// instance, so they include its constant offset. Randomized tie-breaks draw
// from one stream per source read, which keeps every mapping reproducible and
// order-free no matter how reads are distributed over workers.

struct LogicalSampleSet {
    Provenance provenance;
    std::string method;  // "random" | "majority" | "aligned" | "uniform"; "+descent" when GD ran
    int n = 0;           // logical variable count
    std::vector<SpinVector> samples;
    std::vector<double> energies;
    std::vector<bool> aligned;             // every chain unanimous in the source read
    std::vector<int> gd_updates;           // applied descent updates, zero unless GD ran
    std::vector<std::size_t> source_reads; // index into the physical sample set
    std::vector<std::pair<std::string, std::uint64_t>> seeds;  // named seeds used

    // one row per sample: spins, energy, aligned flag, gd_updates
    std::string to_csv() const;
    // sidecar describing the rows: method, seeds, counts, provenance
    std::string metadata_json() const;
};

LogicalSampleSet map_random(const SampleSet& set, const Instance& inst, const Embedding& emb,
                            std::uint64_t seed);

LogicalSampleSet map_majority(const SampleSet& set, const Instance& inst, const Embedding& emb,
                              std::uint64_t seed);

LogicalSampleSet filter_aligned(const SampleSet& set, const Instance& inst, const Embedding& emb);

// Iterated single-variable quenches x_a <- -sign(sum_b (J_ab + J_ba) x_b + h_a)
// over one seed-derived variable order, reused across passes, until a full
// pass changes nothing. sign(0) keeps the variable. Every applied update
// strictly lowers the energy, so the result is a 1-flip local minimum.
LogicalSampleSet greedy_descent(const LogicalSampleSet& logical, const Instance& inst,
                                std::uint64_t order_seed);

// Uniform random logical states (descent baseline input).
LogicalSampleSet random_states(const Instance& inst, int count, std::uint64_t seed);

}  // namespace chainlab
