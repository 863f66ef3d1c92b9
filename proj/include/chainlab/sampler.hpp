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
#include <vector>

#include "chainlab/compile.hpp"
#include "chainlab/instance.hpp"

namespace chainlab {

// Finite-temperature Monte Carlo sampling of programmed physical problems.
// Two modes: `Anneal` runs each read over a geometric inverse-temperature
// ramp from a uniform random start and keeps the final state; `Equilibrium`
// holds beta fixed, treats the first half of the sweeps as burn-in, and keeps
// the final state of each read. One sweep is a Metropolis pass over every
// qubit followed by one collective flip proposal per chain (connected
// component of the chain couplers); both proposal families are symmetric and
// share the acceptance rule, so the Gibbs measure is invariant either way.
// Reads use independent RNG streams (stream id = read index under the set
// seed), so every sample is reproducible in isolation and reads can run in
// any order.

enum class SampleMode { Anneal, Equilibrium };

struct SamplerParams {
    int num_reads = 100;
    SampleMode mode = SampleMode::Anneal;
    int sweeps = 1000;
    double beta_start = 0.1;  // anneal ramp, geometric
    double beta_end = 10.0;
    double beta = 1.0;  // equilibrium temperature
    std::uint64_t seed = 0;

    std::string to_json() const;
    static SamplerParams from_json(const std::string& text);
};

struct SampleSet {
    Provenance provenance;
    int total_qubits = 0;       // grid size behind the qubit ids
    std::vector<int> qubits;    // live qubits, ascending; samples align with this
    std::vector<SpinVector> samples;
    std::vector<double> energies;  // programmed-scale energy per read
    SamplerParams params;
    std::vector<std::uint64_t> streams;  // RNG stream per read

    // position of a qubit id in `qubits`, or -1
    int qubit_index(int qubit) const;
    // grid-length spin vector for one read; absent qubits read 0
    SpinVector full(std::size_t read) const;

    std::string to_json() const;
    static SampleSet from_json(const std::string& text);
};

// Metropolis sampling of the programmed problem (rescale factor applied).
// Deterministic given (params.seed, read index).
SampleSet sample(const PhysicalProblem& problem, const SamplerParams& params);

}  // namespace chainlab
