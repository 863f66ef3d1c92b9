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
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "chainlab/embedding.hpp"
#include "chainlab/instance.hpp"
#include "chainlab/topology.hpp"

namespace chainlab {

enum class CompensationMethod { None, Susceptibility, Spectral };

struct CompensationConfig {
    CompensationMethod method = CompensationMethod::None;
    // correlation length; infinity reproduces uniform spreading exactly
    double xi = std::numeric_limits<double>::infinity();
    // transverse drive ratio A/(B*lambda) for the spectral method
    double gamma = 1.0;
};

struct Provenance {
    std::string instance_id;
    std::string embedding_id;
    std::string method = "none";
    double xi = std::numeric_limits<double>::infinity();
    double gamma = 1.0;
    int grid_size = 0;

    std::string to_json() const;
    static Provenance from_json(const std::string& text);
};

// A programmable problem. Fields and couplings are stored at logical scale;
// the physical device applies the overall factor R, so programmed values are
// R*h, R*J, and -R*lambda on chain couplers. After rescale(), R*lambda <= 2,
// R*|J| <= 1 on non-chain couplers, and R*|h| <= 2.
struct PhysicalProblem {
    std::vector<std::pair<int, double>> h;         // (qubit, field), all chain qubits
    std::vector<std::tuple<int, int, double>> j;   // non-chain couplers
    std::vector<std::pair<int, int>> chain_couplers;
    double lambda = 0.0;
    double rescale_factor = 1.0;  // R
    Provenance provenance;

    std::string to_json() const;
    static PhysicalProblem from_json(const std::string& text);
};

// lambda = lambda0 * sqrt(sigma^2 * N) with sigma^2 the mean squared
// coupling over all N(N-1)/2 variable pairs (absent pairs count as zero).
double chain_strength(const Instance& inst, double lambda0);

// Fields divided equally over chain qubits, each logical coupling divided
// equally over its connecting couplers, chain couplers at -lambda.
PhysicalProblem uniform_spread(const Instance& inst, const Embedding& emb,
                               const PhysicalGraph& graph, double lambda);

// Pairwise susceptibility of chains a and b: the geometric mean over site
// pairs (i, j) of the coupler-averaged exp(-(d_a(i,i') + d_b(j,j')) / xi),
// with distances along the stored path order. Equals the product of the two
// per-chain profiles when a single coupler connects the chains. In (0, 1].
double chi_pair(const Embedding& emb, const PhysicalGraph& graph, int a, int b, double xi);

// Reweights logical couplings by N/chi_ab, where N is the geometric mean of
// chi over all logical edges, then spreads. Fields are not modified.
PhysicalProblem compensate(const Instance& inst, const Embedding& emb, const PhysicalGraph& graph,
                           double lambda, const CompensationConfig& config);

// Chooses R = min(2/lambda, 1/max|J|, 2/max|h|) over the problem's non-chain
// values, skipping bounds with zero denominator.
PhysicalProblem rescale(const PhysicalProblem& problem);

// Sorted distinct qubit ids referenced by fields or couplers. Defines the
// column order of sample sets drawn from the problem.
std::vector<int> live_qubits(const PhysicalProblem& problem);

// Spin state over physical qubits for a logical state x: every qubit of
// chain a takes x[a]; qubits outside the embedding are left at zero.
SpinVector chain_aligned(const Embedding& emb, const SpinVector& x, int num_qubits);

// R * (sum J z z - lambda * sum_chain z z + sum h z). For a chain-aligned
// state z(x): physical_energy/R + lambda * #chain_couplers + offset equals
// the logical energy of x.
double physical_energy(const PhysicalProblem& problem, const SpinVector& z);

}  // namespace chainlab
