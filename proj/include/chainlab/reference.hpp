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
#include <tuple>
#include <vector>

#include "chainlab/instance.hpp"

namespace chainlab {

struct GroundState {
    double min_energy;
    SpinVector argmin;  // first minimizer in enumeration order
};

// Exact ground state by exhaustive enumeration (Gray-code incremental
// updates). Limited to n <= 24; when all fields vanish only half the state
// space is visited since energies are flip-symmetric.
GroundState brute_min(const Instance& inst);

// Exact pair correlations <z_i z_j> of an open ferromagnetic chain of length
// length with bond strength lam at inverse temperature beta (energy
// -lam * sum z_i z_{i+1}), computed with 2x2 transfer matrices. Result is a
// full symmetric matrix with unit diagonal. length <= 20.
std::vector<std::vector<double>> chain_gibbs_correlations(int length, double beta, double lam);

struct TwoChainCorrelations {
    // cross[i][j] = <z_i^(a) z_j^(b)> over the joint Gibbs distribution
    std::vector<std::vector<double>> cross;
    // sign * geometric mean of |cross| over all (i, j); zero if any entry
    // vanishes, and meaningful only when all entries share one sign.
    double c_ab;
};

// Exact cross correlations of two open ferromagnetic chains (bond strength
// lam) joined by explicit couplers (i, j, v) with energy contribution
// v * z_i^(a) * z_j^(b), at inverse temperature beta. Enumerates all
// 2^(la+lb) states; la + lb <= 20.
TwoChainCorrelations two_chain_gibbs_correlations(
    int la, int lb, const std::vector<std::tuple<int, int, double>>& couplers,
    double beta, double lam);

}  // namespace chainlab
