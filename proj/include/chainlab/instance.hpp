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
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace chainlab {

using Spin = std::int8_t;
using SpinVector = std::vector<Spin>;

// Extra state carried by decoding problems: the transmitted word, the code
// matrix, the received signal, and the noise realization that produced it.
// The quadratic-form constant (|y|^2 + sum_i (W^T W)_ii) / (2 sigma0^2) is
// kept as `offset` so that energies equal the negative log-likelihood and the
// target energy is exactly the energy of the transmitted word.
struct CdmaPayload {
    SpinVector bits;                 // b, length n
    std::vector<double> code;        // W, row-major M x n, entries +-1/sqrt(n)
    std::vector<double> received;    // y = W b + sigma0 * noise, length M
    std::vector<double> noise;       // unit normal draws, length M
    double sigma0sq = 0.0;
    int m_rows = 0;
};

// A logical Ising problem: energy(x) = sum_{a<b} J_ab x_a x_b + sum_a h_a x_a
// + offset. Couplings are stored sparse with a < b and no explicit zeros.
struct Instance {
    std::string kind;  // "csg", "bsg", "3dsg", "cdma"
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<double> h;
    std::vector<std::tuple<int, int, double>> j;
    std::optional<double> target_energy;
    double offset = 0.0;
    std::array<int, 3> dims{0, 0, 0};  // 3dsg lattice shape, else zeros
    std::optional<CdmaPayload> cdma;

    std::string id() const;  // stable fingerprint: kind-n-seed

    std::string to_json() const;
    static Instance from_json(const std::string& text);
};

double energy(const Instance& inst, const SpinVector& x);

// Clique spin glass: all pairs coupled, J = +-1 fair coin, h = 0.
Instance gen_csg(int n, std::uint64_t seed);

// Biclique spin glass: variables split into halves [0, n/2) and [n/2, n),
// cross couplings +-1, h = 0. n must be even.
Instance gen_bsg(int n, std::uint64_t seed);

// Cubic-lattice spin glass with open boundaries, site (x, y, z) at index
// x + Lx*(y + Ly*z). Signs are drawn for the full ideal edge set in a fixed
// order, then vacancies are removed, so the surviving couplings do not depend
// on the vacancy sets. Vacant sites stay as (decoupled) variables.
Instance gen_3dsg(std::array<int, 3> dims, std::uint64_t seed,
                  const std::vector<int>& vacant_sites = {},
                  const std::vector<std::pair<int, int>>& vacant_edges = {});

// Multiuser decoding instance: M = round(load * n) code rows, W uniform
// +-1/sqrt(n), transmitted b uniform, y = W b + sigma0 * noise with
// sigma0^2 = 10^(-snr_db/10) / 2. The negative log-likelihood expands to the
// Ising form; target_energy is set to energy(b). Stream 0 of the seed drives
// W then b, stream 1 the noise.
Instance gen_cdma(int n, double load, double snr_db, std::uint64_t seed);
inline Instance gen_cdma(int n, std::uint64_t seed) { return gen_cdma(n, 1.4, 7.0, seed); }

}  // namespace chainlab
