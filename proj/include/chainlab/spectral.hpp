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
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "chainlab/compile.hpp"
#include "chainlab/embedding.hpp"
#include "chainlab/instance.hpp"
#include "chainlab/topology.hpp"

namespace chainlab {

// Exact low-lying spectra of transverse-field Ising systems built from one or
// two chains, and the effective couplings they define. The Hamiltonian is
//
//     H = a_field * sum_i sigma^x_i + sum_(i,j,c) c * sigma^z_i sigma^z_j
//
// with chains bound ferromagnetically (zz coefficient -B*lambda) and logical
// couplings entering at +B*jhat split uniformly over the connecting couplers.
//
// Two backends cover different sizes: a dense LAPACK eigensolver up to 14
// qubits, and a thick-restart Lanczos solver with full reorthogonalization up
// to 24. Both exploit the global spin-flip symmetry of the field-free system,
// solving each parity sector separately and merging the results.

enum class SpectralBackend {
    Auto,   // dense for small systems, sparse beyond
    Dense,
    Sparse,
};

inline constexpr int kDenseQubitCap = 14;     // sector matrices up to 8192^2
inline constexpr int kDenseFullQubitCap = 12; // unreduced matrices up to 4096^2
inline constexpr int kSparseQubitCap = 24;

struct SpectralResult {
    double e0 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;      // NaN when the system has fewer than three levels
    double derived = 0.0; // a_eff for a single chain, j_eff for a pair
    double chi = 0.0;     // j_eff / jhat; pair systems only
    bool degenerate = false;
    int qubits = 0;
};

// Lowest `k` eigenvalues in ascending order (fewer if the space is smaller).
// Coefficients are (i, j, c) with i != j in [0, n). With sector_reduction the
// two spin-flip parity sectors are solved independently and merged; without it
// the full 2^n operator is built, which only the dense backend supports.
std::vector<double> tfim_lowest(int n, double a_field,
                                const std::vector<std::tuple<int, int, double>>& zz,
                                int k, SpectralBackend backend = SpectralBackend::Auto,
                                bool sector_reduction = true);

// Gap of an isolated length-L chain at transverse field `a_field`:
// a_eff = (E1 - E0) / 2. A single site gives back a_field exactly.
SpectralResult chain_gap(int length, double a_field, double b_scale, double lambda,
                         SpectralBackend backend = SpectralBackend::Auto);

// Effective coupling of two chains joined at the given (pos_a, pos_b) coupler
// positions, with total logical coupling `jhat` spread uniformly over them:
// j_eff = sign(jhat) * (E2 - E1) / (2 * b_scale), chi = j_eff / jhat.
// A degenerate E2 = E1 is reported as chi = 0 with the flag set.
//
// The gap identification presumes comparable effective fields on the two
// chains. Equal lengths make E1/E2 the coupler-split degenerate pair and chi
// stays within (0, 1] for weak coupling; very different lengths leave the
// middle gap dominated by the field mismatch instead of the coupling.
SpectralResult pair_jeff(int len_a, int len_b,
                         const std::vector<std::pair<int, int>>& positions,
                         double a_field, double b_scale, double lambda, double jhat,
                         SpectralBackend backend = SpectralBackend::Auto);

// Compensation factor for every instance coupling, aligned with instance.j.
// Evaluated at a_field = gamma * lambda (b_scale = 1) with a probe coupling of
// 0.1 * lambda, once per equivalence class of connection patterns. gamma = 0
// is the classical limit: every factor is exactly 1.
std::vector<double> spectral_edge_chi(const Instance& instance, const Embedding& embedding,
                                      const PhysicalGraph& graph, double lambda, double gamma);

// Chain-compensated physical problem with per-pattern spectral factors;
// equivalent to compensate() with CompensationMethod::Spectral.
PhysicalProblem spectral_compensate(const Instance& instance, const Embedding& embedding,
                                    const PhysicalGraph& graph, double lambda, double gamma = 1.0);

// JSON report mapping each pattern class label to its compensation factor.
std::string spectral_class_report(const Instance& instance, const Embedding& embedding,
                                  const PhysicalGraph& graph, double lambda, double gamma = 1.0);

}  // namespace chainlab
