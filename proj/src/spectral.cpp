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

#include "chainlab/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "chainlab/rng.hpp"
#include "json.hpp"

namespace chainlab {

namespace {

using std::int64_t;

void check_dsyev(int info) {
    if (info != 0) throw std::runtime_error("dsyev failed with info " + std::to_string(info));
}

// One global-spin-flip parity sector of the transverse-field operator.
// Representatives are the 2^(n-1) basis states with the top bit clear; the
// sector basis vector for z is (|z> + sector*|~z>)/sqrt(2). Flipping any bit
// but the top one stays inside the representative set; flipping the top bit
// folds back through the global flip and picks up the sector sign.
struct SectorOp {
    int n = 0;
    int sector = 1;
    double a_field = 0.0;
    int64_t dim = 0;
    std::vector<double> diag;

    SectorOp(int n_, int sector_, double a_field_,
             const std::vector<std::tuple<int, int, double>>& zz)
        : n(n_), sector(sector_), a_field(a_field_), dim(int64_t(1) << (n_ - 1)) {
        diag.assign(static_cast<std::size_t>(dim), 0.0);
        for (const auto& [i, j, c] : zz) {
            for (int64_t z = 0; z < dim; ++z) {
                const int anti = static_cast<int>(((z >> i) ^ (z >> j)) & 1);
                diag[static_cast<std::size_t>(z)] += c * (1 - 2 * anti);
            }
        }
    }

    void matvec(const double* x, double* y) const {
        for (int64_t z = 0; z < dim; ++z) y[z] = diag[static_cast<std::size_t>(z)] * x[z];
        if (a_field == 0.0) return;
        for (int i = 0; i + 1 < n; ++i) {
            const int64_t bit = int64_t(1) << i;
            for (int64_t z = 0; z < dim; ++z) y[z] += a_field * x[z ^ bit];
        }
        const double sa = sector * a_field;
        const int64_t low = dim - 1;
        for (int64_t z = 0; z < dim; ++z) y[z] += sa * x[low ^ z];
    }
};

std::vector<double> dense_lowest_from_matrix(std::vector<double>& mat, int64_t dim, int k) {
    std::vector<double> w(static_cast<std::size_t>(dim));
    check_dsyev(LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', static_cast<lapack_int>(dim),
                              mat.data(), static_cast<lapack_int>(dim), w.data()));
    w.resize(static_cast<std::size_t>(std::min<int64_t>(k, dim)));
    return w;
}

std::vector<double> dense_sector_lowest(const SectorOp& op, int k) {
    const int64_t dim = op.dim;
    std::vector<double> mat(static_cast<std::size_t>(dim * dim), 0.0);
    for (int64_t z = 0; z < dim; ++z) mat[static_cast<std::size_t>(z * dim + z)] = op.diag[static_cast<std::size_t>(z)];
    if (op.a_field != 0.0) {
        for (int i = 0; i + 1 < op.n; ++i) {
            const int64_t bit = int64_t(1) << i;
            for (int64_t z = 0; z < dim; ++z)
                mat[static_cast<std::size_t>(z * dim + (z ^ bit))] += op.a_field;
        }
        const double sa = op.sector * op.a_field;
        const int64_t low = dim - 1;
        for (int64_t z = 0; z < dim; ++z)
            mat[static_cast<std::size_t>(z * dim + (low ^ z))] += sa;
    }
    return dense_lowest_from_matrix(mat, dim, k);
}

std::vector<double> dense_full_lowest(int n, double a_field,
                                      const std::vector<std::tuple<int, int, double>>& zz, int k) {
    const int64_t dim = int64_t(1) << n;
    std::vector<double> mat(static_cast<std::size_t>(dim * dim), 0.0);
    for (const auto& [i, j, c] : zz) {
        for (int64_t z = 0; z < dim; ++z) {
            const int anti = static_cast<int>(((z >> i) ^ (z >> j)) & 1);
            mat[static_cast<std::size_t>(z * dim + z)] += c * (1 - 2 * anti);
        }
    }
    if (a_field != 0.0) {
        for (int i = 0; i < n; ++i) {
            const int64_t bit = int64_t(1) << i;
            for (int64_t z = 0; z < dim; ++z)
                mat[static_cast<std::size_t>(z * dim + (z ^ bit))] += a_field;
        }
    }
    return dense_lowest_from_matrix(mat, dim, k);
}

// Exact classical spectrum: with no transverse field the operator is diagonal,
// and enumerating all states keeps degeneracies that a Krylov iteration from a
// single start vector would collapse.
std::vector<double> classical_lowest(int n, const std::vector<std::tuple<int, int, double>>& zz,
                                     int k) {
    const int64_t dim = int64_t(1) << n;
    std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
    for (const auto& [i, j, c] : zz) {
        for (int64_t z = 0; z < dim; ++z) {
            const int anti = static_cast<int>(((z >> i) ^ (z >> j)) & 1);
            e[static_cast<std::size_t>(z)] += c * (1 - 2 * anti);
        }
    }
    const auto kk = static_cast<std::size_t>(std::min<int64_t>(k, dim));
    std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(kk - 1), e.end());
    e.resize(kk);
    std::sort(e.begin(), e.end());
    return e;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double c, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Orthogonalize w against the basis twice (classical Gram-Schmidt repeated),
// accumulating the projection coefficients; returns the remaining norm.
double orthogonalize(std::vector<double>& w, const std::vector<std::vector<double>>& basis,
                     std::vector<double>* coeff) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const double c = dot(basis[j], w);
            axpy(-c, basis[j], w);
            if (coeff) (*coeff)[j] += c;
        }
    }
    return norm(w);
}

// Lowest eigenvalues by thick-restart Lanczos with full reorthogonalization.
// The projected matrix T is maintained as V^T H V exactly (column by column),
// so after each cycle H V = V T + beta * v_next e_last^T and the standard
// residual estimate beta * |s_last| applies.
std::vector<double> lanczos_lowest(const SectorOp& op, int k) {
    const int64_t dim = op.dim;
    if (dim <= 64) {
        // Small spaces are solved exactly through the same operator.
        std::vector<double> mat(static_cast<std::size_t>(dim * dim), 0.0);
        std::vector<double> unit(static_cast<std::size_t>(dim), 0.0);
        std::vector<double> col(static_cast<std::size_t>(dim));
        for (int64_t j = 0; j < dim; ++j) {
            unit[static_cast<std::size_t>(j)] = 1.0;
            op.matvec(unit.data(), col.data());
            unit[static_cast<std::size_t>(j)] = 0.0;
            for (int64_t i = 0; i < dim; ++i)
                mat[static_cast<std::size_t>(i * dim + j)] = col[static_cast<std::size_t>(i)];
        }
        return dense_lowest_from_matrix(mat, dim, k);
    }

    k = static_cast<int>(std::min<int64_t>(k, dim));
    const int m = static_cast<int>(std::min<int64_t>(dim, dim >= (int64_t(1) << 22) ? 20 : 32));
    Rng rng(0x7370656374726121ULL, op.sector == 1 ? 0 : 1);

    auto fresh_direction = [&](const std::vector<std::vector<double>>& basis) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::vector<double> v(static_cast<std::size_t>(dim));
            for (auto& x : v) x = rng.gaussian();
            if (orthogonalize(v, basis, nullptr) > 1e-6 * std::sqrt(static_cast<double>(dim))) {
                const double nv = norm(v);
                for (auto& x : v) x /= nv;
                return v;
            }
        }
        throw std::runtime_error("lanczos: failed to draw a fresh direction");
    };

    std::vector<std::vector<double>> basis;
    basis.push_back(fresh_direction({}));
    std::vector<double> tmat(static_cast<std::size_t>(m) * m, 0.0);
    double tmax = 1.0;

    for (int cycle = 0; cycle < 400; ++cycle) {
        // Grow the basis to m vectors; each step computes the exact projected
        // column for the newest vector and appends the normalized remainder.
        while (static_cast<int>(basis.size()) < m) {
            const int cur = static_cast<int>(basis.size()) - 1;
            std::vector<double> w(static_cast<std::size_t>(dim));
            op.matvec(basis[static_cast<std::size_t>(cur)].data(), w.data());
            std::vector<double> coeff(basis.size(), 0.0);
            const double beta = orthogonalize(w, basis, &coeff);
            for (int j = 0; j <= cur; ++j) {
                tmat[static_cast<std::size_t>(j) * m + cur] = coeff[static_cast<std::size_t>(j)];
                tmat[static_cast<std::size_t>(cur) * m + j] = coeff[static_cast<std::size_t>(j)];
                tmax = std::max(tmax, std::abs(coeff[static_cast<std::size_t>(j)]));
            }
            if (beta > 1e-12 * tmax) {
                for (auto& x : w) x /= beta;
                basis.push_back(std::move(w));
                tmat[static_cast<std::size_t>(cur) * m + cur + 1] = beta;
                tmat[static_cast<std::size_t>(cur + 1) * m + cur] = beta;
            } else {
                // Invariant subspace: continue in a fresh direction with zero
                // coupling to the converged block.
                basis.push_back(fresh_direction(basis));
            }
        }

        // Project the final column, leaving the residual that links this
        // Krylov space to the next.
        std::vector<double> w(static_cast<std::size_t>(dim));
        op.matvec(basis[static_cast<std::size_t>(m - 1)].data(), w.data());
        std::vector<double> coeff(basis.size(), 0.0);
        const double beta_m = orthogonalize(w, basis, &coeff);
        for (int j = 0; j < m; ++j) {
            tmat[static_cast<std::size_t>(j) * m + m - 1] = coeff[static_cast<std::size_t>(j)];
            tmat[static_cast<std::size_t>(m - 1) * m + j] = coeff[static_cast<std::size_t>(j)];
            tmax = std::max(tmax, std::abs(coeff[static_cast<std::size_t>(j)]));
        }

        std::vector<double> small = tmat;
        std::vector<double> theta(static_cast<std::size_t>(m));
        check_dsyev(LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'V', 'U', m, small.data(), m, theta.data()));
        const double scale = std::max(1.0, std::max(std::abs(theta.front()), std::abs(theta.back())));

        bool converged = true;
        for (int i = 0; i < k; ++i) {
            const double res = beta_m * std::abs(small[static_cast<std::size_t>(m - 1) * m + i]);
            if (res > 1e-11 * scale) converged = false;
        }
        if (converged) return {theta.begin(), theta.begin() + k};

        // Thick restart: keep the best Ritz vectors plus the residual
        // direction; their exact projected block is known analytically.
        const int keep = std::min(k + 4, m - 3);
        std::vector<std::vector<double>> next;
        next.reserve(static_cast<std::size_t>(keep) + 1);
        for (int j = 0; j < keep; ++j) {
            std::vector<double> y(static_cast<std::size_t>(dim), 0.0);
            for (int i = 0; i < m; ++i)
                axpy(small[static_cast<std::size_t>(i) * m + j], basis[static_cast<std::size_t>(i)], y);
            next.push_back(std::move(y));
        }
        if (beta_m > 1e-12 * tmax) {
            for (auto& x : w) x /= beta_m;
            next.push_back(std::move(w));
        } else {
            next.push_back(fresh_direction(next));
        }
        basis = std::move(next);
        std::fill(tmat.begin(), tmat.end(), 0.0);
        for (int j = 0; j < keep; ++j) {
            tmat[static_cast<std::size_t>(j) * m + j] = theta[static_cast<std::size_t>(j)];
            const double link = beta_m * small[static_cast<std::size_t>(m - 1) * m + j];
            tmat[static_cast<std::size_t>(j) * m + keep] = link;
            tmat[static_cast<std::size_t>(keep) * m + j] = link;
        }
    }
    throw std::runtime_error("lanczos: no convergence within the restart budget");
}

SpectralBackend resolve_backend(SpectralBackend backend, int n, bool sector_reduction) {
    if (backend != SpectralBackend::Auto) return backend;
    if (!sector_reduction) return SpectralBackend::Dense;
    return n <= 10 ? SpectralBackend::Dense : SpectralBackend::Sparse;
}

}  // namespace

std::vector<double> tfim_lowest(int n, double a_field,
                                const std::vector<std::tuple<int, int, double>>& zz,
                                int k, SpectralBackend backend, bool sector_reduction) {
    if (n < 1) throw std::invalid_argument("tfim_lowest: need at least one qubit");
    if (k < 1) throw std::invalid_argument("tfim_lowest: need at least one eigenvalue");
    for (const auto& [i, j, c] : zz) {
        (void)c;
        if (i < 0 || i >= n || j < 0 || j >= n || i == j)
            throw std::invalid_argument("tfim_lowest: coupling endpoints out of range");
    }
    const SpectralBackend mode = resolve_backend(backend, n, sector_reduction);
    if (n > kSparseQubitCap)
        throw std::invalid_argument("tfim_lowest: " + std::to_string(n) + " qubits exceeds the " +
                                    std::to_string(kSparseQubitCap) + "-qubit cap");
    if (mode == SpectralBackend::Dense && sector_reduction && n > kDenseQubitCap)
        throw std::invalid_argument("tfim_lowest: dense backend is capped at " +
                                    std::to_string(kDenseQubitCap) + " qubits");
    if (!sector_reduction) {
        if (mode != SpectralBackend::Dense)
            throw std::invalid_argument("tfim_lowest: the full-space path is dense only");
        if (n > kDenseFullQubitCap)
            throw std::invalid_argument("tfim_lowest: the full-space path is capped at " +
                                        std::to_string(kDenseFullQubitCap) + " qubits");
        if (a_field == 0.0) return classical_lowest(n, zz, k);
        return dense_full_lowest(n, a_field, zz, k);
    }
    if (a_field == 0.0) return classical_lowest(n, zz, k);

    std::vector<double> merged;
    for (int sector : {+1, -1}) {
        const SectorOp op(n, sector, a_field, zz);
        auto part = mode == SpectralBackend::Dense ? dense_sector_lowest(op, k)
                                                   : lanczos_lowest(op, k);
        merged.insert(merged.end(), part.begin(), part.end());
    }
    std::sort(merged.begin(), merged.end());
    merged.resize(static_cast<std::size_t>(std::min<int64_t>(k, int64_t(1) << n)));
    return merged;
}

SpectralResult chain_gap(int length, double a_field, double b_scale, double lambda,
                         SpectralBackend backend) {
    if (length < 1) throw std::invalid_argument("chain_gap: length must be positive");
    std::vector<std::tuple<int, int, double>> zz;
    for (int i = 0; i + 1 < length; ++i) zz.emplace_back(i, i + 1, -b_scale * lambda);
    const auto e = tfim_lowest(length, a_field, zz, 3, backend);
    SpectralResult r;
    r.qubits = length;
    r.e0 = e[0];
    r.e1 = e[1];
    r.e2 = e.size() > 2 ? e[2] : std::numeric_limits<double>::quiet_NaN();
    r.derived = (r.e1 - r.e0) / 2.0;
    return r;
}

SpectralResult pair_jeff(int len_a, int len_b,
                         const std::vector<std::pair<int, int>>& positions,
                         double a_field, double b_scale, double lambda, double jhat,
                         SpectralBackend backend) {
    if (len_a < 1 || len_b < 1) throw std::invalid_argument("pair_jeff: chain lengths must be positive");
    if (jhat == 0.0) throw std::invalid_argument("pair_jeff: the logical coupling must be nonzero");
    if (b_scale <= 0.0) throw std::invalid_argument("pair_jeff: b_scale must be positive");
    if (positions.empty()) throw std::invalid_argument("pair_jeff: need at least one connecting coupler");
    for (const auto& [pa, pb] : positions)
        if (pa < 0 || pa >= len_a || pb < 0 || pb >= len_b)
            throw std::invalid_argument("pair_jeff: coupler position outside the chains");

    const int n = len_a + len_b;
    std::vector<std::tuple<int, int, double>> zz;
    for (int i = 0; i + 1 < len_a; ++i) zz.emplace_back(i, i + 1, -b_scale * lambda);
    for (int i = 0; i + 1 < len_b; ++i) zz.emplace_back(len_a + i, len_a + i + 1, -b_scale * lambda);
    const double per_coupler = b_scale * jhat / static_cast<double>(positions.size());
    for (const auto& [pa, pb] : positions) zz.emplace_back(pa, len_a + pb, per_coupler);

    const auto e = tfim_lowest(n, a_field, zz, 3, backend);
    SpectralResult r;
    r.qubits = n;
    r.e0 = e[0];
    r.e1 = e[1];
    r.e2 = e[2];
    const double gap = r.e2 - r.e1;
    if (gap <= 1e-10 * std::max(1.0, std::abs(r.e1))) {
        r.degenerate = true;
        r.derived = 0.0;
        r.chi = 0.0;
        return r;
    }
    r.derived = (jhat > 0 ? 1.0 : -1.0) * gap / (2.0 * b_scale);
    r.chi = r.derived / jhat;
    return r;
}

namespace {

// Pattern class -> compensation factor for every coupled pair of chains.
std::map<PatternKey, double> class_chi(const Instance& inst, const Embedding& emb,
                                       const PhysicalGraph& graph, double lambda, double gamma) {
    if (lambda <= 0.0) throw std::invalid_argument("spectral compensation: lambda must be positive");
    if (gamma < 0.0) throw std::invalid_argument("spectral compensation: gamma must be nonnegative");
    std::map<PatternKey, double> chi;
    for (const auto& [a, b, v] : inst.j) {
        (void)v;
        if (a < 0 || b < 0 || a >= static_cast<int>(emb.chains.size()) ||
            b >= static_cast<int>(emb.chains.size()))
            throw std::runtime_error("spectral compensation: coupling endpoint has no chain");
        const auto& ca = emb.chains[static_cast<std::size_t>(a)];
        const auto& cb = emb.chains[static_cast<std::size_t>(b)];
        const auto positions = connecting_positions(graph, ca, cb);
        if (positions.empty())
            throw std::runtime_error("spectral compensation: variables " + std::to_string(a) +
                                     " and " + std::to_string(b) + " have no connecting coupler");
        const auto key = canonical_pattern(static_cast<int>(ca.size()), static_cast<int>(cb.size()),
                                           positions);
        if (chi.count(key)) continue;
        const int total = key.len_a + key.len_b;
        if (total > kSparseQubitCap)
            throw std::runtime_error(
                "spectral compensation: pattern " + key.label() + " needs " + std::to_string(total) +
                " qubits, beyond the " + std::to_string(kSparseQubitCap) +
                "-qubit cap; use the susceptibility method for this embedding");
        if (gamma == 0.0) {
            // Classical limit: rigid chains transmit the coupling untouched.
            chi.emplace(key, 1.0);
            continue;
        }
        const auto r = pair_jeff(key.len_a, key.len_b, key.positions, gamma * lambda, 1.0, lambda,
                                 0.1 * lambda);
        if (r.degenerate || r.chi <= 0.0)
            throw std::runtime_error("spectral compensation: degenerate spectrum for pattern " +
                                     key.label());
        chi.emplace(key, r.chi);
    }
    return chi;
}

}  // namespace

std::vector<double> spectral_edge_chi(const Instance& inst, const Embedding& emb,
                                      const PhysicalGraph& graph, double lambda, double gamma) {
    const auto chi = class_chi(inst, emb, graph, lambda, gamma);
    std::vector<double> out;
    out.reserve(inst.j.size());
    for (const auto& [a, b, v] : inst.j) {
        (void)v;
        const auto& ca = emb.chains[static_cast<std::size_t>(a)];
        const auto& cb = emb.chains[static_cast<std::size_t>(b)];
        const auto key = canonical_pattern(static_cast<int>(ca.size()), static_cast<int>(cb.size()),
                                           connecting_positions(graph, ca, cb));
        out.push_back(chi.at(key));
    }
    return out;
}

PhysicalProblem spectral_compensate(const Instance& inst, const Embedding& emb,
                                    const PhysicalGraph& graph, double lambda, double gamma) {
    CompensationConfig config;
    config.method = CompensationMethod::Spectral;
    config.gamma = gamma;
    return compensate(inst, emb, graph, lambda, config);
}

std::string spectral_class_report(const Instance& inst, const Embedding& emb,
                                  const PhysicalGraph& graph, double lambda, double gamma) {
    const auto chi = class_chi(inst, emb, graph, lambda, gamma);
    nlohmann::json classes = nlohmann::json::object();
    for (const auto& [key, value] : chi) classes[key.label()] = value;
    nlohmann::json doc;
    doc["lambda"] = lambda;
    doc["gamma"] = gamma;
    doc["classes"] = classes;
    return doc.dump(2);
}

}  // namespace chainlab
