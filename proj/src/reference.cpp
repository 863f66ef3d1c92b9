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

#include "chainlab/reference.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace chainlab {

namespace {

// 2x2 symmetric-matrix product helper for the transfer-matrix oracle.
using Mat2 = std::array<double, 4>;

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

}  // namespace

GroundState brute_min(const Instance& inst) {
    const int n = inst.n;
    if (n < 1 || n > 24)
        throw std::invalid_argument("exhaustive search supports 1 <= n <= 24");

    // Symmetrized adjacency for O(degree) energy deltas.
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& [a, b, v] : inst.j) {
        adj[a].emplace_back(b, v);
        adj[b].emplace_back(a, v);
    }

    bool zero_field = true;
    for (double f : inst.h)
        if (f != 0.0) zero_field = false;

    SpinVector x(n, static_cast<Spin>(-1));
    double e = energy(inst, x);
    double best = e;
    SpinVector arg = x;

    // Gray-code walk: state k differs from k-1 in bit ctz(k). With all
    // fields zero, energies are invariant under global flip, so walking the
    // Gray code of n-1 bits (top spin pinned) still visits every energy.
    const int bits = zero_field && n > 1 ? n - 1 : n;
    const std::uint64_t steps = 1ULL << bits;
    for (std::uint64_t k = 1; k < steps; ++k) {
        const int i = std::countr_zero(k);
        double field = inst.h[i];
        for (const auto& [b, v] : adj[i]) field += v * x[b];
        e -= 2.0 * x[i] * field;
        x[i] = static_cast<Spin>(-x[i]);
        if (e < best) {
            best = e;
            arg = x;
        }
    }
    return {best, std::move(arg)};
}

std::vector<std::vector<double>> chain_gibbs_correlations(int length, double beta, double lam) {
    if (length < 1 || length > 20)
        throw std::invalid_argument("transfer-matrix oracle supports 1 <= length <= 20");
    const double w = std::exp(beta * lam);   // aligned bond weight
    const double u = std::exp(-beta * lam);  // broken bond weight
    const Mat2 t{w, u, u, w};                // one-bond transfer matrix
    const Mat2 sz{1.0, 0.0, 0.0, -1.0};      // spin-value insertion
    const Mat2 id{1.0, 0.0, 0.0, 1.0};

    // left[i] = product of i transfer matrices; left[length-1] spans the chain.
    std::vector<Mat2> left(length);
    left[0] = id;
    for (int i = 1; i < length; ++i) left[i] = mul(left[i - 1], t);

    auto contract = [](const Mat2& m) { return m[0] + m[1] + m[2] + m[3]; };
    const double z = contract(left[length - 1]);

    std::vector<std::vector<double>> c(length, std::vector<double>(length, 1.0));
    for (int i = 0; i < length; ++i)
        for (int j = i + 1; j < length; ++j) {
            Mat2 m = mul(left[i], sz);
            for (int k = i; k < j; ++k) m = mul(m, t);
            m = mul(m, sz);
            for (int k = j; k < length - 1; ++k) m = mul(m, t);
            c[i][j] = c[j][i] = contract(m) / z;
        }
    return c;
}

TwoChainCorrelations two_chain_gibbs_correlations(
    int la, int lb, const std::vector<std::tuple<int, int, double>>& couplers,
    double beta, double lam) {
    if (la < 1 || lb < 1 || la + lb > 20)
        throw std::invalid_argument("two-chain oracle supports la + lb <= 20");
    for (const auto& [i, j, v] : couplers) {
        (void)v;
        if (i < 0 || i >= la || j < 0 || j >= lb)
            throw std::invalid_argument("coupler endpoint outside chain");
    }

    const int n = la + lb;  // chain a occupies bits [0, la), chain b the rest
    const std::uint64_t states = 1ULL << n;
    std::vector<std::vector<double>> acc(la, std::vector<double>(lb, 0.0));
    double z = 0.0;
    std::vector<int> s(n);
    for (std::uint64_t k = 0; k < states; ++k) {
        for (int i = 0; i < n; ++i) s[i] = (k >> i) & 1 ? 1 : -1;
        double e = 0.0;
        for (int i = 0; i + 1 < la; ++i) e -= lam * s[i] * s[i + 1];
        for (int j = 0; j + 1 < lb; ++j) e -= lam * s[la + j] * s[la + j + 1];
        for (const auto& [i, j, v] : couplers) e += v * s[i] * s[la + j];
        const double w = std::exp(-beta * e);
        z += w;
        for (int i = 0; i < la; ++i)
            for (int j = 0; j < lb; ++j) acc[i][j] += w * s[i] * s[la + j];
    }

    TwoChainCorrelations out;
    out.cross.assign(la, std::vector<double>(lb, 0.0));
    double log_sum = 0.0;
    bool any_zero = false;
    int sign = 0;
    bool mixed = false;
    for (int i = 0; i < la; ++i)
        for (int j = 0; j < lb; ++j) {
            const double c = acc[i][j] / z;
            out.cross[i][j] = c;
            if (c == 0.0) {
                any_zero = true;
                continue;
            }
            const int cs = c > 0.0 ? 1 : -1;
            if (sign == 0)
                sign = cs;
            else if (sign != cs)
                mixed = true;
            log_sum += std::log(std::abs(c));
        }
    out.c_ab = any_zero || mixed || sign == 0
                   ? 0.0
                   : sign * std::exp(log_sum / (static_cast<double>(la) * lb));
    return out;
}

}  // namespace chainlab
