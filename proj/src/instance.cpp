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

#include "chainlab/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "chainlab/rng.hpp"
#include "json.hpp"

namespace chainlab {

namespace {

// Generator streams per seed: 0 drives structure (couplings, code, word),
// 1 drives measurement noise.
constexpr std::uint64_t kStructureStream = 0;
constexpr std::uint64_t kNoiseStream = 1;

void check_n(int n) {
    if (n < 1) throw std::invalid_argument("instance size must be positive");
}

}  // namespace

std::string Instance::id() const {
    return kind + "-" + std::to_string(n) + "-" + std::to_string(seed);
}

double energy(const Instance& inst, const SpinVector& x) {
    if (static_cast<int>(x.size()) != inst.n)
        throw std::invalid_argument("state length does not match instance size");
    double e = inst.offset;
    for (const auto& [a, b, v] : inst.j) e += v * x[a] * x[b];
    for (int a = 0; a < inst.n; ++a) e += inst.h[a] * x[a];
    return e;
}

Instance gen_csg(int n, std::uint64_t seed) {
    check_n(n);
    Instance inst;
    inst.kind = "csg";
    inst.n = n;
    inst.seed = seed;
    inst.h.assign(n, 0.0);
    Rng rng(seed, kStructureStream);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            inst.j.emplace_back(a, b, static_cast<double>(rng.sign()));
    return inst;
}

Instance gen_bsg(int n, std::uint64_t seed) {
    check_n(n);
    if (n % 2 != 0) throw std::invalid_argument("bipartite instance size must be even");
    Instance inst;
    inst.kind = "bsg";
    inst.n = n;
    inst.seed = seed;
    inst.h.assign(n, 0.0);
    Rng rng(seed, kStructureStream);
    for (int a = 0; a < n / 2; ++a)
        for (int b = n / 2; b < n; ++b)
            inst.j.emplace_back(a, b, static_cast<double>(rng.sign()));
    return inst;
}

Instance gen_3dsg(std::array<int, 3> dims, std::uint64_t seed,
                  const std::vector<int>& vacant_sites,
                  const std::vector<std::pair<int, int>>& vacant_edges) {
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("lattice dimensions must be positive");
    const int lx = dims[0], ly = dims[1], lz = dims[2];
    const int n = lx * ly * lz;
    auto site = [&](int x, int y, int z) { return x + lx * (y + ly * z); };

    std::set<int> dead_sites(vacant_sites.begin(), vacant_sites.end());
    for (int s : dead_sites)
        if (s < 0 || s >= n) throw std::invalid_argument("vacant site out of range");
    std::set<std::pair<int, int>> dead_edges;
    for (auto [a, b] : vacant_edges) {
        if (a > b) std::swap(a, b);
        if (a < 0 || b >= n) throw std::invalid_argument("vacant edge out of range");
        dead_edges.emplace(a, b);
    }

    Instance inst;
    inst.kind = "3dsg";
    inst.n = n;
    inst.seed = seed;
    inst.dims = dims;
    inst.h.assign(n, 0.0);
    Rng rng(seed, kStructureStream);
    // Signs are consumed for every ideal lattice edge so that vacancies do
    // not shift the couplings of the surviving edges.
    for (int z = 0; z < lz; ++z)
        for (int y = 0; y < ly; ++y)
            for (int x = 0; x < lx; ++x) {
                const int a = site(x, y, z);
                const std::array<int, 3> nbrs{
                    x + 1 < lx ? site(x + 1, y, z) : -1,
                    y + 1 < ly ? site(x, y + 1, z) : -1,
                    z + 1 < lz ? site(x, y, z + 1) : -1,
                };
                for (int b : nbrs) {
                    if (b < 0) continue;
                    const double v = rng.sign();
                    if (dead_sites.count(a) || dead_sites.count(b)) continue;
                    if (dead_edges.count({a, b})) continue;
                    inst.j.emplace_back(a, b, v);
                }
            }
    std::sort(inst.j.begin(), inst.j.end());
    return inst;
}

Instance gen_cdma(int n, double load, double snr_db, std::uint64_t seed) {
    check_n(n);
    const int m = static_cast<int>(std::lround(load * n));
    if (m < 1) throw std::invalid_argument("code must have at least one row");
    const double sigma0sq = std::pow(10.0, -snr_db / 10.0) / 2.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    CdmaPayload p;
    p.m_rows = m;
    p.sigma0sq = sigma0sq;
    Rng structure(seed, kStructureStream);
    p.code.resize(static_cast<std::size_t>(m) * n);
    for (double& w : p.code) w = structure.sign() * scale;
    p.bits.resize(n);
    for (Spin& b : p.bits) b = static_cast<Spin>(structure.sign());
    Rng noise_rng(seed, kNoiseStream);
    p.noise.resize(m);
    for (double& z : p.noise) z = noise_rng.gaussian();
    const double sigma0 = std::sqrt(sigma0sq);
    p.received.resize(m);
    for (int mu = 0; mu < m; ++mu) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) acc += p.code[static_cast<std::size_t>(mu) * n + a] * p.bits[a];
        p.received[mu] = acc + sigma0 * p.noise[mu];
    }

    Instance inst;
    inst.kind = "cdma";
    inst.n = n;
    inst.seed = seed;
    inst.h.assign(n, 0.0);
    // |y - W x|^2 / (2 sigma0^2) expanded in x: the couplings are the
    // off-diagonal Gram entries, the fields come from the linear term, and
    // the x-independent part (|y|^2 plus the Gram diagonal) is kept as the
    // energy offset.
    const double inv = 1.0 / sigma0sq;
    double diag = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            double g = 0.0;
            for (int mu = 0; mu < m; ++mu)
                g += p.code[static_cast<std::size_t>(mu) * n + a] *
                     p.code[static_cast<std::size_t>(mu) * n + b];
            if (g != 0.0) inst.j.emplace_back(a, b, inv * g);
        }
        double gaa = 0.0, ya = 0.0;
        for (int mu = 0; mu < m; ++mu) {
            const double w = p.code[static_cast<std::size_t>(mu) * n + a];
            gaa += w * w;
            ya += p.received[mu] * w;
        }
        diag += gaa;
        inst.h[a] = -inv * ya;
    }
    double ysq = 0.0;
    for (double y : p.received) ysq += y * y;
    inst.offset = (ysq + diag) / 2.0 * inv;
    inst.cdma = std::move(p);
    inst.target_energy = energy(inst, inst.cdma->bits);
    return inst;
}

std::string Instance::to_json() const {
    nlohmann::json out;
    out["kind"] = kind;
    out["n"] = n;
    out["seed"] = seed;
    out["h"] = h;
    auto& jj = out["j"] = nlohmann::json::array();
    for (const auto& [a, b, v] : j) jj.push_back({a, b, v});
    if (target_energy)
        out["target_energy"] = *target_energy;
    else
        out["target_energy"] = nullptr;
    if (offset != 0.0) out["offset"] = offset;
    if (kind == "3dsg") out["dims"] = dims;
    if (cdma) {
        nlohmann::json c;
        c["bits"] = cdma->bits;
        c["m_rows"] = cdma->m_rows;
        c["sigma0sq"] = cdma->sigma0sq;
        auto& rows = c["code"] = nlohmann::json::array();
        for (int mu = 0; mu < cdma->m_rows; ++mu)
            rows.push_back(std::vector<double>(cdma->code.begin() + static_cast<std::size_t>(mu) * n,
                                               cdma->code.begin() + static_cast<std::size_t>(mu + 1) * n));
        c["received"] = cdma->received;
        c["noise"] = cdma->noise;
        out["cdma"] = std::move(c);
    }
    return out.dump(2);
}

Instance Instance::from_json(const std::string& text) {
    const auto in = nlohmann::json::parse(text);
    Instance inst;
    inst.kind = in.at("kind").get<std::string>();
    inst.n = in.at("n").get<int>();
    inst.seed = in.at("seed").get<std::uint64_t>();
    inst.h = in.at("h").get<std::vector<double>>();
    for (const auto& e : in.at("j"))
        inst.j.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
    if (in.contains("target_energy") && !in.at("target_energy").is_null())
        inst.target_energy = in.at("target_energy").get<double>();
    if (in.contains("offset")) inst.offset = in.at("offset").get<double>();
    if (in.contains("dims")) inst.dims = in.at("dims").get<std::array<int, 3>>();
    if (in.contains("cdma")) {
        const auto& c = in.at("cdma");
        CdmaPayload p;
        p.bits = c.at("bits").get<SpinVector>();
        p.m_rows = c.at("m_rows").get<int>();
        p.sigma0sq = c.at("sigma0sq").get<double>();
        for (const auto& row : c.at("code")) {
            const auto vals = row.get<std::vector<double>>();
            p.code.insert(p.code.end(), vals.begin(), vals.end());
        }
        p.received = c.at("received").get<std::vector<double>>();
        p.noise = c.at("noise").get<std::vector<double>>();
        inst.cdma = std::move(p);
    }
    if (static_cast<int>(inst.h.size()) != inst.n)
        throw std::invalid_argument("field vector length does not match instance size");
    return inst;
}

}  // namespace chainlab
