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

#include "chainlab/embedding.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace chainlab {

namespace {

// Throws a diagnostic if any chain uses a missing qubit, any consecutive
// path pair is uncoupled, or any required logical edge has no connecting
// coupler. Shared by the generators, which construct on ideal coordinates
// and must fail loudly on defective hardware regions.
void require_usable(const Embedding& emb, const PhysicalGraph& graph,
                    const std::vector<std::pair<int, int>>& logical_edges) {
    for (std::size_t a = 0; a < emb.chains.size(); ++a) {
        const auto& chain = emb.chains[a];
        for (int q : chain)
            if (!graph.has_qubit(q))
                throw std::runtime_error("embedding failure: chain " + std::to_string(a) +
                                         " needs missing qubit " + std::to_string(q));
        for (std::size_t i = 0; i + 1 < chain.size(); ++i)
            if (!graph.has_coupler(chain[i], chain[i + 1]))
                throw std::runtime_error("embedding failure: chain " + std::to_string(a) +
                                         " needs missing coupler (" + std::to_string(chain[i]) +
                                         ", " + std::to_string(chain[i + 1]) + ")");
    }
    for (const auto& [a, b] : logical_edges)
        if (connecting_couplers(graph, emb.chains[a], emb.chains[b]).empty())
            throw std::runtime_error("embedding failure: no coupler between chains " +
                                     std::to_string(a) + " and " + std::to_string(b));
}

}  // namespace

std::string Embedding::to_json() const {
    nlohmann::json out;
    out["chains"] = chains;
    return out.dump(2);
}

Embedding Embedding::from_json(const std::string& text) {
    Embedding emb;
    emb.chains = nlohmann::json::parse(text).at("chains").get<std::vector<std::vector<int>>>();
    return emb;
}

std::vector<std::pair<int, int>> connecting_couplers(const PhysicalGraph& graph,
                                                     const std::vector<int>& chain_a,
                                                     const std::vector<int>& chain_b) {
    std::vector<std::pair<int, int>> out;
    std::unordered_map<int, int> in_b;
    for (std::size_t j = 0; j < chain_b.size(); ++j) in_b.emplace(chain_b[j], 1);
    for (int qa : chain_a) {
        if (!graph.has_qubit(qa)) continue;
        for (int qb : graph.neighbors(qa))
            if (in_b.count(qb)) out.emplace_back(qa, qb);
    }
    std::sort(out.begin(), out.end());
    return out;
}

PatternKey canonical_pattern(int len_a, int len_b, std::vector<std::pair<int, int>> positions) {
    std::sort(positions.begin(), positions.end());
    PatternKey best;
    bool first = true;
    // Reversing either chain or swapping the pair leaves the physical system
    // unchanged, so minimize over all eight relabelings.
    for (int swap_ab = 0; swap_ab < 2; ++swap_ab) {
        for (int rev_a = 0; rev_a < 2; ++rev_a) {
            for (int rev_b = 0; rev_b < 2; ++rev_b) {
                PatternKey key;
                key.len_a = swap_ab ? len_b : len_a;
                key.len_b = swap_ab ? len_a : len_b;
                key.positions.reserve(positions.size());
                for (auto [pa, pb] : positions) {
                    if (rev_a) pa = len_a - 1 - pa;
                    if (rev_b) pb = len_b - 1 - pb;
                    key.positions.emplace_back(swap_ab ? pb : pa, swap_ab ? pa : pb);
                }
                std::sort(key.positions.begin(), key.positions.end());
                if (first || key < best) best = std::move(key);
                first = false;
            }
        }
    }
    return best;
}

std::string PatternKey::label() const {
    std::string out = std::to_string(len_a) + "-" + std::to_string(len_b) + ":";
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (i) out += ";";
        out += std::to_string(positions[i].first) + "," + std::to_string(positions[i].second);
    }
    return out;
}

std::vector<std::pair<int, int>> connecting_positions(const PhysicalGraph& graph,
                                                      const std::vector<int>& chain_a,
                                                      const std::vector<int>& chain_b) {
    std::unordered_map<int, int> pos_a, pos_b;
    for (std::size_t i = 0; i < chain_a.size(); ++i) pos_a.emplace(chain_a[i], static_cast<int>(i));
    for (std::size_t j = 0; j < chain_b.size(); ++j) pos_b.emplace(chain_b[j], static_cast<int>(j));
    std::vector<std::pair<int, int>> out;
    for (const auto& [qa, qb] : connecting_couplers(graph, chain_a, chain_b))
        out.emplace_back(pos_a.at(qa), pos_b.at(qb));
    std::sort(out.begin(), out.end());
    return out;
}

ValidationReport validate(const Embedding& emb, const Instance& inst, const PhysicalGraph& graph) {
    ValidationReport report;
    report.chain_count_matches = static_cast<int>(emb.chains.size()) == inst.n;

    std::unordered_map<int, int> owner;
    for (std::size_t a = 0; a < emb.chains.size(); ++a) {
        for (int q : emb.chains[a]) {
            if (q < 0 || q >= graph.num_qubits() || !graph.has_qubit(q)) {
                report.invalid_qubits.push_back(q);
                continue;
            }
            auto [it, fresh] = owner.emplace(q, static_cast<int>(a));
            if (!fresh) report.overlapping_qubits.push_back(q);
        }
    }

    for (std::size_t a = 0; a < emb.chains.size(); ++a) {
        const auto& chain = emb.chains[a];
        if (chain.empty()) {
            report.broken_chains.push_back(static_cast<int>(a));
            continue;
        }
        // BFS within the chain's qubit set.
        std::unordered_map<int, bool> seen;
        for (int q : chain) seen.emplace(q, false);
        bool ok = graph.has_qubit(chain[0]);
        if (ok) {
            std::deque<int> frontier{chain[0]};
            seen[chain[0]] = true;
            std::size_t reached = 1;
            while (!frontier.empty()) {
                const int q = frontier.front();
                frontier.pop_front();
                for (int nb : graph.neighbors(q)) {
                    auto it = seen.find(nb);
                    if (it != seen.end() && !it->second) {
                        it->second = true;
                        ++reached;
                        frontier.push_back(nb);
                    }
                }
            }
            ok = reached == seen.size();
        }
        if (!ok) report.broken_chains.push_back(static_cast<int>(a));
    }

    const int nchains = static_cast<int>(emb.chains.size());
    for (const auto& [a, b, v] : inst.j) {
        (void)v;
        int count = 0;
        if (a >= 0 && a < nchains && b >= 0 && b < nchains)
            count = static_cast<int>(connecting_couplers(graph, emb.chains[a], emb.chains[b]).size());
        report.edge_coupler_counts.push_back(count);
        if (count == 0) report.uncovered_edges.emplace_back(a, b);
    }
    return report;
}

Embedding embed_clique(int n, const PhysicalGraph& graph) {
    if (n < 1) throw std::invalid_argument("clique size must be positive");
    const int m = graph.grid_size();
    const int g = (n + 3) / 4;  // bundles; chain length g + 1
    if (g > m)
        throw std::runtime_error("embedding failure: clique of " + std::to_string(n) +
                                 " needs a grid of at least " + std::to_string(g));
    Embedding emb;
    for (int a = 0; a < n; ++a) {
        const int b = a / 4, k = a % 4;
        std::vector<int> chain;
        for (int c = 0; c <= b; ++c) chain.push_back(qubit_id(m, {b, c, 1, k}));
        for (int r = b; r < g; ++r) chain.push_back(qubit_id(m, {r, b, 0, k}));
        emb.chains.push_back(std::move(chain));
    }
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edges.emplace_back(a, b);
    require_usable(emb, graph, edges);
    return emb;
}

Embedding embed_biclique(int n, const PhysicalGraph& graph) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("biclique size must be even and positive");
    const int m = graph.grid_size();
    const int w = (n + 7) / 8;  // cells per wire; chain length
    if (w > m)
        throw std::runtime_error("embedding failure: biclique of " + std::to_string(n) +
                                 " needs a grid of at least " + std::to_string(w));
    Embedding emb;
    for (int a = 0; a < n / 2; ++a) {
        const int r = a / 4, k = a % 4;
        std::vector<int> chain;
        for (int c = 0; c < w; ++c) chain.push_back(qubit_id(m, {r, c, 1, k}));
        emb.chains.push_back(std::move(chain));
    }
    for (int a = 0; a < n / 2; ++a) {
        const int c = a / 4, k = a % 4;
        std::vector<int> chain;
        for (int r = 0; r < w; ++r) chain.push_back(qubit_id(m, {r, c, 0, k}));
        emb.chains.push_back(std::move(chain));
    }
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n / 2; ++a)
        for (int b = n / 2; b < n; ++b) edges.emplace_back(a, b);
    require_usable(emb, graph, edges);
    return emb;
}

Embedding embed_cubic(std::array<int, 3> dims, const PhysicalGraph& graph) {
    const int lx = dims[0], ly = dims[1], lz = dims[2];
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("lattice dimensions must be positive");
    const int m = graph.grid_size();
    if (2 * lx > m || 2 * ly > m || lz > 8)
        throw std::runtime_error("embedding failure: lattice needs a grid of at least " +
                                 std::to_string(2 * std::max(lx, ly)) + " and depth <= 8");
    Embedding emb;
    for (int z = 0; z < lz; ++z)
        for (int y = 0; y < ly; ++y)
            for (int x = 0; x < lx; ++x) {
                const int r0 = 2 * x, r1 = 2 * x + 1, c0 = 2 * y, c1 = 2 * y + 1;
                // Bend corners alternate across blocks (x, y parity) and
                // between depth groups so neighbors meet across boundaries.
                bool corner_high_row = x % 2 != 0;
                bool corner_high_col = y % 2 != 0;
                if (z % 2 != 0) {
                    corner_high_row = !corner_high_row;
                    corner_high_col = !corner_high_col;
                }
                const int rc = corner_high_row ? r1 : r0;
                const int ro = corner_high_row ? r0 : r1;
                const int cc = corner_high_col ? c1 : c0;
                const int co = corner_high_col ? c0 : c1;
                const int k = z / 2;
                emb.chains.push_back({qubit_id(m, {ro, cc, 0, k}), qubit_id(m, {rc, cc, 0, k}),
                                      qubit_id(m, {rc, cc, 1, k}), qubit_id(m, {rc, co, 1, k})});
            }
    auto site = [&](int x, int y, int z) { return x + lx * (y + ly * z); };
    std::vector<std::pair<int, int>> edges;
    for (int z = 0; z < lz; ++z)
        for (int y = 0; y < ly; ++y)
            for (int x = 0; x < lx; ++x) {
                if (x + 1 < lx) edges.emplace_back(site(x, y, z), site(x + 1, y, z));
                if (y + 1 < ly) edges.emplace_back(site(x, y, z), site(x, y + 1, z));
                if (z + 1 < lz) edges.emplace_back(site(x, y, z), site(x, y, z + 1));
            }
    require_usable(emb, graph, edges);
    return emb;
}

}  // namespace chainlab
