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

#include "chainlab/topology.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "json.hpp"

namespace chainlab {

int qubit_id(int m, const QubitCoord& c) {
    if (c.row < 0 || c.row >= m || c.col < 0 || c.col >= m || c.shore < 0 || c.shore > 1 ||
        c.index < 0 || c.index > 3)
        throw std::invalid_argument("qubit_id: coordinate out of range");
    return 8 * (c.row * m + c.col) + 4 * c.shore + c.index;
}

QubitCoord qubit_coord(int m, int id) {
    if (m < 1 || id < 0 || id >= 8 * m * m) throw std::invalid_argument("qubit_coord: id out of range");
    int cell = id / 8, within = id % 8;
    return QubitCoord{cell / m, cell % m, within / 4, within % 4};
}

bool PhysicalGraph::has_coupler(int a, int b) const {
    if (!has_qubit(a) || !has_qubit(b)) return false;
    const auto& na = adj_[a];
    return std::binary_search(na.begin(), na.end(), b);
}

const std::vector<int>& PhysicalGraph::neighbors(int q) const {
    if (!has_qubit(q)) throw std::invalid_argument("neighbors: not a live qubit");
    return adj_[q];
}

std::vector<std::pair<int, int>> PhysicalGraph::couplers() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(num_couplers_);
    for (int q = 0; q < static_cast<int>(adj_.size()); ++q)
        for (int nb : adj_[q])
            if (nb > q) out.emplace_back(q, nb);
    return out;
}

namespace {

// the couplers every Chimera cell contributes: K_{4,4} inside the cell, plus
// shore-preserving links to the cell below and the cell to the right
void ideal_edges_from(int m, int r, int c, std::vector<std::pair<int, int>>& out) {
    int base = 8 * (r * m + c);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.emplace_back(base + i, base + 4 + j);
    if (r + 1 < m)
        for (int k = 0; k < 4; ++k) out.emplace_back(base + k, base + 8 * m + k);
    if (c + 1 < m)
        for (int k = 0; k < 4; ++k) out.emplace_back(base + 4 + k, base + 8 + 4 + k);
}

}  // namespace

PhysicalGraph build_chimera(int m, const std::vector<int>& defect_qubits,
                            const std::vector<std::pair<int, int>>& defect_couplers) {
    if (m < 1) throw std::invalid_argument("build_chimera: m must be >= 1");
    const int n = 8 * m * m;

    PhysicalGraph g;
    g.m_ = m;
    g.live_.assign(n, 1);
    for (int q : defect_qubits) {
        if (q < 0 || q >= n) throw std::invalid_argument("build_chimera: defect qubit out of range");
        g.live_[q] = 0;
    }

    std::vector<std::pair<int, int>> ideal;
    ideal.reserve(16 * m * m + 8 * m * (m - 1));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) ideal_edges_from(m, r, c, ideal);
    for (auto& e : ideal)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(ideal.begin(), ideal.end());

    std::vector<char> dead_edge(ideal.size(), 0);
    for (auto e : defect_couplers) {
        if (e.first > e.second) std::swap(e.first, e.second);
        auto it = std::lower_bound(ideal.begin(), ideal.end(), e);
        if (it == ideal.end() || *it != e)
            throw std::invalid_argument("build_chimera: defect coupler is not a Chimera edge");
        dead_edge[it - ideal.begin()] = 1;
    }

    g.adj_.assign(n, {});
    for (size_t i = 0; i < ideal.size(); ++i) {
        auto [a, b] = ideal[i];
        if (dead_edge[i] || !g.live_[a] || !g.live_[b]) continue;
        g.adj_[a].push_back(b);
        g.adj_[b].push_back(a);
        ++g.num_couplers_;
    }
    for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());

    for (char alive : g.live_) g.num_qubits_ += alive;
    g.defect_qubits_ = defect_qubits;
    std::sort(g.defect_qubits_.begin(), g.defect_qubits_.end());
    g.defect_qubits_.erase(std::unique(g.defect_qubits_.begin(), g.defect_qubits_.end()),
                           g.defect_qubits_.end());
    g.defect_couplers_ = defect_couplers;
    for (auto& e : g.defect_couplers_)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(g.defect_couplers_.begin(), g.defect_couplers_.end());
    g.defect_couplers_.erase(std::unique(g.defect_couplers_.begin(), g.defect_couplers_.end()),
                             g.defect_couplers_.end());
    return g;
}

std::optional<int> subgraph_distance(const PhysicalGraph& graph, const std::vector<int>& subset,
                                     int a, int b) {
    const int n = 8 * graph.grid_size() * graph.grid_size();
    std::vector<char> in(n, 0);
    for (int q : subset) {
        if (q < 0 || q >= n || !graph.has_qubit(q))
            throw std::invalid_argument("subgraph_distance: subset member is not a live qubit");
        in[q] = 1;
    }
    if (a < 0 || a >= n || !in[a] || b < 0 || b >= n || !in[b])
        throw std::invalid_argument("subgraph_distance: endpoint outside subset");
    if (a == b) return 0;

    std::vector<int> dist(n, -1);
    dist[a] = 0;
    std::deque<int> frontier{a};
    while (!frontier.empty()) {
        int q = frontier.front();
        frontier.pop_front();
        for (int nb : graph.neighbors(q)) {
            if (!in[nb] || dist[nb] >= 0) continue;
            dist[nb] = dist[q] + 1;
            if (nb == b) return dist[nb];
            frontier.push_back(nb);
        }
    }
    return std::nullopt;
}

std::string PhysicalGraph::to_json() const {
    nlohmann::json j;
    j["m"] = m_;
    j["defect_qubits"] = defect_qubits_;
    j["defect_couplers"] = nlohmann::json::array();
    for (auto& e : defect_couplers_) j["defect_couplers"].push_back({e.first, e.second});
    return j.dump(2);
}

PhysicalGraph PhysicalGraph::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<int> dq = j.value("defect_qubits", std::vector<int>{});
    std::vector<std::pair<int, int>> dc;
    if (j.contains("defect_couplers"))
        for (auto& e : j["defect_couplers"]) dc.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return build_chimera(j.at("m").get<int>(), dq, dc);
}

}  // namespace chainlab
