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
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chainlab {

// Chimera C_m coordinates. A cell is a K_{4,4}: shore 0 qubits ("vertical")
// couple to the same (shore, index) in the cells above and below, shore 1
// qubits ("horizontal") couple left and right. The linear id is row-major:
//
//     id = 8*(row*m + col) + 4*shore + index
//
// so one cell occupies ids [8*cell, 8*cell + 8).
struct QubitCoord {
    int row;
    int col;
    int shore;  // 0 vertical, 1 horizontal
    int index;  // 0..3 within the shore

    bool operator==(const QubitCoord&) const = default;
};

int qubit_id(int m, const QubitCoord& c);
QubitCoord qubit_coord(int m, int id);

// Immutable hardware graph: an ideal Chimera C_m minus declared defects.
// Safe to share across threads after construction.
class PhysicalGraph {
public:
    PhysicalGraph() = default;

    int grid_size() const { return m_; }
    int num_qubits() const { return num_qubits_; }
    int num_couplers() const { return num_couplers_; }

    bool has_qubit(int q) const { return q >= 0 && q < 8 * m_ * m_ && live_[q]; }
    bool has_coupler(int a, int b) const;

    // live neighbors of a live qubit, ascending ids
    const std::vector<int>& neighbors(int q) const;

    // all live couplers as (a, b) with a < b, lexicographically sorted
    std::vector<std::pair<int, int>> couplers() const;

    const std::vector<int>& defect_qubits() const { return defect_qubits_; }
    const std::vector<std::pair<int, int>>& defect_couplers() const { return defect_couplers_; }

    std::string to_json() const;
    static PhysicalGraph from_json(const std::string& text);

    friend PhysicalGraph build_chimera(int m, const std::vector<int>& defect_qubits,
                                       const std::vector<std::pair<int, int>>& defect_couplers);

private:
    int m_ = 0;
    int num_qubits_ = 0;
    int num_couplers_ = 0;
    std::vector<char> live_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> defect_qubits_;
    std::vector<std::pair<int, int>> defect_couplers_;
};

// Ideal C_m with the given defects removed. Defect qubits take their incident
// couplers with them. Out-of-range ids or non-Chimera coupler pairs are input
// errors.
PhysicalGraph build_chimera(int m, const std::vector<int>& defect_qubits = {},
                            const std::vector<std::pair<int, int>>& defect_couplers = {});

// Shortest-path length between a and b inside the subgraph induced by
// `subset` (need not be sorted). nullopt when disconnected. Throws if a or b
// is outside the subset or not live.
std::optional<int> subgraph_distance(const PhysicalGraph& graph, const std::vector<int>& subset,
                                     int a, int b);

}  // namespace chainlab
