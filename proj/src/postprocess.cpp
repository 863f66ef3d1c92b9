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

#include "chainlab/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "chainlab/rng.hpp"
#include "json.hpp"

namespace chainlab {

namespace {

// Chains re-expressed as sample-column indices; a chain with no live qubit
// means the embedding does not belong to this sample set.
std::vector<std::vector<int>> chain_columns(const SampleSet& set, const Embedding& emb) {
    std::vector<std::vector<int>> cols(emb.chains.size());
    for (std::size_t a = 0; a < emb.chains.size(); ++a) {
        for (int q : emb.chains[a]) {
            const int idx = set.qubit_index(q);
            if (idx >= 0) cols[a].push_back(idx);
        }
        if (cols[a].empty())
            throw std::invalid_argument(
                "mapping: chain " + std::to_string(a) + " has no qubit in the sample set");
    }
    return cols;
}

bool unanimous(const SpinVector& z, const std::vector<int>& cols) {
    for (int c : cols)
        if (z[static_cast<std::size_t>(c)] != z[static_cast<std::size_t>(cols[0])]) return false;
    return true;
}

LogicalSampleSet skeleton(const SampleSet& set, const Instance& inst, const char* method) {
    LogicalSampleSet out;
    out.provenance = set.provenance;
    out.method = method;
    out.n = inst.n;
    return out;
}

void push_sample(LogicalSampleSet& out, const Instance& inst, SpinVector x, bool was_aligned,
                 std::size_t read) {
    out.energies.push_back(energy(inst, x));
    out.samples.push_back(std::move(x));
    out.aligned.push_back(was_aligned);
    out.gd_updates.push_back(0);
    out.source_reads.push_back(read);
}

void check_match(const SampleSet& set, const Instance& inst, const Embedding& emb) {
    if (static_cast<int>(emb.chains.size()) != inst.n)
        throw std::invalid_argument("mapping: chain count does not match the instance");
    (void)set;
}

}  // namespace

LogicalSampleSet map_random(const SampleSet& set, const Instance& inst, const Embedding& emb,
                            std::uint64_t seed) {
    check_match(set, inst, emb);
    const auto cols = chain_columns(set, emb);
    LogicalSampleSet out = skeleton(set, inst, "random");
    out.seeds.emplace_back("mapping", seed);

    for (std::size_t r = 0; r < set.samples.size(); ++r) {
        Rng rng(seed, r);
        const SpinVector& z = set.samples[r];
        SpinVector x(static_cast<std::size_t>(inst.n));
        bool all = true;
        for (std::size_t a = 0; a < cols.size(); ++a) {
            const auto& c = cols[a];
            x[a] = z[static_cast<std::size_t>(c[rng.below(c.size())])];
            all = all && unanimous(z, c);
        }
        push_sample(out, inst, std::move(x), all, r);
    }
    return out;
}

LogicalSampleSet map_majority(const SampleSet& set, const Instance& inst, const Embedding& emb,
                              std::uint64_t seed) {
    check_match(set, inst, emb);
    const auto cols = chain_columns(set, emb);
    LogicalSampleSet out = skeleton(set, inst, "majority");
    out.seeds.emplace_back("mapping", seed);

    for (std::size_t r = 0; r < set.samples.size(); ++r) {
        Rng rng(seed, r);
        const SpinVector& z = set.samples[r];
        SpinVector x(static_cast<std::size_t>(inst.n));
        bool all = true;
        for (std::size_t a = 0; a < cols.size(); ++a) {
            int sum = 0;
            for (int c : cols[a]) sum += z[static_cast<std::size_t>(c)];
            x[a] = sum != 0 ? static_cast<Spin>(sum > 0 ? 1 : -1)
                            : static_cast<Spin>(rng.sign());
            all = all && unanimous(z, cols[a]);
        }
        push_sample(out, inst, std::move(x), all, r);
    }
    return out;
}

LogicalSampleSet filter_aligned(const SampleSet& set, const Instance& inst, const Embedding& emb) {
    check_match(set, inst, emb);
    const auto cols = chain_columns(set, emb);
    LogicalSampleSet out = skeleton(set, inst, "aligned");

    for (std::size_t r = 0; r < set.samples.size(); ++r) {
        const SpinVector& z = set.samples[r];
        bool all = true;
        for (std::size_t a = 0; a < cols.size() && all; ++a) all = unanimous(z, cols[a]);
        if (!all) continue;
        SpinVector x(static_cast<std::size_t>(inst.n));
        for (std::size_t a = 0; a < cols.size(); ++a)
            x[a] = z[static_cast<std::size_t>(cols[a][0])];
        push_sample(out, inst, std::move(x), true, r);
    }
    return out;
}

LogicalSampleSet greedy_descent(const LogicalSampleSet& logical, const Instance& inst,
                                std::uint64_t order_seed) {
    if (logical.n != inst.n)
        throw std::invalid_argument("descent: set and instance sizes differ");

    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(inst.n));
    for (const auto& [a, b, v] : inst.j) {
        adj[static_cast<std::size_t>(a)].emplace_back(b, v);
        adj[static_cast<std::size_t>(b)].emplace_back(a, v);
    }

    // one permutation per set, reused across passes
    std::vector<int> order(static_cast<std::size_t>(inst.n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(order_seed, 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);

    LogicalSampleSet out = logical;
    out.method += "+descent";
    out.seeds.emplace_back("descent_order", order_seed);

    for (std::size_t s = 0; s < out.samples.size(); ++s) {
        SpinVector& x = out.samples[s];
        int updates = 0;
        for (bool moved = true; moved;) {
            moved = false;
            for (int a : order) {
                double local = inst.h[static_cast<std::size_t>(a)];
                for (const auto& [b, v] : adj[static_cast<std::size_t>(a)])
                    local += v * x[static_cast<std::size_t>(b)];
                if (local == 0.0) continue;
                const Spin want = local > 0.0 ? Spin(-1) : Spin(1);
                if (x[static_cast<std::size_t>(a)] != want) {
                    x[static_cast<std::size_t>(a)] = want;
                    ++updates;
                    moved = true;
                }
            }
        }
        out.gd_updates[s] += updates;
        out.energies[s] = energy(inst, x);
    }
    return out;
}

LogicalSampleSet random_states(const Instance& inst, int count, std::uint64_t seed) {
    if (count < 0) throw std::invalid_argument("random_states: count must be non-negative");
    LogicalSampleSet out;
    out.method = "uniform";
    out.n = inst.n;
    out.seeds.emplace_back("states", seed);
    for (int s = 0; s < count; ++s) {
        Rng rng(seed, static_cast<std::uint64_t>(s));
        SpinVector x(static_cast<std::size_t>(inst.n));
        for (auto& v : x) v = static_cast<Spin>(rng.sign());
        out.energies.push_back(energy(inst, x));
        out.samples.push_back(std::move(x));
        out.aligned.push_back(true);
        out.gd_updates.push_back(0);
        out.source_reads.push_back(static_cast<std::size_t>(s));
    }
    return out;
}

std::string LogicalSampleSet::to_csv() const {
    std::ostringstream csv;
    for (int a = 0; a < n; ++a) csv << "x" << a << ",";
    csv << "energy,aligned,gd_updates\n";
    csv.precision(17);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (Spin v : samples[s]) csv << static_cast<int>(v) << ",";
        csv << energies[s] << "," << (aligned[s] ? 1 : 0) << "," << gd_updates[s] << "\n";
    }
    return csv.str();
}

std::string LogicalSampleSet::metadata_json() const {
    nlohmann::json doc;
    doc["method"] = method;
    doc["n"] = n;
    doc["num_samples"] = samples.size();
    doc["aligned_samples"] =
        static_cast<std::size_t>(std::count(aligned.begin(), aligned.end(), true));
    auto& sd = doc["seeds"] = nlohmann::json::object();
    for (const auto& [name, value] : seeds) sd[name] = value;
    doc["provenance"] = nlohmann::json::parse(provenance.to_json());
    return doc.dump(2);
}

}  // namespace chainlab
