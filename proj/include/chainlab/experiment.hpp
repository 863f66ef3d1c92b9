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
#include <vector>

#include "chainlab/compile.hpp"
#include "chainlab/sampler.hpp"

namespace chainlab {

// Declarative description of a full pipeline run: generate an instance
// ensemble, embed, compile, sample, map back, and aggregate metrics, swept
// over a cross-product of parameter axes. Every randomized stage carries an
// explicit seed, and per-cell seeds are derived deterministically from the
// stage seed plus the cell and instance indices, so a config reproduces its
// outputs bit for bit regardless of worker count.

struct EnsembleSpec {
    std::string kind = "csg";  // csg | bsg | 3dsg | cdma
    int n = 16;
    std::array<int, 3> dims{0, 0, 0};  // 3dsg only; n = product
    int count = 10;
    std::uint64_t seed = 0;  // instance k uses seed + k
    double load = 1.4;       // cdma only
    double snr_db = 7.0;     // cdma only
};

struct EmbeddingSpec {
    std::string layout = "clique";  // clique | biclique | cubic
    int grid = 4;                   // target grid size m
};

struct CompileSpec {
    double lambda0 = 1.6;          // lambda = lambda0 * sqrt(sigma^2 N)
    std::optional<double> lambda;  // explicit chain strength instead
    std::string method = "none";   // none | susceptibility | spectral
    std::string xi = "inf";        // correlation length: number, "L", "inf"
    double gamma = 1.0;            // spectral drive ratio
};

struct SamplerSpec {
    std::string backend = "local";  // local | remote
    std::string endpoint;           // remote URL; CHAINLAB_ENDPOINT when empty
    SamplerParams params;
};

struct MappingSpec {
    std::string method = "majority";  // random | majority | aligned
    bool descent = false;             // follow with greedy descent
    std::uint64_t seed = 0;
};

// Cross-product sweep axes. An empty axis contributes one implicit cell at
// the base config's value. t_a only feeds the timing model, never sampling.
struct SweepAxes {
    std::vector<double> lambda0;
    std::vector<double> inv_xi;  // 0 means uniform spreading
    std::vector<double> beta;    // equilibrium temperature axis
    std::vector<double> t_a;     // anneal time per sample, microseconds
};

// Instance k of the ensemble, generated from seed + k.
Instance make_instance(const EnsembleSpec& ensemble, int k);

struct ExperimentConfig {
    EnsembleSpec ensemble;
    EmbeddingSpec embedding;
    CompileSpec compile;
    SamplerSpec sampler;
    MappingSpec mapping;
    SweepAxes sweep;
    std::string out_dir = "out";
    int workers = 1;

    // throws invalid_argument naming the offending key
    void validate() const;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);

    // "chain-strength-sweep": clique spin glasses swept over lambda0, the
    // median best mapped energy dips at an interior chain strength.
    // "eaee-xi-sweep": edge-energy variance as compensation sharpens from
    // uniform spreading (1/xi = 0) toward 1/xi = 1.
    static ExperimentConfig preset(const std::string& name);
};

// One sweep cell: the resolved axis values plus aggregates over instances.
// Quantiles interpolate linearly on the sorted per-instance values; success
// is the fraction of mapped samples at the brute-force optimum (instances
// small enough to enumerate, else NaN). EAEE columns are NaN unless every
// instance sampled and the ensemble shares one edge list.
struct CellResult {
    std::size_t index = 0;
    double lambda0 = 0.0;
    double inv_xi = 0.0;
    double beta = 0.0;
    double t_a = 0.0;
    int ok = 0;
    int failed = 0;
    std::vector<std::string> errors;  // "instance 3 sample: message"

    double median_best = 0.0;  // per-instance minimum mapped energy
    double mean_best = 0.0;
    double p25_best = 0.0;
    double p75_best = 0.0;
    double median_energy = 0.0;  // per-instance mean mapped energy
    double median_success = 0.0;
    double eaee_var = 0.0;
    double eaee_lo = 0.0;  // bootstrap 95% interval over instances
    double eaee_hi = 0.0;
    double median_tts_full_us = 0.0;  // from median_success at this t_a
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellResult> cells;

    bool ok() const;            // no cell recorded a failure
    std::string csv() const;    // one row per cell
    std::string to_json() const;  // sidecar: config echo, errors, counts
};

// Runs every cell of the sweep cross-product over the ensemble, writing
// per-instance artifacts under <out_dir>/cells/cell-XXX/ plus config.json,
// report.csv, and report.json at the top. Stage failures are recorded in the
// owning cell and the run continues; only filesystem or config problems
// throw. Cells and instances execute on `workers` threads; files are staged
// to a temporary name and renamed, so readers never observe partial writes.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace chainlab
