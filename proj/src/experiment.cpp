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

#include "chainlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "chainlab/embedding.hpp"
#include "chainlab/instance.hpp"
#include "chainlab/metrics.hpp"
#include "chainlab/postprocess.hpp"
#include "chainlab/reference.hpp"
#include "chainlab/remote.hpp"
#include "chainlab/rng.hpp"
#include "chainlab/topology.hpp"

namespace fs = std::filesystem;

namespace chainlab {

namespace {

constexpr double NaN = std::numeric_limits<double>::quiet_NaN();

void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void check_keys(const nlohmann::json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            fail(path + "." + key, "unknown key");
    }
}

template <typename T>
void get_to(const nlohmann::json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.contains(key)) return;
    try {
        obj.at(key).get_to(out);
    } catch (const nlohmann::json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

// correlation-length spec: a positive number, "L" (longest chain), or "inf"
double resolve_xi(const std::string& spec, int longest_chain) {
    if (spec == "inf") return std::numeric_limits<double>::infinity();
    if (spec == "L") return static_cast<double>(longest_chain);
    return std::stod(spec);
}

bool xi_spec_valid(const std::string& spec) {
    if (spec == "inf" || spec == "L") return true;
    try {
        std::size_t used = 0;
        const double v = std::stod(spec, &used);
        return used == spec.size() && v > 0.0 && std::isfinite(v);
    } catch (const std::exception&) {
        return false;
    }
}

CompensationMethod method_from(const std::string& name) {
    if (name == "none") return CompensationMethod::None;
    if (name == "susceptibility") return CompensationMethod::Susceptibility;
    if (name == "spectral") return CompensationMethod::Spectral;
    throw std::invalid_argument("config: compile.method: unknown method " + name);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

// linear interpolation on the sorted values, the same convention as the
// bootstrap percentiles
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return NaN;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double w = pos - static_cast<double>(i);
    return sorted[i] * (1.0 - w) + sorted[i + 1] * w;
}

int effective_n(const EnsembleSpec& ens) {
    if (ens.kind == "3dsg") return ens.dims[0] * ens.dims[1] * ens.dims[2];
    return ens.n;
}

struct CellAxes {
    double lambda0 = 0.0;
    double inv_xi = 0.0;
    double beta = 0.0;
    double t_a = 0.0;
};

struct InstanceOutcome {
    bool ok = false;
    std::string error;
    double best = NaN;
    double mean_energy = NaN;
    double success = NaN;
    LogicalSampleSet mapped;
};

std::string cell_name(std::size_t index) {
    std::ostringstream out;
    out << "cell-" << std::setw(3) << std::setfill('0') << index;
    return out.str();
}

std::string remote_endpoint(const SamplerSpec& spec) {
    if (!spec.endpoint.empty()) return spec.endpoint;
    if (const char* env = std::getenv("CHAINLAB_ENDPOINT")) return env;
    throw std::runtime_error("remote backend needs an endpoint (CHAINLAB_ENDPOINT unset)");
}

InstanceOutcome run_job(const ExperimentConfig& cfg, const PhysicalGraph& graph,
                        const Embedding& emb, int longest_chain, const CellAxes& axes,
                        std::size_t cell, int k, const fs::path& cell_dir,
                        const Instance& inst, std::optional<double> target) {
    InstanceOutcome out;
    std::string stage = "generate";
    try {
        const std::string tag = std::to_string(k);
        atomic_write(cell_dir / ("inst-" + tag + ".json"), inst.to_json());

        stage = "compile";
        const double lambda =
            cfg.compile.lambda ? *cfg.compile.lambda : chain_strength(inst, axes.lambda0);
        CompensationConfig comp;
        comp.method = method_from(cfg.compile.method);
        comp.gamma = cfg.compile.gamma;
        if (cfg.sweep.inv_xi.empty())
            comp.xi = resolve_xi(cfg.compile.xi, longest_chain);
        else
            comp.xi = axes.inv_xi == 0.0 ? std::numeric_limits<double>::infinity()
                                         : 1.0 / axes.inv_xi;
        const PhysicalProblem problem = rescale(compensate(inst, emb, graph, lambda, comp));
        atomic_write(cell_dir / ("problem-" + tag + ".json"), problem.to_json());

        stage = "sample";
        SamplerParams params = cfg.sampler.params;
        params.beta = axes.beta;
        params.seed = Rng::word(cfg.sampler.params.seed, cell, static_cast<std::uint64_t>(k));
        const SampleSet physical =
            cfg.sampler.backend == "remote"
                ? remote_sample(problem, params, remote_endpoint(cfg.sampler))
                : sample(problem, params);
        atomic_write(cell_dir / ("samples-" + tag + ".json"), physical.to_json());

        stage = "map";
        const std::uint64_t map_seed =
            Rng::word(cfg.mapping.seed, cell, 2 * static_cast<std::uint64_t>(k));
        LogicalSampleSet mapped;
        if (cfg.mapping.method == "random")
            mapped = map_random(physical, inst, emb, map_seed);
        else if (cfg.mapping.method == "majority")
            mapped = map_majority(physical, inst, emb, map_seed);
        else
            mapped = filter_aligned(physical, inst, emb);
        if (cfg.mapping.descent)
            mapped = greedy_descent(
                mapped, inst,
                Rng::word(cfg.mapping.seed, cell, 2 * static_cast<std::uint64_t>(k) + 1));
        atomic_write(cell_dir / ("mapped-" + tag + ".csv"), mapped.to_csv());
        atomic_write(cell_dir / ("mapped-" + tag + ".meta.json"), mapped.metadata_json());

        stage = "metrics";
        if (!mapped.energies.empty()) {
            out.best = *std::min_element(mapped.energies.begin(), mapped.energies.end());
            double acc = 0.0;
            for (double e : mapped.energies) acc += e;
            out.mean_energy = acc / static_cast<double>(mapped.energies.size());
            if (target) out.success = success_rate(mapped, *target);
        }
        out.mapped = std::move(mapped);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = "instance " + std::to_string(k) + " " + stage + ": " + e.what();
    }
    return out;
}

CellResult aggregate(std::size_t index, const CellAxes& axes,
                     const std::vector<Instance>& instances,
                     std::vector<InstanceOutcome>& outcomes) {
    CellResult cell;
    cell.index = index;
    cell.lambda0 = axes.lambda0;
    cell.inv_xi = axes.inv_xi;
    cell.beta = axes.beta;
    cell.t_a = axes.t_a;

    std::vector<double> bests, means, successes;
    for (const InstanceOutcome& o : outcomes) {
        if (!o.ok) {
            ++cell.failed;
            cell.errors.push_back(o.error);
            continue;
        }
        ++cell.ok;
        if (std::isfinite(o.best)) bests.push_back(o.best);
        if (std::isfinite(o.mean_energy)) means.push_back(o.mean_energy);
        if (std::isfinite(o.success)) successes.push_back(o.success);
    }
    std::sort(bests.begin(), bests.end());
    std::sort(means.begin(), means.end());
    std::sort(successes.begin(), successes.end());

    cell.median_best = quantile(bests, 0.5);
    cell.p25_best = quantile(bests, 0.25);
    cell.p75_best = quantile(bests, 0.75);
    cell.mean_best = NaN;
    if (!bests.empty()) {
        double acc = 0.0;
        for (double b : bests) acc += b;
        cell.mean_best = acc / static_cast<double>(bests.size());
    }
    cell.median_energy = quantile(means, 0.5);
    cell.median_success = quantile(successes, 0.5);

    cell.eaee_var = cell.eaee_lo = cell.eaee_hi = NaN;
    if (cell.failed == 0 && !outcomes.empty()) {
        std::vector<LogicalSampleSet> sets;
        sets.reserve(outcomes.size());
        for (const InstanceOutcome& o : outcomes) sets.push_back(o.mapped);
        try {
            cell.eaee_var = eaee(instances, sets).variance;
            const BootstrapInterval ci = eaee_variance_bootstrap(instances, sets, 200, 0);
            cell.eaee_lo = ci.lo;
            cell.eaee_hi = ci.hi;
        } catch (const std::exception&) {
            cell.eaee_var = cell.eaee_lo = cell.eaee_hi = NaN;  // mixed topologies
        }
    }

    cell.median_tts_full_us = NaN;
    if (!std::isnan(cell.median_success)) {
        TimingModel timing;
        timing.t_a = axes.t_a;
        cell.median_tts_full_us =
            time_to_solution(cell.median_success, 0.99, timing).full_access_us;
    }
    return cell;
}

std::string cell_metrics_csv(const std::vector<InstanceOutcome>& outcomes) {
    std::string csv = "instance,status,best_energy,mean_energy,success,samples\n";
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const InstanceOutcome& o = outcomes[k];
        csv += std::to_string(k);
        csv += o.ok ? ",ok," : ",failed,";
        csv += fmt(o.best) + "," + fmt(o.mean_energy) + "," + fmt(o.success) + ",";
        csv += std::to_string(o.mapped.samples.size());
        csv += "\n";
    }
    return csv;
}

}  // namespace

Instance make_instance(const EnsembleSpec& ensemble, int k) {
    const std::uint64_t seed = ensemble.seed + static_cast<std::uint64_t>(k);
    if (ensemble.kind == "csg") return gen_csg(ensemble.n, seed);
    if (ensemble.kind == "bsg") return gen_bsg(ensemble.n, seed);
    if (ensemble.kind == "3dsg") return gen_3dsg(ensemble.dims, seed);
    if (ensemble.kind == "cdma") return gen_cdma(ensemble.n, ensemble.load, ensemble.snr_db, seed);
    throw std::invalid_argument("config: ensemble.kind: unknown kind " + ensemble.kind);
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> kinds = {"csg", "bsg", "3dsg", "cdma"};
    if (std::find(kinds.begin(), kinds.end(), ensemble.kind) == kinds.end())
        fail("ensemble.kind", "unknown kind " + ensemble.kind);
    if (ensemble.count < 1) fail("ensemble.count", "need at least one instance");
    if (ensemble.kind == "3dsg") {
        for (int d : ensemble.dims)
            if (d < 1) fail("ensemble.dims", "dimensions must be positive");
        if (effective_n(ensemble) < 2) fail("ensemble.dims", "need at least two sites");
    } else {
        if (ensemble.n < 2) fail("ensemble.n", "need at least two variables");
        if (ensemble.kind == "bsg" && ensemble.n % 2 != 0)
            fail("ensemble.n", "bipartite ensembles need an even size");
    }
    if (ensemble.kind == "cdma" && ensemble.load <= 0.0)
        fail("ensemble.load", "must be positive");

    static const std::vector<std::string> layouts = {"clique", "biclique", "cubic"};
    if (std::find(layouts.begin(), layouts.end(), embedding.layout) == layouts.end())
        fail("embedding.layout", "unknown layout " + embedding.layout);
    if (embedding.grid < 1) fail("embedding.grid", "grid size must be positive");
    if (embedding.layout == "cubic" && ensemble.kind != "3dsg")
        fail("embedding.layout", "cubic layout needs a 3dsg ensemble");
    if (embedding.layout == "biclique" && ensemble.kind != "bsg")
        fail("embedding.layout", "biclique layout needs a bsg ensemble");

    if (compile.lambda0 <= 0.0) fail("compile.lambda0", "must be positive");
    if (compile.lambda && *compile.lambda <= 0.0) fail("compile.lambda", "must be positive");
    if (compile.method != "none" && compile.method != "susceptibility" &&
        compile.method != "spectral")
        fail("compile.method", "unknown method " + compile.method);
    if (!xi_spec_valid(compile.xi))
        fail("compile.xi", "expected a positive number, \"L\", or \"inf\"");
    if (compile.gamma <= 0.0) fail("compile.gamma", "must be positive");

    if (sampler.backend != "local" && sampler.backend != "remote")
        fail("sampler.backend", "unknown backend " + sampler.backend);
    if (sampler.params.num_reads < 1) fail("sampler.num_reads", "need at least one read");
    if (sampler.params.sweeps < 1) fail("sampler.sweeps", "need at least one sweep");
    if (sampler.params.beta_start <= 0.0 || sampler.params.beta_end <= 0.0 ||
        sampler.params.beta <= 0.0)
        fail("sampler.beta", "temperatures must be positive");

    if (mapping.method != "random" && mapping.method != "majority" &&
        mapping.method != "aligned")
        fail("mapping.method", "unknown method " + mapping.method);

    if (!sweep.lambda0.empty() && compile.lambda)
        fail("sweep.lambda0", "conflicts with an explicit compile.lambda");
    for (double v : sweep.lambda0)
        if (v <= 0.0) fail("sweep.lambda0", "values must be positive");
    if (!sweep.inv_xi.empty() && compile.method == "none")
        fail("sweep.inv_xi", "needs a compensation method");
    for (double v : sweep.inv_xi)
        if (v < 0.0) fail("sweep.inv_xi", "values cannot be negative");
    if (!sweep.beta.empty() && sampler.params.mode != SampleMode::Equilibrium)
        fail("sweep.beta", "needs equilibrium sampling");
    for (double v : sweep.beta)
        if (v <= 0.0) fail("sweep.beta", "values must be positive");
    for (double v : sweep.t_a)
        if (v < 0.0) fail("sweep.t_a", "values cannot be negative");

    if (out_dir.empty()) fail("out_dir", "must not be empty");
    if (workers < 1) fail("workers", "need at least one worker");
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json doc;
    auto& ens = doc["ensemble"];
    ens["kind"] = ensemble.kind;
    ens["n"] = ensemble.n;
    ens["dims"] = ensemble.dims;
    ens["count"] = ensemble.count;
    ens["seed"] = ensemble.seed;
    ens["load"] = ensemble.load;
    ens["snr_db"] = ensemble.snr_db;
    auto& emb = doc["embedding"];
    emb["layout"] = embedding.layout;
    emb["grid"] = embedding.grid;
    auto& cmp = doc["compile"];
    cmp["lambda0"] = compile.lambda0;
    if (compile.lambda) cmp["lambda"] = *compile.lambda;
    cmp["method"] = compile.method;
    cmp["xi"] = compile.xi;
    cmp["gamma"] = compile.gamma;
    auto smp = nlohmann::json::parse(sampler.params.to_json());
    smp["backend"] = sampler.backend;
    smp["endpoint"] = sampler.endpoint;
    doc["sampler"] = std::move(smp);
    auto& map = doc["mapping"];
    map["method"] = mapping.method;
    map["descent"] = mapping.descent;
    map["seed"] = mapping.seed;
    auto& swp = doc["sweep"];
    swp["lambda0"] = sweep.lambda0;
    swp["inv_xi"] = sweep.inv_xi;
    swp["beta"] = sweep.beta;
    swp["t_a"] = sweep.t_a;
    doc["out_dir"] = out_dir;
    doc["workers"] = workers;
    return doc.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(doc, "config",
               {"ensemble", "embedding", "compile", "sampler", "mapping", "sweep", "out_dir",
                "workers"});
    ExperimentConfig cfg;
    if (doc.contains("ensemble")) {
        const auto& obj = doc["ensemble"];
        check_keys(obj, "ensemble", {"kind", "n", "dims", "count", "seed", "load", "snr_db"});
        get_to(obj, "kind", "ensemble", cfg.ensemble.kind);
        get_to(obj, "n", "ensemble", cfg.ensemble.n);
        get_to(obj, "dims", "ensemble", cfg.ensemble.dims);
        get_to(obj, "count", "ensemble", cfg.ensemble.count);
        get_to(obj, "seed", "ensemble", cfg.ensemble.seed);
        get_to(obj, "load", "ensemble", cfg.ensemble.load);
        get_to(obj, "snr_db", "ensemble", cfg.ensemble.snr_db);
    }
    if (doc.contains("embedding")) {
        const auto& obj = doc["embedding"];
        check_keys(obj, "embedding", {"layout", "grid"});
        get_to(obj, "layout", "embedding", cfg.embedding.layout);
        get_to(obj, "grid", "embedding", cfg.embedding.grid);
    }
    if (doc.contains("compile")) {
        const auto& obj = doc["compile"];
        check_keys(obj, "compile", {"lambda0", "lambda", "method", "xi", "gamma"});
        get_to(obj, "lambda0", "compile", cfg.compile.lambda0);
        if (obj.contains("lambda")) {
            double v = 0.0;
            get_to(obj, "lambda", "compile", v);
            cfg.compile.lambda = v;
        }
        get_to(obj, "method", "compile", cfg.compile.method);
        get_to(obj, "xi", "compile", cfg.compile.xi);
        get_to(obj, "gamma", "compile", cfg.compile.gamma);
    }
    if (doc.contains("sampler")) {
        const auto& obj = doc["sampler"];
        check_keys(obj, "sampler",
                   {"backend", "endpoint", "num_reads", "mode", "sweeps", "beta_start",
                    "beta_end", "beta", "seed"});
        get_to(obj, "backend", "sampler", cfg.sampler.backend);
        get_to(obj, "endpoint", "sampler", cfg.sampler.endpoint);
        auto merged = nlohmann::json::parse(SamplerParams{}.to_json());
        for (const auto& [key, value] : obj.items())
            if (key != "backend" && key != "endpoint") merged[key] = value;
        try {
            cfg.sampler.params = SamplerParams::from_json(merged.dump());
        } catch (const std::exception& e) {
            fail("sampler", e.what());
        }
    }
    if (doc.contains("mapping")) {
        const auto& obj = doc["mapping"];
        check_keys(obj, "mapping", {"method", "descent", "seed"});
        get_to(obj, "method", "mapping", cfg.mapping.method);
        get_to(obj, "descent", "mapping", cfg.mapping.descent);
        get_to(obj, "seed", "mapping", cfg.mapping.seed);
    }
    if (doc.contains("sweep")) {
        const auto& obj = doc["sweep"];
        check_keys(obj, "sweep", {"lambda0", "inv_xi", "beta", "t_a"});
        get_to(obj, "lambda0", "sweep", cfg.sweep.lambda0);
        get_to(obj, "inv_xi", "sweep", cfg.sweep.inv_xi);
        get_to(obj, "beta", "sweep", cfg.sweep.beta);
        get_to(obj, "t_a", "sweep", cfg.sweep.t_a);
    }
    get_to(doc, "out_dir", "config", cfg.out_dir);
    get_to(doc, "workers", "config", cfg.workers);
    return cfg;
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
    ExperimentConfig cfg;
    if (name == "chain-strength-sweep") {
        cfg.ensemble = {"csg", 16, {0, 0, 0}, 20, 1, 1.4, 7.0};
        cfg.embedding = {"clique", 4};
        cfg.compile.method = "none";
        cfg.sweep.lambda0 = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
        cfg.sampler.params.num_reads = 100;
        cfg.sampler.params.sweeps = 500;
        cfg.sampler.params.seed = 1;
        cfg.mapping = {"majority", false, 1};
        cfg.out_dir = "chain-strength-sweep";
        cfg.workers = 2;
        return cfg;
    }
    if (name == "eaee-xi-sweep") {
        cfg.ensemble = {"csg", 16, {0, 0, 0}, 20, 1, 1.4, 7.0};
        cfg.embedding = {"clique", 4};
        cfg.compile.method = "susceptibility";
        cfg.compile.lambda0 = 1.6;
        cfg.sweep.inv_xi = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        cfg.sampler.params.mode = SampleMode::Equilibrium;
        cfg.sampler.params.num_reads = 1000;
        cfg.sampler.params.sweeps = 100;
        // rescaling pins the programmed chain weight at 2, so beta = 0.67
        // puts tanh(2 beta)^5 near one half for the length-5 chains here
        cfg.sampler.params.beta = 0.67;
        cfg.sampler.params.seed = 1;
        cfg.mapping = {"majority", false, 1};
        cfg.out_dir = "eaee-xi-sweep";
        cfg.workers = 2;
        return cfg;
    }
    throw std::invalid_argument("config: unknown preset " + name);
}

bool ExperimentReport::ok() const {
    for (const CellResult& cell : cells)
        if (cell.failed > 0) return false;
    return true;
}

std::string ExperimentReport::csv() const {
    std::string out =
        "cell,lambda0,inv_xi,beta,t_a,ok,failed,median_best,mean_best,p25_best,p75_best,"
        "median_energy,median_success,eaee_var,eaee_lo,eaee_hi,median_tts_full_us\n";
    for (const CellResult& c : cells) {
        out += std::to_string(c.index) + "," + fmt(c.lambda0) + "," + fmt(c.inv_xi) + "," +
               fmt(c.beta) + "," + fmt(c.t_a) + "," + std::to_string(c.ok) + "," +
               std::to_string(c.failed) + "," + fmt(c.median_best) + "," + fmt(c.mean_best) +
               "," + fmt(c.p25_best) + "," + fmt(c.p75_best) + "," + fmt(c.median_energy) +
               "," + fmt(c.median_success) +
               "," + fmt(c.eaee_var) + "," + fmt(c.eaee_lo) + "," + fmt(c.eaee_hi) + "," +
               fmt(c.median_tts_full_us) + "\n";
    }
    return out;
}

std::string ExperimentReport::to_json() const {
    nlohmann::json doc;
    doc["config"] = nlohmann::json::parse(config.to_json());
    auto& rows = doc["cells"];
    rows = nlohmann::json::array();
    int failed_cells = 0;
    for (const CellResult& c : cells) {
        nlohmann::json row;
        row["index"] = c.index;
        row["lambda0"] = c.lambda0;
        row["inv_xi"] = c.inv_xi;
        row["beta"] = c.beta;
        row["t_a"] = c.t_a;
        row["ok"] = c.ok;
        row["failed"] = c.failed;
        row["errors"] = c.errors;
        row["median_best"] = c.median_best;
        row["mean_best"] = c.mean_best;
        row["p25_best"] = c.p25_best;
        row["p75_best"] = c.p75_best;
        row["median_energy"] = c.median_energy;
        row["median_success"] = c.median_success;
        row["eaee_var"] = c.eaee_var;
        row["eaee_lo"] = c.eaee_lo;
        row["eaee_hi"] = c.eaee_hi;
        row["median_tts_full_us"] = c.median_tts_full_us;
        if (c.failed > 0) ++failed_cells;
        rows.push_back(std::move(row));
    }
    doc["failed_cells"] = failed_cells;
    return doc.dump(2);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();

    const PhysicalGraph graph = build_chimera(config.embedding.grid);
    Embedding emb;
    if (config.embedding.layout == "clique")
        emb = embed_clique(effective_n(config.ensemble), graph);
    else if (config.embedding.layout == "biclique")
        emb = embed_biclique(effective_n(config.ensemble), graph);
    else
        emb = embed_cubic(config.ensemble.dims, graph);
    int longest_chain = 0;
    for (const auto& chain : emb.chains)
        longest_chain = std::max(longest_chain, static_cast<int>(chain.size()));

    // the ensemble is cell-independent: generate once, share read-only
    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(config.ensemble.count));
    for (int k = 0; k < config.ensemble.count; ++k) instances.push_back(make_instance(config.ensemble, k));

    // brute-force targets make the success column; skip when too large
    std::vector<std::optional<double>> targets(instances.size());
    if (effective_n(config.ensemble) <= 20)
        for (std::size_t k = 0; k < instances.size(); ++k)
            targets[k] = brute_min(instances[k]).min_energy;

    const auto axis = [](const std::vector<double>& ax, double base) {
        return ax.empty() ? std::vector<double>{base} : ax;
    };
    double base_inv_xi = 0.0;
    if (config.compile.method != "none") {
        const double xi = resolve_xi(config.compile.xi, longest_chain);
        base_inv_xi = std::isinf(xi) ? 0.0 : 1.0 / xi;
    }
    const auto lambda0s = axis(config.sweep.lambda0, config.compile.lambda0);
    const auto inv_xis = axis(config.sweep.inv_xi, base_inv_xi);
    const auto betas = axis(config.sweep.beta, config.sampler.params.beta);
    const auto t_as = axis(config.sweep.t_a, 0.0);

    std::vector<CellAxes> cells;
    for (double l0 : lambda0s)
        for (double ix : inv_xis)
            for (double b : betas)
                for (double t : t_as) cells.push_back({l0, ix, b, t});

    const fs::path root(config.out_dir);
    fs::create_directories(root / "cells");
    std::vector<fs::path> cell_dirs;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        cell_dirs.push_back(root / "cells" / cell_name(c));
        fs::create_directories(cell_dirs.back());
    }

    const std::size_t per_cell = instances.size();
    std::vector<std::vector<InstanceOutcome>> outcomes(cells.size());
    for (auto& row : outcomes) row.resize(per_cell);

    const std::size_t total = cells.size() * per_cell;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
            const std::size_t c = t / per_cell;
            const int k = static_cast<int>(t % per_cell);
            outcomes[c][static_cast<std::size_t>(k)] =
                run_job(config, graph, emb, longest_chain, cells[c], c, k, cell_dirs[c],
                        instances[static_cast<std::size_t>(k)], targets[static_cast<std::size_t>(k)]);
        }
    };
    const int threads = std::min<int>(config.workers, static_cast<int>(total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    ExperimentReport report;
    report.config = config;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        atomic_write(cell_dirs[c] / "metrics.csv", cell_metrics_csv(outcomes[c]));
        report.cells.push_back(aggregate(c, cells[c], instances, outcomes[c]));
    }
    atomic_write(root / "config.json", config.to_json());
    atomic_write(root / "report.csv", report.csv());
    atomic_write(root / "report.json", report.to_json());
    return report;
}

}  // namespace chainlab
