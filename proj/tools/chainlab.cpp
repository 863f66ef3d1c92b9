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

// Command-line pipeline around the library: generate instance ensembles,
// embed, compile, sample (locally or against a remote solver), map back to
// logical variables, and aggregate metrics. Stages communicate through the
// JSON/CSV file formats of the corresponding modules, so any stage can be
// re-run from its predecessors' files. Exit codes: 0 success, 1 a sweep run
// finished with failed cells, 2 configuration or schema errors.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "chainlab/compile.hpp"
#include "chainlab/embedding.hpp"
#include "chainlab/experiment.hpp"
#include "chainlab/instance.hpp"
#include "chainlab/metrics.hpp"
#include "chainlab/postprocess.hpp"
#include "chainlab/remote.hpp"
#include "chainlab/sampler.hpp"
#include "chainlab/topology.hpp"

namespace fs = std::filesystem;
using namespace chainlab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument(path + ": cannot open");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument(path + ": cannot write");
    out << content;
}

template <typename T, typename Parse>
T load(const std::string& path, Parse parse) {
    try {
        return parse(slurp(path));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

Embedding build_embedding(const std::string& layout, int n, const std::array<int, 3>& dims,
                          const PhysicalGraph& graph) {
    if (layout == "clique") return embed_clique(n, graph);
    if (layout == "biclique") return embed_biclique(n, graph);
    if (layout == "cubic") return embed_cubic(dims, graph);
    throw std::invalid_argument("unknown layout " + layout);
}

int longest_chain(const Embedding& emb) {
    std::size_t longest = 0;
    for (const auto& chain : emb.chains) longest = std::max(longest, chain.size());
    return static_cast<int>(longest);
}

SampleMode mode_from(const std::string& name) {
    if (name == "anneal") return SampleMode::Anneal;
    if (name == "equilibrium") return SampleMode::Equilibrium;
    throw std::invalid_argument("unknown mode " + name);
}

std::string endpoint_or_env(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("CHAINLAB_ENDPOINT")) return env;
    throw std::invalid_argument("remote backend needs --endpoint or CHAINLAB_ENDPOINT");
}

void emit(const std::string& out, const std::string& content) {
    if (out.empty())
        std::cout << content;
    else
        spit(out, content);
}

double median_of(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    return m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

// expected chain length and class count per embedding, for `report --against`
struct ExpectedRow {
    int chain_len;
    int classes;
};
std::optional<ExpectedRow> table2_row(const std::string& layout, int n) {
    static const std::map<std::string, ExpectedRow> rows = {
        {"clique-32", {9, 18}},
        {"clique-64", {17, 51}},
        {"biclique-64", {8, 10}},
        {"cubic-64", {4, 3}},
    };
    const auto it = rows.find(layout + "-" + std::to_string(n));
    if (it == rows.end()) return std::nullopt;
    return it->second;
}

int cmd_gen(const EnsembleSpec& ens, const std::string& out) {
    fs::create_directories(out);
    for (int k = 0; k < ens.count; ++k) {
        const Instance inst = make_instance(ens, k);
        spit((fs::path(out) / (inst.id() + ".json")).string(), inst.to_json());
    }
    std::cout << "wrote " << ens.count << " instance files to " << out << "\n";
    return 0;
}

int cmd_embed(const std::string& layout, int n, const std::array<int, 3>& dims, int grid,
              const std::string& out) {
    const PhysicalGraph graph = build_chimera(grid);
    const Embedding emb = build_embedding(layout, n, dims, graph);
    spit(out, emb.to_json());
    std::cout << "embedded " << emb.chains.size() << " chains, longest " << longest_chain(emb)
              << "\n";
    return 0;
}

int cmd_compile(const std::string& instance_path, const std::string& embedding_path, int grid,
                double lambda0, std::optional<double> lambda, const std::string& method,
                const std::string& xi, double gamma, const std::string& out) {
    const Instance inst = load<Instance>(instance_path, Instance::from_json);
    const Embedding emb = load<Embedding>(embedding_path, Embedding::from_json);
    const PhysicalGraph graph = build_chimera(grid);

    CompensationConfig comp;
    if (method == "none")
        comp.method = CompensationMethod::None;
    else if (method == "susceptibility")
        comp.method = CompensationMethod::Susceptibility;
    else if (method == "spectral")
        comp.method = CompensationMethod::Spectral;
    else
        throw std::invalid_argument("unknown method " + method);
    if (xi == "inf")
        comp.xi = std::numeric_limits<double>::infinity();
    else if (xi == "L")
        comp.xi = static_cast<double>(longest_chain(emb));
    else
        comp.xi = std::stod(xi);
    comp.gamma = gamma;

    const double strength = lambda ? *lambda : chain_strength(inst, lambda0);
    const PhysicalProblem problem = rescale(compensate(inst, emb, graph, strength, comp));
    spit(out, problem.to_json());
    std::cout << "compiled with lambda " << strength << ", scale " << problem.rescale_factor
              << "\n";
    return 0;
}

int cmd_sample(const std::string& problem_path, const std::string& backend,
               const std::string& endpoint, const SamplerParams& params, const std::string& out) {
    const PhysicalProblem problem =
        load<PhysicalProblem>(problem_path, PhysicalProblem::from_json);
    const SampleSet set = backend == "remote"
                              ? remote_sample(problem, params, endpoint_or_env(endpoint))
                              : sample(problem, params);
    spit(out, set.to_json());
    double best = std::numeric_limits<double>::infinity();
    for (double e : set.energies) best = std::min(best, e);
    std::cout << "sampled " << set.samples.size() << " reads, best programmed energy " << best
              << "\n";
    return 0;
}

int cmd_map(const std::string& samples_path, const std::string& instance_path,
            const std::string& embedding_path, const std::string& method, bool descent,
            std::uint64_t seed, std::uint64_t descent_seed, const std::string& out) {
    const SampleSet set = load<SampleSet>(samples_path, SampleSet::from_json);
    const Instance inst = load<Instance>(instance_path, Instance::from_json);
    const Embedding emb = load<Embedding>(embedding_path, Embedding::from_json);

    LogicalSampleSet mapped;
    if (method == "random")
        mapped = map_random(set, inst, emb, seed);
    else if (method == "majority")
        mapped = map_majority(set, inst, emb, seed);
    else if (method == "aligned")
        mapped = filter_aligned(set, inst, emb);
    else
        throw std::invalid_argument("unknown method " + method);
    if (descent) mapped = greedy_descent(mapped, inst, descent_seed);

    spit(out, mapped.to_csv());
    spit(out + ".meta.json", mapped.metadata_json());
    std::cout << "mapped " << mapped.samples.size() << " samples via " << mapped.method << "\n";
    return 0;
}

int cmd_report_against(const std::string& layout, int n, const std::array<int, 3>& dims,
                       int grid, const std::string& out) {
    const PhysicalGraph graph = build_chimera(grid);
    const int sites = layout == "cubic" ? dims[0] * dims[1] * dims[2] : n;
    const Embedding emb = build_embedding(layout, sites, dims, graph);

    std::vector<PatternClass> classes;
    if (layout == "cubic") {
        // classify over the ideal lattice edge list; the compact packing also
        // makes chains of non-interacting sites touch
        const Instance ideal = gen_3dsg(dims, 0);
        std::vector<std::pair<int, int>> edges;
        for (const auto& [a, b, v] : ideal.j) edges.emplace_back(std::min(a, b), std::max(a, b));
        classes = pattern_classes(emb, graph, edges);
    } else {
        classes = pattern_classes(emb, graph);
    }

    const int len = longest_chain(emb);
    const auto expected = table2_row(layout, sites);
    std::string csv =
        "layout,n,expected_chain_len,measured_chain_len,expected_classes,measured_classes,"
        "match\n";
    csv += layout + "," + std::to_string(sites) + ",";
    if (expected) {
        const bool match =
            expected->chain_len == len && expected->classes == static_cast<int>(classes.size());
        csv += std::to_string(expected->chain_len) + "," + std::to_string(len) + "," +
               std::to_string(expected->classes) + "," + std::to_string(classes.size()) + "," +
               (match ? "yes" : "no") + "\n";
    } else {
        csv += "," + std::to_string(len) + ",," + std::to_string(classes.size()) + ",n/a\n";
    }
    emit(out, csv);
    return 0;
}

int cmd_report_dir(const std::string& dir, const std::string& out) {
    const fs::path cells = fs::path(dir) / "cells";
    if (!fs::is_directory(cells))
        throw std::invalid_argument(cells.string() + ": not a sweep output directory");
    std::vector<fs::path> metric_files;
    for (const auto& entry : fs::directory_iterator(cells)) {
        const fs::path file = entry.path() / "metrics.csv";
        if (fs::exists(file)) metric_files.push_back(file);
    }
    std::sort(metric_files.begin(), metric_files.end());

    std::string csv = "cell,ok,failed,median_best,median_energy,median_success\n";
    for (std::size_t c = 0; c < metric_files.size(); ++c) {
        std::istringstream in(slurp(metric_files[c].string()));
        std::string line;
        std::getline(in, line);  // header
        int ok = 0, failed = 0;
        std::vector<double> bests, means, successes;
        while (std::getline(in, line)) {
            std::vector<std::string> fields;
            std::istringstream row(line);
            std::string field;
            while (std::getline(row, field, ',')) fields.push_back(field);
            if (fields.size() != 6) throw std::invalid_argument(metric_files[c].string() + ":" + line + ": malformed row");
            if (fields[1] == "ok") {
                ++ok;
                bests.push_back(std::stod(fields[2]));
                means.push_back(std::stod(fields[3]));
                if (fields[4] != "nan") successes.push_back(std::stod(fields[4]));
            } else {
                ++failed;
            }
        }
        std::ostringstream row;
        row << c << "," << ok << "," << failed << "," << median_of(bests) << ","
            << median_of(means) << "," << median_of(successes) << "\n";
        csv += row.str();
    }
    emit(out, csv);
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& preset, const std::string& out,
            int workers, int count, int reads, int sweeps, const std::string& endpoint) {
    ExperimentConfig cfg;
    if (!preset.empty())
        cfg = ExperimentConfig::preset(preset);
    else
        cfg = load<ExperimentConfig>(config_path, ExperimentConfig::from_json);
    if (!out.empty()) cfg.out_dir = out;
    if (workers > 0) cfg.workers = workers;
    if (count > 0) cfg.ensemble.count = count;
    if (reads > 0) cfg.sampler.params.num_reads = reads;
    if (sweeps > 0) cfg.sampler.params.sweeps = sweeps;
    if (!endpoint.empty()) cfg.sampler.endpoint = endpoint;
    cfg.validate();

    const ExperimentReport report = run_experiment(cfg);
    for (const CellResult& cell : report.cells) {
        std::cout << "cell " << cell.index << ": ok=" << cell.ok << " failed=" << cell.failed
                  << " median_best=" << cell.median_best
                  << " median_energy=" << cell.median_energy << "\n";
        for (const std::string& error : cell.errors) std::cout << "  " << error << "\n";
    }
    std::cout << "report: " << (fs::path(cfg.out_dir) / "report.csv").string() << "\n";
    return report.ok() ? 0 : 1;
}

int cmd_serve(int pending) {
    StubServer server(pending);
    std::cout << "listening on " << server.endpoint() << std::endl;
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(1));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chain-embedded Ising toolkit"};
    app.require_subcommand(1);

    // gen
    EnsembleSpec ens;
    std::string gen_out = "instances";
    std::vector<int> gen_dims;
    auto* gen = app.add_subcommand("gen", "generate an instance ensemble");
    gen->add_option("--kind", ens.kind, "csg | bsg | 3dsg | cdma");
    gen->add_option("--n", ens.n, "variable count");
    gen->add_option("--dims", gen_dims, "lattice shape for 3dsg")->expected(3);
    gen->add_option("--count", ens.count, "ensemble size");
    gen->add_option("--seed", ens.seed, "base seed; instance k uses seed + k");
    gen->add_option("--load", ens.load, "code rows per variable (cdma)");
    gen->add_option("--snr", ens.snr_db, "signal-to-noise in dB (cdma)");
    gen->add_option("--out", gen_out, "output directory");

    // embed
    std::string emb_layout = "clique", emb_out = "embedding.json";
    int emb_n = 16, emb_grid = 4;
    std::vector<int> emb_dims;
    auto* embed = app.add_subcommand("embed", "embed a logical topology into a grid");
    embed->add_option("--layout", emb_layout, "clique | biclique | cubic");
    embed->add_option("--n", emb_n, "variable count (clique, biclique)");
    embed->add_option("--dims", emb_dims, "lattice shape (cubic)")->expected(3);
    embed->add_option("--grid", emb_grid, "grid size m");
    embed->add_option("--out", emb_out, "output file");

    // compile
    std::string cmp_inst, cmp_emb, cmp_method = "none", cmp_xi = "inf",
                cmp_out = "problem.json";
    int cmp_grid = 4;
    double cmp_lambda0 = 1.6, cmp_gamma = 1.0;
    double cmp_lambda = 0.0;
    auto* compile = app.add_subcommand("compile", "compile an instance onto an embedding");
    compile->add_option("--instance", cmp_inst, "instance file")->required();
    compile->add_option("--embedding", cmp_emb, "embedding file")->required();
    compile->add_option("--grid", cmp_grid, "grid size m");
    compile->add_option("--lambda0", cmp_lambda0, "chain strength scale");
    auto* cmp_lambda_opt =
        compile->add_option("--lambda", cmp_lambda, "explicit chain strength");
    compile->add_option("--method", cmp_method, "none | susceptibility | spectral");
    compile->add_option("--xi", cmp_xi, "correlation length: number, L, inf");
    compile->add_option("--gamma", cmp_gamma, "spectral drive ratio");
    compile->add_option("--out", cmp_out, "output file");

    // sample
    std::string smp_problem, smp_backend = "local", smp_endpoint, smp_mode = "anneal",
                smp_out = "samples.json";
    SamplerParams params;
    auto* sampled = app.add_subcommand("sample", "draw reads from a compiled problem");
    sampled->add_option("--problem", smp_problem, "problem file")->required();
    sampled->add_option("--backend", smp_backend, "local | remote");
    sampled->add_option("--endpoint", smp_endpoint, "remote URL (or CHAINLAB_ENDPOINT)");
    sampled->add_option("--reads", params.num_reads, "number of reads");
    sampled->add_option("--mode", smp_mode, "anneal | equilibrium");
    sampled->add_option("--sweeps", params.sweeps, "sweeps per read");
    sampled->add_option("--beta-start", params.beta_start, "anneal ramp start");
    sampled->add_option("--beta-end", params.beta_end, "anneal ramp end");
    sampled->add_option("--beta", params.beta, "equilibrium temperature");
    sampled->add_option("--seed", params.seed, "sampler seed");
    sampled->add_option("--out", smp_out, "output file");

    // map
    std::string map_samples, map_inst, map_emb, map_method = "majority",
                map_out = "mapped.csv";
    bool map_descent = false;
    std::uint64_t map_seed = 0, map_descent_seed = 1;
    auto* mapc = app.add_subcommand("map", "map physical reads to logical samples");
    mapc->add_option("--samples", map_samples, "sample file")->required();
    mapc->add_option("--instance", map_inst, "instance file")->required();
    mapc->add_option("--embedding", map_emb, "embedding file")->required();
    mapc->add_option("--method", map_method, "random | majority | aligned");
    mapc->add_flag("--descent", map_descent, "follow with greedy descent");
    mapc->add_option("--seed", map_seed, "tie-break seed");
    mapc->add_option("--descent-seed", map_descent_seed, "descent order seed");
    mapc->add_option("--out", map_out, "output file (metadata sidecar alongside)");

    // report
    std::string rep_against, rep_layout = "clique", rep_dir, rep_out;
    int rep_n = 32, rep_grid = 8;
    std::vector<int> rep_dims;
    auto* report = app.add_subcommand("report", "summary tables");
    report->add_option("--against", rep_against, "compare to a builtin table: table2");
    report->add_option("--layout", rep_layout, "clique | biclique | cubic");
    report->add_option("--n", rep_n, "variable count");
    report->add_option("--dims", rep_dims, "lattice shape (cubic)")->expected(3);
    report->add_option("--grid", rep_grid, "grid size m");
    report->add_option("--dir", rep_dir, "re-aggregate a sweep output directory");
    report->add_option("--out", rep_out, "output file (stdout when omitted)");

    // run
    std::string run_config, run_preset, run_out, run_endpoint;
    int run_workers = 0, run_count = 0, run_reads = 0, run_sweeps = 0;
    auto* runc = app.add_subcommand("run", "execute a sweep config end to end");
    runc->add_option("--config", run_config, "config JSON file");
    runc->add_option("--preset", run_preset, "chain-strength-sweep | eaee-xi-sweep");
    runc->add_option("--out", run_out, "override output directory");
    runc->add_option("--workers", run_workers, "override worker count");
    runc->add_option("--count", run_count, "override ensemble size");
    runc->add_option("--reads", run_reads, "override reads per instance");
    runc->add_option("--sweeps", run_sweeps, "override sweeps per read");
    runc->add_option("--endpoint", run_endpoint, "override remote endpoint");

    // serve
    int srv_pending = 0;
    auto* serve = app.add_subcommand("serve", "run a loopback solver for remote sampling");
    serve->add_option("--pending", srv_pending, "extra pending polls before results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto as_dims = [](const std::vector<int>& v, std::array<int, 3> fallback) {
        if (v.empty()) return fallback;
        return std::array<int, 3>{v[0], v[1], v[2]};
    };
    try {
        if (gen->parsed()) {
            ens.dims = as_dims(gen_dims, ens.dims);
            return cmd_gen(ens, gen_out);
        }
        if (embed->parsed())
            return cmd_embed(emb_layout, emb_n, as_dims(emb_dims, {0, 0, 0}), emb_grid, emb_out);
        if (compile->parsed())
            return cmd_compile(cmp_inst, cmp_emb, cmp_grid, cmp_lambda0,
                               cmp_lambda_opt->count() ? std::optional<double>(cmp_lambda)
                                                       : std::nullopt,
                               cmp_method, cmp_xi, cmp_gamma, cmp_out);
        if (sampled->parsed()) {
            params.mode = mode_from(smp_mode);
            return cmd_sample(smp_problem, smp_backend, smp_endpoint, params, smp_out);
        }
        if (mapc->parsed())
            return cmd_map(map_samples, map_inst, map_emb, map_method, map_descent, map_seed,
                           map_descent_seed, map_out);
        if (report->parsed()) {
            if (!rep_dir.empty()) return cmd_report_dir(rep_dir, rep_out);
            if (rep_against == "table2")
                return cmd_report_against(rep_layout, rep_n, as_dims(rep_dims, {4, 4, 4}),
                                          rep_grid, rep_out);
            throw std::invalid_argument("report needs --dir or --against table2");
        }
        if (runc->parsed()) {
            if (run_config.empty() == run_preset.empty())
                throw std::invalid_argument("run needs exactly one of --config, --preset");
            return cmd_run(run_config, run_preset, run_out, run_workers, run_count, run_reads,
                           run_sweeps, run_endpoint);
        }
        if (serve->parsed()) return cmd_serve(srv_pending);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
