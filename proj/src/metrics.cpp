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

#include "chainlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "chainlab/compile.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

namespace {

void check_timing(const TimingModel& t) {
    if (t.t_p < 0.0 || t.t_rd < 0.0 || t.t_a < 0.0 || t.t_m < 0.0 || t.t_n < 0.0)
        throw std::invalid_argument("timing: all components must be non-negative");
}

// per-instance mean correlations <x_a x_b> for the shared edge list
std::vector<double> edge_correlations(const Instance& inst, const LogicalSampleSet& set) {
    if (set.samples.empty())
        throw std::invalid_argument("eaee: a sample set is empty");
    if (set.n != inst.n)
        throw std::invalid_argument("eaee: sample set does not match its instance");
    std::vector<double> corr(inst.j.size(), 0.0);
    for (const auto& x : set.samples) {
        for (std::size_t e = 0; e < inst.j.size(); ++e) {
            const auto& [a, b, v] = inst.j[e];
            (void)v;
            corr[e] += static_cast<double>(x[static_cast<std::size_t>(a)]) *
                       static_cast<double>(x[static_cast<std::size_t>(b)]);
        }
    }
    for (double& c : corr) c /= static_cast<double>(set.samples.size());
    return corr;
}

double edge_variance(const std::vector<double>& e_ab) {
    const double k = static_cast<double>(e_ab.size());
    double mean = 0.0;
    for (double v : e_ab) mean += v;
    mean /= k;
    double var = 0.0;
    for (double v : e_ab) var += (v - mean) * (v - mean);
    return var / k;
}

}  // namespace

double success_rate(const LogicalSampleSet& set, double target, double tol) {
    if (set.energies.empty())
        throw std::invalid_argument("success_rate: empty sample set");
    std::size_t hits = 0;
    for (double e : set.energies) hits += e <= target + tol;
    return static_cast<double>(hits) / static_cast<double>(set.energies.size());
}

double samples_to_solution(double p, double x) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("samples_to_solution: p outside [0,1]");
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("samples_to_solution: x outside (0,1)");
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    if (p == 1.0) return 1.0;
    return std::log1p(-x) / std::log1p(-p);
}

double access_time(double n, const TimingModel& t) {
    check_timing(t);
    if (n < 0.0) throw std::invalid_argument("access_time: negative sample count");
    return t.t_p + n * (t.t_a + t.t_rd) + t.t_m + t.t_n;
}

int sample_budget(double budget_us, const TimingModel& t) {
    check_timing(t);
    const double per_sample = t.t_a + t.t_rd;
    if (per_sample <= 0.0) throw std::invalid_argument("sample_budget: zero per-sample time");
    if (budget_us < 0.0) return 0;
    return static_cast<int>(std::floor(budget_us / per_sample));
}

TimeToSolution time_to_solution(double p, double x, const TimingModel& t) {
    check_timing(t);
    TimeToSolution out;
    out.samples = samples_to_solution(p, x);
    out.anneal_only_us = out.samples * t.t_a;
    out.full_access_us = std::isfinite(out.samples)
                             ? access_time(out.samples, t)
                             : std::numeric_limits<double>::infinity();
    return out;
}

EaeeReport eaee(const std::vector<Instance>& instances,
                const std::vector<LogicalSampleSet>& sets) {
    if (instances.empty()) throw std::invalid_argument("eaee: empty ensemble");
    if (instances.size() != sets.size())
        throw std::invalid_argument("eaee: instance and sample-set counts differ");

    EaeeReport report;
    for (const auto& [a, b, v] : instances.front().j) {
        (void)v;
        report.edges.emplace_back(a, b);
    }
    for (const auto& inst : instances) {
        if (inst.j.size() != report.edges.size())
            throw std::invalid_argument("eaee: mismatched topologies in the ensemble");
        for (std::size_t e = 0; e < inst.j.size(); ++e)
            if (std::get<0>(inst.j[e]) != report.edges[e].first ||
                std::get<1>(inst.j[e]) != report.edges[e].second)
                throw std::invalid_argument("eaee: mismatched topologies in the ensemble");
    }

    report.e_ab.assign(report.edges.size(), 0.0);
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const auto corr = edge_correlations(instances[k], sets[k]);
        for (std::size_t e = 0; e < corr.size(); ++e)
            report.e_ab[e] += std::get<2>(instances[k].j[e]) * corr[e];
    }
    const double k = static_cast<double>(instances.size());
    for (double& v : report.e_ab) v /= k;

    for (double v : report.e_ab) report.mean += v;
    report.mean /= static_cast<double>(report.e_ab.size());
    report.variance = edge_variance(report.e_ab);
    return report;
}

BootstrapInterval eaee_variance_bootstrap(const std::vector<Instance>& instances,
                                          const std::vector<LogicalSampleSet>& sets,
                                          int resamples, std::uint64_t seed) {
    if (resamples < 1) throw std::invalid_argument("bootstrap: resamples must be positive");
    const EaeeReport base = eaee(instances, sets);

    // per-instance edge terms J_ab * <x_a x_b>, resampled with replacement
    std::vector<std::vector<double>> terms(instances.size());
    for (std::size_t k = 0; k < instances.size(); ++k) {
        terms[k] = edge_correlations(instances[k], sets[k]);
        for (std::size_t e = 0; e < terms[k].size(); ++e)
            terms[k][e] *= std::get<2>(instances[k].j[e]);
    }

    std::vector<double> vars(static_cast<std::size_t>(resamples));
    std::vector<double> acc(base.edges.size());
    for (int r = 0; r < resamples; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t k = 0; k < instances.size(); ++k) {
            const auto& row = terms[static_cast<std::size_t>(rng.below(instances.size()))];
            for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += row[e];
        }
        for (double& v : acc) v /= static_cast<double>(instances.size());
        vars[static_cast<std::size_t>(r)] = edge_variance(acc);
    }
    std::sort(vars.begin(), vars.end());

    BootstrapInterval out;
    out.point = base.variance;
    const auto at = [&](double q) {
        const double pos = q * static_cast<double>(vars.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < vars.size() ? vars[i] * (1.0 - frac) + vars[i + 1] * frac : vars[i];
    };
    out.lo = at(0.025);
    out.hi = at(0.975);
    return out;
}

namespace {

std::vector<PatternClass> classify(const Embedding& emb, const PhysicalGraph& graph,
                                   const std::vector<std::pair<int, int>>& pairs,
                                   bool require_connected) {
    std::map<PatternKey, PatternClass> grouped;
    for (const auto& [a, b] : pairs) {
        auto positions = connecting_positions(graph, emb.chains[static_cast<std::size_t>(a)],
                                              emb.chains[static_cast<std::size_t>(b)]);
        if (positions.empty()) {
            if (require_connected)
                throw std::invalid_argument("pattern_classes: edge (" + std::to_string(a) + ", " +
                                            std::to_string(b) + ") has no connecting couplers");
            continue;
        }
        PatternKey key =
            canonical_pattern(static_cast<int>(emb.chains[static_cast<std::size_t>(a)].size()),
                              static_cast<int>(emb.chains[static_cast<std::size_t>(b)].size()),
                              std::move(positions));
        auto it = grouped.find(key);
        if (it == grouped.end()) {
            PatternClass cls;
            cls.key = key;
            cls.chi = chi_pair(emb, graph, a, b, 1.0);
            it = grouped.emplace(std::move(key), std::move(cls)).first;
        }
        it->second.edges.emplace_back(a, b);
    }
    std::vector<PatternClass> out;
    out.reserve(grouped.size());
    for (auto& [key, cls] : grouped) out.push_back(std::move(cls));
    std::sort(out.begin(), out.end(), [](const PatternClass& x, const PatternClass& y) {
        return x.chi != y.chi ? x.chi < y.chi : x.key < y.key;
    });
    return out;
}

}  // namespace

std::vector<PatternClass> pattern_classes(const Embedding& emb, const PhysicalGraph& graph) {
    std::vector<std::pair<int, int>> pairs;
    const int n = static_cast<int>(emb.chains.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    return classify(emb, graph, pairs, false);
}

std::vector<PatternClass> pattern_classes(const Embedding& emb, const PhysicalGraph& graph,
                                          const std::vector<std::pair<int, int>>& edges) {
    for (const auto& [a, b] : edges)
        if (a < 0 || b < 0 || a >= static_cast<int>(emb.chains.size()) ||
            b >= static_cast<int>(emb.chains.size()) || a == b)
            throw std::invalid_argument("pattern_classes: edge endpoints outside the embedding");
    return classify(emb, graph, edges, true);
}

std::vector<double> class_means(const EaeeReport& report,
                                const std::vector<PatternClass>& classes) {
    std::map<std::pair<int, int>, double> by_edge;
    for (std::size_t e = 0; e < report.edges.size(); ++e)
        by_edge.emplace(report.edges[e], report.e_ab[e]);

    std::vector<double> out;
    out.reserve(classes.size());
    for (const auto& cls : classes) {
        double mean = 0.0;
        for (const auto& edge : cls.edges) {
            const auto it = by_edge.find(edge);
            if (it == by_edge.end())
                throw std::invalid_argument("class_means: class edge missing from the report");
            mean += it->second;
        }
        out.push_back(mean / static_cast<double>(cls.edges.size()));
    }
    return out;
}

std::string classes_csv(const std::vector<PatternClass>& classes,
                        const std::vector<double>& mean_eab) {
    if (!mean_eab.empty() && mean_eab.size() != classes.size())
        throw std::invalid_argument("classes_csv: per-class means do not match the classes");
    std::ostringstream csv;
    csv.precision(17);
    csv << "label,len_a,len_b,couplers,chi,edges";
    if (!mean_eab.empty()) csv << ",mean_eab";
    csv << "\n";
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& cls = classes[c];
        csv << '"' << cls.key.label() << "\"," << cls.key.len_a << "," << cls.key.len_b << ","
            << cls.key.positions.size() << "," << cls.chi << "," << cls.edges.size();
        if (!mean_eab.empty()) csv << "," << mean_eab[c];
        csv << "\n";
    }
    return csv.str();
}

std::string eaee_csv(const EaeeReport& report) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "a,b,e_ab\n";
    for (std::size_t e = 0; e < report.edges.size(); ++e)
        csv << report.edges[e].first << "," << report.edges[e].second << "," << report.e_ab[e]
            << "\n";
    return csv.str();
}

}  // namespace chainlab
