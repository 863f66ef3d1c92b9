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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chainlab/embedding.hpp"
#include "chainlab/postprocess.hpp"

namespace chainlab {

// Solver timing model, all in microseconds: one programming cost per problem,
// then per sample an anneal plus read-out-and-delay cost, plus fixed mapping
// and network overheads.
struct TimingModel {
    double t_p = 10000.0;  // programming
    double t_rd = 219.0;   // read-out + delay, measured as one number
    double t_a = 0.0;      // anneal, the usual sweep variable
    double t_m = 0.0;      // mapping
    double t_n = 0.0;      // network
};

// Fraction of samples with energy <= target + tol. Errors on an empty set.
double success_rate(const LogicalSampleSet& set, double target, double tol = 1e-9);

// Expected samples until the target is seen with confidence x:
// log(1-x) / log(1-p). p = 0 gives infinity; p = 1 is defined as 1.
double samples_to_solution(double p, double x = 0.99);

// t_p + n*(t_a + t_rd) + t_m + t_n
double access_time(double n, const TimingModel& t = {});

// Largest sample count whose per-sample cost fits the budget:
// floor(budget / (t_a + t_rd)). Programming and fixed costs are not counted,
// matching how sampling budgets are quoted.
int sample_budget(double budget_us, const TimingModel& t = {});

// Time to solution at confidence x, reported both ways: annealing time only
// and full access time.
struct TimeToSolution {
    double samples = 0.0;         // samples_to_solution(p, x)
    double anneal_only_us = 0.0;  // samples * t_a
    double full_access_us = 0.0;  // access_time(samples)
};
TimeToSolution time_to_solution(double p, double x, const TimingModel& t);

// Ensemble-average edge energy: per logical edge, the instance average of
// J_ab * <x_a x_b> under that instance's sample set. All instances must list
// identical edge endpoints in identical order. `variance` is the population
// variance of e_ab across edges; a sampler with no embedding-induced bias
// drives it to zero as the ensemble grows.
struct EaeeReport {
    std::vector<std::pair<int, int>> edges;
    std::vector<double> e_ab;
    double mean = 0.0;
    double variance = 0.0;
};
EaeeReport eaee(const std::vector<Instance>& instances,
                const std::vector<LogicalSampleSet>& sets);

// Percentile bootstrap (over instances) for the EAEE edge variance.
struct BootstrapInterval {
    double point = 0.0;
    double lo = 0.0;   // 2.5th percentile
    double hi = 0.0;   // 97.5th percentile
};
BootstrapInterval eaee_variance_bootstrap(const std::vector<Instance>& instances,
                                          const std::vector<LogicalSampleSet>& sets,
                                          int resamples = 1000, std::uint64_t seed = 0);

// Connected chain pairs grouped by canonical connection pattern, ordered by
// the representative's pairwise susceptibility at xi = 1 (most attenuated
// class first). The two-argument form classifies every physically connected
// chain pair; pass the problem's edge list instead when the packing lets
// chains of non-interacting variables touch (compact lattice layouts do).
struct PatternClass {
    PatternKey key;
    std::vector<std::pair<int, int>> edges;  // logical (a, b) members, a < b
    double chi = 0.0;                        // chi_pair at xi = 1 of edges.front()
};
std::vector<PatternClass> pattern_classes(const Embedding& emb, const PhysicalGraph& graph);
std::vector<PatternClass> pattern_classes(const Embedding& emb, const PhysicalGraph& graph,
                                          const std::vector<std::pair<int, int>>& edges);

// Mean e_ab over each class's member edges; the report must cover them.
std::vector<double> class_means(const EaeeReport& report,
                                const std::vector<PatternClass>& classes);

// Plot-ready tables: one row per class ("label,len_a,len_b,couplers,chi,
// edges[,mean_eab]"), one row per edge ("a,b,e_ab").
std::string classes_csv(const std::vector<PatternClass>& classes,
                        const std::vector<double>& mean_eab = {});
std::string eaee_csv(const EaeeReport& report);

}  // namespace chainlab
