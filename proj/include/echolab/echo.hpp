#pragma once

#include "echolab/cluster.hpp"
#include "echolab/cocycle.hpp"
#include "echolab/common.hpp"
#include "echolab/map_family.hpp"
#include "echolab/rng.hpp"
#include "echolab/symbolic.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace echolab {

/// Estimated echo index of a (family, window) pair: the number of clusters
/// formed by an ensemble of initial conditions after T forward steps.
/// Transient-inclusive — small T can overcount the asymptotic index.
struct EchoEstimate {
    int index = 0;
    std::vector<Vector> cluster_centers;
    std::vector<int> cluster_sizes;
    int steps = 0;          // T
    int ensemble_size = 0;  // number of initial conditions
    std::uint64_t seed = 0;
    double cluster_tol = 0.0;
    int flagged_clusters = 0;
};

inline EchoEstimate estimate_echo_index(const MapFamily& family, const SymbolSequence& v,
                                        int n_ic, int steps, double cluster_tol,
                                        std::uint64_t seed) {
    v.check_origin();
    if (n_ic < 1) throw InvalidSpec("need at least one initial condition");
    if (steps < 1) throw InvalidSpec("need at least one step");
    if (v.max_time() < steps - 1)
        throw WindowTooShort("window does not cover the requested forward steps");

    const auto ensemble = Ensemble::uniform(family.domain(), n_ic, seed);
    std::vector<Vector> finals;
    finals.reserve(n_ic);
    Vector y(family.dim());
    for (const auto& start : ensemble.points) {
        Vector x = start;
        for (int k = 0; k < steps; ++k) {
            family.apply_into(v.at_time(k), x, y);
            x.swap(y);
        }
        finals.push_back(std::move(x));
    }
    const Clustering clusters = single_linkage(finals, cluster_tol);

    EchoEstimate est;
    est.index = static_cast<int>(clusters.sizes.size());
    est.cluster_centers = clusters.centers;
    est.cluster_sizes = clusters.sizes;
    est.steps = steps;
    est.ensemble_size = n_ic;
    est.seed = seed;
    est.cluster_tol = cluster_tol;
    est.flagged_clusters = clusters.flagged_clusters;
    return est;
}

/// Index tabulation across independently generated input realizations.
struct ConsistencyReport {
    std::map<int, int> index_counts;
    bool consistent = false;
    std::vector<EchoEstimate> runs;
};

inline ConsistencyReport consistency_scan(const MapFamily& family, const RepeatSpec& spec,
                                          int realizations, int n_ic, int steps,
                                          double cluster_tol, std::uint64_t base_seed) {
    if (realizations < 2) throw InvalidSpec("consistency scan needs at least 2 realizations");
    ConsistencyReport report;
    for (int r = 0; r < realizations; ++r) {
        const auto v = generate_sequence(spec, steps, seed_combine(base_seed, 1, r));
        auto est = estimate_echo_index(family, v, n_ic, steps, cluster_tol,
                                       seed_combine(base_seed, 2, r));
        report.index_counts[est.index] += 1;
        report.runs.push_back(std::move(est));
    }
    report.consistent = report.index_counts.size() == 1;
    return report;
}

}  // namespace echolab
