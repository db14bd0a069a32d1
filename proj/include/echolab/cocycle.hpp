#pragma once

#include "echolab/cluster.hpp"
#include "echolab/common.hpp"
#include "echolab/map_family.hpp"
#include "echolab/rng.hpp"
#include "echolab/symbolic.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace echolab {

/// States x[from_k .. from_k + steps] along an input window.
struct Trajectory {
    std::ptrdiff_t from_k = 0;
    std::vector<Vector> states;
};

/// Iterate x[k+1] = f_{v[k]}(x[k]) for `steps` steps starting at time
/// from_k. The window must supply every consumed symbol.
inline Trajectory iterate_cocycle(const MapFamily& family, const SymbolSequence& v,
                                  const Vector& x0, std::ptrdiff_t from_k, int steps) {
    v.check_origin();
    if (steps < 0) throw InvalidSpec("step count must be nonnegative");
    if (steps > 0 && (!v.covers(from_k) || !v.covers(from_k + steps - 1)))
        throw WindowExhausted("window does not cover the requested steps");
    Trajectory traj;
    traj.from_k = from_k;
    traj.states.reserve(steps + 1);
    traj.states.push_back(x0);
    Vector y(x0.size());
    for (int s = 0; s < steps; ++s) {
        family.apply_into(v.at_time(from_k + s), traj.states.back(), y);
        traj.states.push_back(y);
    }
    return traj;
}

/// Finite point sample standing in for the full state space in pullback
/// constructions: seeded uniform points, optionally with the box corners
/// appended (corners bound the extremal dynamics in decoupled systems).
struct Ensemble {
    std::vector<Vector> points;
    Box box;
    int sample_count = 0;
    std::uint64_t seed = 0;

    static Ensemble uniform(const Box& box, int count, std::uint64_t seed,
                            bool with_corners = false) {
        if (count < 1) throw InvalidSpec("ensemble needs at least one point");
        Ensemble e;
        e.box = box;
        e.sample_count = count;
        e.seed = seed;
        e.points.reserve(count);
        const int n = box.dim();
        for (int j = 0; j < count; ++j) {
            Vector x(n);
            for (int d = 0; d < n; ++d) {
                const double u = unit_at(seed, static_cast<std::uint64_t>(j) * n + d);
                x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * u;
            }
            e.points.push_back(std::move(x));
        }
        if (with_corners)
            for (auto& c : box.corners()) e.points.push_back(std::move(c));
        return e;
    }
};

/// Max-norm diameter of a finite cloud.
inline double cloud_diameter(std::span<const Vector> cloud) {
    double d = 0.0;
    for (std::size_t a = 0; a < cloud.size(); ++a)
        for (std::size_t b = a + 1; b < cloud.size(); ++b)
            d = std::max(d, max_norm_dist(cloud[a], cloud[b]));
    return d;
}

/// One-sided Hausdorff distance sup_{a in A} inf_{b in B} |a - b| in the
/// Euclidean metric.
inline double hausdorff_semidistance(std::span<const Vector> a, std::span<const Vector> b) {
    if (a.empty() || b.empty()) throw EmptySet("hausdorff semidistance needs nonempty sets");
    double worst = 0.0;
    for (const auto& y : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& z : b) best = std::min(best, (y - z).norm());
        worst = std::max(worst, best);
    }
    return worst;
}

struct PullbackReport {
    std::vector<Vector> cloud;
    double diameter = 0.0;
    std::optional<double> hausdorff_to_reference;
    int steps = 0;
};

/// Push the ensemble forward from time -n to time 0 along the window; the
/// resulting cloud samples the n-step pullback set.
inline PullbackReport pullback_cloud(const MapFamily& family, const SymbolSequence& v, int n,
                                     const Ensemble& ensemble,
                                     const std::vector<Vector>* reference = nullptr) {
    v.check_origin();
    if (n < 0) throw InvalidSpec("pullback depth must be nonnegative");
    if (n > 0 && (!v.covers(-n) || !v.covers(-1)))
        throw WindowExhausted("window does not cover the pullback depth");
    PullbackReport report;
    report.steps = n;
    report.cloud = ensemble.points;
    Vector y(family.dim());
    for (auto& x : report.cloud) {
        for (int k = -n; k < 0; ++k) {
            family.apply_into(v.at_time(k), x, y);
            x.swap(y);
        }
    }
    report.diameter = cloud_diameter(report.cloud);
    if (reference) report.hausdorff_to_reference = hausdorff_semidistance(report.cloud, *reference);
    return report;
}

enum class EspVerdict { kEsp, kNotEsp, kUndecided };

inline const char* to_string(EspVerdict v) {
    switch (v) {
        case EspVerdict::kEsp: return "ESP";
        case EspVerdict::kNotEsp: return "NOT_ESP";
        case EspVerdict::kUndecided: return "UNDECIDED";
    }
    return "?";
}

struct EspReport {
    EspVerdict verdict = EspVerdict::kUndecided;
    double diameter = 0.0;          // at depth n
    double diameter_deep = 0.0;     // at the doubled depth
    int clusters = 0;
    int clusters_deep = 0;
    int depth = 0;
    int depth_deep = 0;
};

/// Numerical echo-state-property test: ESP when the pullback cloud at
/// depth n collapses below eps; NOT_ESP when it splits into two or more
/// clusters separated by more than 100*eps whose count and centers survive
/// doubling the depth (within the window); UNDECIDED otherwise.
inline EspReport esp_test(const MapFamily& family, const SymbolSequence& v, int n, double eps,
                          int ensemble_size, std::uint64_t seed) {
    const auto ensemble = Ensemble::uniform(family.domain(), ensemble_size, seed, true);
    EspReport report;
    report.depth = n;
    const auto shallow = pullback_cloud(family, v, n, ensemble);
    report.diameter = shallow.diameter;
    const auto shallow_clusters = single_linkage(shallow.cloud, 100.0 * eps, 1.0);
    report.clusters = static_cast<int>(shallow_clusters.sizes.size());
    if (shallow.diameter < eps) {
        report.verdict = EspVerdict::kEsp;
        return report;
    }
    const int deepest = static_cast<int>(v.origin);
    const int deep = std::min(2 * n, deepest);
    report.depth_deep = deep;
    if (deep > n) {
        const auto deeper = pullback_cloud(family, v, deep, ensemble);
        report.diameter_deep = deeper.diameter;
        const auto deep_clusters = single_linkage(deeper.cloud, 100.0 * eps, 1.0);
        report.clusters_deep = static_cast<int>(deep_clusters.sizes.size());
        const bool counts_agree =
            report.clusters >= 2 && report.clusters == report.clusters_deep;
        if (counts_agree) {
            const double drift =
                std::max(hausdorff_semidistance(shallow_clusters.centers, deep_clusters.centers),
                         hausdorff_semidistance(deep_clusters.centers, shallow_clusters.centers));
            if (drift < 100.0 * eps) report.verdict = EspVerdict::kNotEsp;
        }
    }
    return report;
}

}  // namespace echolab
