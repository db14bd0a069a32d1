#pragma once

#include "echolab/common.hpp"
#include "echolab/map_family.hpp"
#include "echolab/rng.hpp"
#include "echolab/symbolic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace echolab {

enum class StabilityKind { kStable, kSaddle, kUnstable, kNonHyperbolic };

inline const char* to_string(StabilityKind k) {
    switch (k) {
        case StabilityKind::kStable: return "stable";
        case StabilityKind::kSaddle: return "saddle";
        case StabilityKind::kUnstable: return "unstable";
        case StabilityKind::kNonHyperbolic: return "non_hyperbolic";
    }
    return "?";
}

struct FixedPoint {
    Vector location;
    Eigen::VectorXcd eigenvalues;
    StabilityKind kind = StabilityKind::kNonHyperbolic;
    double residual = 0.0;
};

struct FixedPointOptions {
    int seeds_per_dim = 12;
    double fp_tol = 1e-10;
    double hyperbolicity_tol = 1e-6;
    double dedupe_factor = 10.0;
    int max_newton_iter = 100;
    int max_fallback_iter = 20000;
};

struct FixedPointSearch {
    std::vector<FixedPoint> points;
    int dropped = 0;  // seeds that converged nowhere
};

namespace detail {

inline StabilityKind classify(const Eigen::VectorXcd& eigenvalues, double tol) {
    bool any_inside = false, any_outside = false, any_neutral = false;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double m = std::abs(eigenvalues[i]);
        if (m < 1.0 - tol) any_inside = true;
        else if (m > 1.0 + tol) any_outside = true;
        else any_neutral = true;
    }
    if (any_neutral) return StabilityKind::kNonHyperbolic;
    if (any_outside) return any_inside ? StabilityKind::kSaddle : StabilityKind::kUnstable;
    return StabilityKind::kStable;
}

/// Coordinate-wise lexicographic order with a tolerance band, so that the
/// returned point list is stable against sub-tolerance numeric jitter.
inline bool lex_less(const Vector& a, const Vector& b, double tol) {
    for (Eigen::Index d = 0; d < a.size(); ++d) {
        if (a[d] < b[d] - tol) return true;
        if (a[d] > b[d] + tol) return false;
    }
    return false;
}

/// Jacobian without the domain membership check; Newton iterates may probe
/// slightly outside the box.
inline Matrix raw_jacobian(const MapFamily& family, int i, const Vector& x, double h = 1e-6) {
    const auto& map = family.map(i);
    Matrix jac(x.size(), x.size());
    if (map.jacobian) {
        map.jacobian(x, jac);
        return jac;
    }
    Vector xp = x, xm = x, fp(x.size()), fm(x.size());
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        xp[d] = x[d] + h;
        xm[d] = x[d] - h;
        map.eval(xp, fp);
        map.eval(xm, fm);
        jac.col(d) = (fp - fm) / (2.0 * h);
        xp[d] = x[d];
        xm[d] = x[d];
    }
    return jac;
}

/// Cell-center grid over a box, res points per dimension.
inline std::vector<Vector> grid_points(const Box& box, int res, bool include_edges) {
    const int n = box.dim();
    std::vector<Vector> pts;
    std::vector<int> idx(n, 0);
    const auto coord = [&](int d, int i) {
        if (include_edges)
            return res == 1 ? 0.5 * (box.lo[d] + box.hi[d])
                            : box.lo[d] + (box.hi[d] - box.lo[d]) * i / double(res - 1);
        return box.lo[d] + (box.hi[d] - box.lo[d]) * (i + 0.5) / double(res);
    };
    while (true) {
        Vector x(n);
        for (int d = 0; d < n; ++d) x[d] = coord(d, idx[d]);
        pts.push_back(std::move(x));
        int d = n - 1;
        while (d >= 0 && ++idx[d] == res) idx[d--] = 0;
        if (d < 0) break;
    }
    return pts;
}

}  // namespace detail

/// Locate fixed points of f_i by damped Newton iteration from a regular
/// seed grid, falling back to direct iteration when Newton fails (stable
/// points remain reachable that way). Results are deduplicated, classified
/// by Jacobian eigenvalues and sorted coordinate-lexicographically.
inline FixedPointSearch find_fixed_points(const MapFamily& family, int i,
                                          const FixedPointOptions& opt = {}) {
    if (opt.seeds_per_dim < 2) throw InvalidSpec("need at least 2 seeds per dimension");
    const Box& box = family.domain();
    const int n = family.dim();
    FixedPointSearch result;
    std::vector<Vector> found;

    Vector fx(n), step(n);
    const double slack = 0.5 * box.diameter();
    const auto residual_at = [&](const Vector& x) {
        family.map(i).eval(x, fx);
        return (fx - x).norm();
    };
    const auto newton_step = [&](const Vector& x) -> std::optional<Vector> {
        const Matrix a = detail::raw_jacobian(family, i, x) - Matrix::Identity(n, n);
        family.map(i).eval(x, fx);
        step = a.fullPivLu().solve(x - fx);
        if (!step.allFinite()) return std::nullopt;
        const double cap = 0.25 * box.diameter();
        if (step.norm() > cap) step *= cap / step.norm();
        return x + step;
    };
    const auto newton_from = [&](Vector x) -> std::optional<Vector> {
        for (int it = 0; it < opt.max_newton_iter; ++it) {
            if (residual_at(x) < opt.fp_tol) return x;
            const auto next = newton_step(x);
            if (!next || !box.contains(*next, slack)) return std::nullopt;
            x = *next;
        }
        return std::nullopt;
    };
    // Extra descent steps drive an accepted root to machine precision, so
    // copies of the same root from different seeds collapse well inside the
    // dedupe radius even when the dynamics near the root are slow.
    const auto polish = [&](Vector x) -> Vector {
        double best = residual_at(x);
        for (int it = 0; it < 4 && best > 0.0; ++it) {
            const auto next = newton_step(x);
            if (!next) break;
            const double resid = residual_at(*next);
            if (!(resid < best)) break;
            best = resid;
            x = *next;
        }
        return x;
    };
    for (const Vector& seed : detail::grid_points(box, opt.seeds_per_dim, false)) {
        auto root = newton_from(seed);
        if (!root) {
            // Direct iteration from the seed settles onto attracting points.
            Vector x = seed;
            for (int it = 0; it < opt.max_fallback_iter; ++it) {
                family.map(i).eval(x, fx);
                if ((fx - x).norm() < opt.fp_tol) break;
                x.swap(fx);
            }
            if (residual_at(x) < opt.fp_tol) root = x;
        }
        if (!root) {
            ++result.dropped;
            continue;
        }
        *root = polish(*root);
        if (!box.contains(*root, 1e-9)) {
            ++result.dropped;
            continue;
        }
        const double dedupe = opt.dedupe_factor * opt.fp_tol;
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Vector& y) {
            return (y - *root).norm() < dedupe;
        });
        if (!duplicate) found.push_back(*root);
    }

    std::sort(found.begin(), found.end(), [&](const Vector& a, const Vector& b) {
        return detail::lex_less(a, b, 100.0 * opt.fp_tol);
    });
    for (Vector& x : found) {
        FixedPoint fp;
        family.map(i).eval(x, fx);
        fp.residual = (fx - x).norm();
        const Matrix jac = family.jacobian(i, x);
        fp.eigenvalues = Eigen::EigenSolver<Matrix>(jac, false).eigenvalues();
        fp.kind = detail::classify(fp.eigenvalues, opt.hyperbolicity_tol);
        fp.location = std::move(x);
        result.points.push_back(std::move(fp));
    }
    return result;
}

inline std::vector<FixedPoint> stable_only(const FixedPointSearch& search) {
    std::vector<FixedPoint> out;
    for (const auto& fp : search.points)
        if (fp.kind == StabilityKind::kStable) out.push_back(fp);
    return out;
}

struct BasinOptions {
    int grid_res = 200;
    int max_iter = 10000;
    double ball_radius = 1e-3;
};

/// Basin grid over the family domain: each cell is labelled by the first
/// stable point whose max-norm ball the orbit of the cell center enters.
struct BasinGrid {
    Box region;
    int resolution = 0;
    std::vector<std::int32_t> labels;  // row-major over cell centers
    double unresolved_fraction = 0.0;
    static constexpr std::int32_t kUnresolved = -1;

    std::size_t cell_of(const Vector& x) const {
        const int n = region.dim();
        std::size_t idx = 0;
        for (int d = 0; d < n; ++d) {
            const double t = (x[d] - region.lo[d]) / (region.hi[d] - region.lo[d]);
            int c = static_cast<int>(std::floor(t * resolution));
            c = std::clamp(c, 0, resolution - 1);
            idx = idx * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(c);
        }
        return idx;
    }

    std::int32_t label_at(const Vector& x) const { return labels[cell_of(x)]; }
};

inline BasinGrid estimate_basins(const MapFamily& family, int i,
                                 const std::vector<FixedPoint>& stable,
                                 const BasinOptions& opt = {}) {
    if (stable.empty()) throw NoStablePoints("map has no stable fixed point");
    BasinGrid grid;
    grid.region = family.domain();
    grid.resolution = opt.grid_res;
    const auto centers = detail::grid_points(grid.region, opt.grid_res, false);
    grid.labels.assign(centers.size(), BasinGrid::kUnresolved);

    Vector y(family.dim());
    std::size_t unresolved = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        Vector x = centers[c];
        std::int32_t label = BasinGrid::kUnresolved;
        for (int it = 0; it <= opt.max_iter && label == BasinGrid::kUnresolved; ++it) {
            for (std::size_t s = 0; s < stable.size(); ++s) {
                if (max_norm_dist(x, stable[s].location) < opt.ball_radius) {
                    label = static_cast<std::int32_t>(s);
                    break;
                }
            }
            if (label == BasinGrid::kUnresolved && it < opt.max_iter) {
                family.map(i).eval(x, y);
                x.swap(y);
            }
        }
        grid.labels[c] = label;
        if (label == BasinGrid::kUnresolved) ++unresolved;
    }
    grid.unresolved_fraction = static_cast<double>(unresolved) / static_cast<double>(centers.size());
    return grid;
}

/// P(i, j, k): index of the stable point of f_k whose ball the f_k-orbit
/// of the j-th stable point of f_i enters first. Cells where the orbit
/// never commits within max_iter are recorded as straddles and left at -1.
struct TransitionTable {
    std::vector<int> attractor_counts;  // L(i) per map
    std::vector<std::vector<std::vector<int>>> entries;  // entries[i][j][k]
    struct Straddle { int i, j, k; };
    std::vector<Straddle> straddles;

    int at(int i, int j, int k) const { return entries[i][j][k]; }
    bool complete() const { return straddles.empty(); }
};

inline TransitionTable transition_table(const MapFamily& family,
                                        const std::vector<std::vector<FixedPoint>>& stable_per_map,
                                        int max_iter = 10000, double ball_radius = 1e-3) {
    const int m = family.alphabet_size();
    if (static_cast<int>(stable_per_map.size()) != m)
        throw InvalidSpec("need the stable point list of every map");
    TransitionTable table;
    table.attractor_counts.resize(m);
    for (int i = 0; i < m; ++i) table.attractor_counts[i] = static_cast<int>(stable_per_map[i].size());
    table.entries.assign(m, {});

    Vector y(family.dim());
    for (int i = 0; i < m; ++i) {
        table.entries[i].assign(stable_per_map[i].size(), std::vector<int>(m, -1));
        for (int j = 0; j < table.attractor_counts[i]; ++j) {
            for (int k = 0; k < m; ++k) {
                Vector x = stable_per_map[i][j].location;
                int hit = -1;
                for (int it = 0; it <= max_iter && hit < 0; ++it) {
                    for (std::size_t s = 0; s < stable_per_map[k].size(); ++s) {
                        if (max_norm_dist(x, stable_per_map[k][s].location) < ball_radius) {
                            hit = static_cast<int>(s);
                            break;
                        }
                    }
                    if (hit < 0 && it < max_iter) {
                        family.map(k).eval(x, y);
                        x.swap(y);
                    }
                }
                table.entries[i][j][k] = hit;
                if (hit < 0) table.straddles.push_back({i, j, k});
            }
        }
    }
    return table;
}

/// Attractor itinerary aligned to a symbol window.
struct AttractorSequence {
    std::vector<int> indices;
    std::ptrdiff_t origin = 0;
};

inline AttractorSequence forward_attractor_sequence(const TransitionTable& table,
                                                    const SymbolSequence& v, int a0) {
    v.check_origin();
    const Symbol first = v.symbols.front();
    if (a0 < 0 || a0 >= table.attractor_counts[first])
        throw InvalidSeed("initial attractor index invalid for the first map");
    AttractorSequence seq;
    seq.origin = v.origin;
    seq.indices.reserve(v.symbols.size());
    seq.indices.push_back(a0);
    for (std::size_t t = 1; t < v.symbols.size(); ++t) {
        const int prev = seq.indices.back();
        const int next = table.at(v.symbols[t - 1], prev, v.symbols[t]);
        if (next < 0) throw Error("transition table incomplete along the window");
        seq.indices.push_back(next);
    }
    return seq;
}

struct SequenceCount {
    int distinct_windows = 0;  // distinct full itineraries
    int distinct_tails = 0;    // distinct final attractor indices
};

/// Seed every attractor of the first map and propagate; the tail count is
/// the practical lower-bound proxy for the echo index.
inline SequenceCount count_attractor_sequences(const TransitionTable& table,
                                               const SymbolSequence& v) {
    v.check_origin();
    const int l0 = table.attractor_counts[v.symbols.front()];
    std::set<std::vector<int>> windows;
    std::set<int> tails;
    for (int a0 = 0; a0 < l0; ++a0) {
        const auto seq = forward_attractor_sequence(table, v, a0);
        tails.insert(seq.indices.back());
        windows.insert(seq.indices);
    }
    return {static_cast<int>(windows.size()), static_cast<int>(tails.size())};
}

struct ContractionOptions {
    int pair_count = 1000;
    int cap = 10000;
    std::uint64_t seed = 0x0c0117ac7ULL;
};

/// Smallest n such that f_i^n, sampled on point pairs inside the max-norm
/// ball around a stable point, contracts by rho and keeps the ball inside
/// itself. An estimate, not a certified bound.
inline int contraction_horizon(const MapFamily& family, int i, const Vector& center,
                               double rho, double ball_radius,
                               const ContractionOptions& opt = {}) {
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidSpec("contraction factor must lie in (0, 1)");
    const int n = family.dim();
    std::vector<Vector> pts;
    pts.reserve(2 * opt.pair_count);
    for (int q = 0; q < 2 * opt.pair_count; ++q) {
        Vector x(n);
        for (int d = 0; d < n; ++d)
            x[d] = center[d] + ball_radius * (2.0 * unit_at(opt.seed, std::uint64_t(q) * n + d) - 1.0);
        pts.push_back(std::move(x));
    }
    std::vector<double> base_dist(opt.pair_count);
    for (int q = 0; q < opt.pair_count; ++q)
        base_dist[q] = (pts[2 * q] - pts[2 * q + 1]).norm();

    Vector y(n);
    auto images = pts;
    for (int steps = 1; steps <= opt.cap; ++steps) {
        for (auto& x : images) {
            family.map(i).eval(x, y);
            x.swap(y);
        }
        double worst_ratio = 0.0;
        bool inside = true;
        for (int q = 0; q < opt.pair_count; ++q) {
            if (base_dist[q] < 1e-12) continue;
            worst_ratio = std::max(worst_ratio,
                                   (images[2 * q] - images[2 * q + 1]).norm() / base_dist[q]);
        }
        for (const auto& x : images) {
            if (max_norm_dist(x, center) > ball_radius) { inside = false; break; }
        }
        if (inside && worst_ratio < rho) return steps;
    }
    throw HorizonExceeded("no contracting iterate found within the cap");
}

/// Stopping rule for funneling estimates: either every point entered the
/// max-norm ball of some listed center, or every point crossed a
/// coordinate threshold (strictly).
struct FunnelCriterion {
    enum class Kind { kEnterBalls, kBelowThreshold, kAboveThreshold };
    Kind kind = Kind::kEnterBalls;
    std::vector<Vector> centers;
    double radius = 1e-2;
    int axis = 0;
    double threshold = 0.0;

    static FunnelCriterion enter_balls(std::vector<Vector> centers, double radius) {
        FunnelCriterion c;
        c.kind = Kind::kEnterBalls;
        c.centers = std::move(centers);
        c.radius = radius;
        return c;
    }
    static FunnelCriterion below(int axis, double threshold) {
        FunnelCriterion c;
        c.kind = Kind::kBelowThreshold;
        c.axis = axis;
        c.threshold = threshold;
        return c;
    }
    static FunnelCriterion above(int axis, double threshold) {
        FunnelCriterion c;
        c.kind = Kind::kAboveThreshold;
        c.axis = axis;
        c.threshold = threshold;
        return c;
    }

    bool satisfied(const Vector& x) const {
        switch (kind) {
            case Kind::kBelowThreshold: return x[axis] < threshold;
            case Kind::kAboveThreshold: return x[axis] > threshold;
            case Kind::kEnterBalls:
                for (const auto& c : centers)
                    if ((x - c).lpNorm<Eigen::Infinity>() < radius) return true;
                return false;
        }
        return false;
    }
};

/// Smallest m such that the m-th image of every grid point of `region`
/// under f_i satisfies the criterion simultaneously (m = 0 allowed when
/// the region already does). Grid includes the region edges.
inline int estimate_mmin(const MapFamily& family, int i, const FunnelCriterion& criterion,
                         const Box& region, int grid_res, int cap = 1000) {
    if (grid_res < 2) throw InvalidSpec("funneling grid needs at least 2 points per dimension");
    if (criterion.kind == FunnelCriterion::Kind::kEnterBalls && criterion.centers.empty())
        throw NoStablePoints("funneling criterion has no target");
    auto pts = detail::grid_points(region, grid_res, true);
    const auto all_ok = [&]() {
        return std::all_of(pts.begin(), pts.end(),
                           [&](const Vector& x) { return criterion.satisfied(x); });
    };
    if (all_ok()) return 0;
    Vector y(family.dim());
    for (int m = 1; m <= cap; ++m) {
        for (auto& x : pts) {
            family.map(i).eval(x, y);
            x.swap(y);
        }
        if (all_ok()) return m;
    }
    throw NotFunneling("region does not funnel within the iteration cap");
}

/// Complete atlas of a family: per-map fixed points, basin grids and the
/// inter-map transition table.
struct AtlasEntry {
    std::vector<FixedPoint> stable;
    std::vector<FixedPoint> other;
    BasinGrid basins;
    int dropped_seeds = 0;
};

struct AttractorAtlas {
    std::string family_name;
    std::vector<AtlasEntry> maps;
    TransitionTable table;
};

struct AtlasOptions {
    FixedPointOptions fixed_points;
    BasinOptions basins;
};

inline AttractorAtlas build_atlas(const MapFamily& family, const AtlasOptions& opt = {}) {
    AttractorAtlas atlas;
    atlas.family_name = family.name();
    std::vector<std::vector<FixedPoint>> stable_per_map;
    for (int i = 0; i < family.alphabet_size(); ++i) {
        AtlasEntry entry;
        const auto search = find_fixed_points(family, i, opt.fixed_points);
        entry.dropped_seeds = search.dropped;
        for (const auto& fp : search.points)
            (fp.kind == StabilityKind::kStable ? entry.stable : entry.other).push_back(fp);
        entry.basins = estimate_basins(family, i, entry.stable, opt.basins);
        stable_per_map.push_back(entry.stable);
        atlas.maps.push_back(std::move(entry));
    }
    atlas.table = transition_table(family, stable_per_map, opt.basins.max_iter,
                                   opt.basins.ball_radius);
    return atlas;
}

}  // namespace echolab
