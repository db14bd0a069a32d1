#pragma once

#include "echolab/common.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

namespace echolab {

/// Result of single-linkage agglomeration. Clusters are ordered by their
/// smallest member index; centers are member means.
struct Clustering {
    std::vector<int> assignment;       // point -> cluster id
    std::vector<Vector> centers;
    std::vector<int> sizes;
    int flagged_clusters = 0;  // strict clusters absorbed in the relaxed pass
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t a) {
        while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Single-linkage clustering with max-norm threshold `tol`. Near-miss
/// groups — strict clusters whose single-linkage distance to another
/// cluster falls in (tol, straggler_factor*tol] — are merged into it and
/// counted as flagged, so slow transients do not inflate the cluster count.
inline Clustering single_linkage(std::span<const Vector> points, double tol,
                                 double straggler_factor = 10.0) {
    const std::size_t n = points.size();
    Clustering out;
    if (n == 0) return out;

    detail::UnionFind strict(n), relaxed(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double d = max_norm_dist(points[a], points[b]);
            if (d <= tol) strict.unite(a, b);
            if (d <= straggler_factor * tol) relaxed.unite(a, b);
        }
    }

    // Relaxed components are the reported clusters.
    std::vector<int> cluster_of(n, -1);
    out.assignment.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t root = relaxed.find(q);
        if (cluster_of[root] < 0) {
            cluster_of[root] = static_cast<int>(out.sizes.size());
            out.sizes.push_back(0);
            out.centers.push_back(Vector::Zero(points[q].size()));
        }
        const int c = cluster_of[root];
        out.assignment[q] = c;
        out.sizes[c] += 1;
        out.centers[c] += points[q];
    }
    for (std::size_t c = 0; c < out.centers.size(); ++c)
        out.centers[c] /= static_cast<double>(out.sizes[c]);

    // Count strict clusters per relaxed component; extras were absorbed.
    std::vector<std::size_t> strict_roots;
    for (std::size_t q = 0; q < n; ++q)
        if (strict.find(q) == q) strict_roots.push_back(q);
    std::vector<int> strict_in_component(out.sizes.size(), 0);
    for (std::size_t root : strict_roots)
        strict_in_component[out.assignment[root]] += 1;
    for (int count : strict_in_component)
        if (count > 1) out.flagged_clusters += count - 1;
    return out;
}

}  // namespace echolab
