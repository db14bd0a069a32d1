#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace echolab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpec : public Error { public: using Error::Error; };
class NotMinMaxForm : public Error { public: using Error::Error; };
class EmptyOverlap : public Error { public: using Error::Error; };
class OutOfDomain : public Error { public: using Error::Error; };
class NoStablePoints : public Error { public: using Error::Error; };
class HorizonExceeded : public Error { public: using Error::Error; };
class NotFunneling : public Error { public: using Error::Error; };
class InvalidSeed : public Error { public: using Error::Error; };
class WindowExhausted : public Error { public: using Error::Error; };
class WindowTooShort : public Error { public: using Error::Error; };
class EmptySet : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

/// Axis-aligned closed box; the state space of a map family.
struct Box {
    Vector lo;
    Vector hi;

    Box() = default;
    Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size() || lo.size() == 0)
            throw InvalidSpec("box bounds must be nonempty and of equal dimension");
        for (Eigen::Index d = 0; d < lo.size(); ++d)
            if (!(lo[d] < hi[d]))
                throw InvalidSpec("box requires lo < hi in every coordinate");
    }

    static Box cube(int dim, double lo_value, double hi_value) {
        return Box(Vector::Constant(dim, lo_value), Vector::Constant(dim, hi_value));
    }

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(const Vector& x, double tol = 1e-9) const {
        if (x.size() != lo.size()) return false;
        for (Eigen::Index d = 0; d < lo.size(); ++d)
            if (x[d] < lo[d] - tol || x[d] > hi[d] + tol) return false;
        return true;
    }

    /// Max-norm diameter (the longest side).
    double diameter() const { return (hi - lo).maxCoeff(); }

    /// All 2^dim corner points, in lexicographic bit order.
    std::vector<Vector> corners() const {
        const int n = dim();
        std::vector<Vector> out;
        out.reserve(std::size_t(1) << n);
        for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
            Vector c(n);
            for (int d = 0; d < n; ++d) c[d] = (mask >> d) & 1 ? hi[d] : lo[d];
            out.push_back(std::move(c));
        }
        return out;
    }
};

/// Chebyshev (max-norm) distance; the library's default notion of closeness
/// for clouds, clusters and basin balls.
inline double max_norm_dist(const Vector& a, const Vector& b) {
    return (a - b).lpNorm<Eigen::Infinity>();
}

}  // namespace echolab
