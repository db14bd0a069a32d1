#pragma once

#include "echolab/common.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace echolab {

/// A finite family of self-maps of a common box. Maps are supplied as
/// callables writing into a caller-provided output vector so iteration
/// loops stay allocation-free; an analytic Jacobian is optional and falls
/// back to central finite differences.
class MapFamily {
public:
    using EvalFn = std::function<void(const Vector&, Vector&)>;
    using JacFn = std::function<void(const Vector&, Matrix&)>;

    struct Map {
        EvalFn eval;
        JacFn jacobian;  // may be empty
    };

    MapFamily(std::string name, Box domain, std::vector<Map> maps)
        : name_(std::move(name)), domain_(std::move(domain)), maps_(std::move(maps)) {
        if (maps_.empty()) throw InvalidSpec("map family needs at least one map");
    }

    const std::string& name() const { return name_; }
    const Box& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    int alphabet_size() const { return static_cast<int>(maps_.size()); }

    /// Raw access to a member map (no domain checking); used to build
    /// compositions and derivative probes.
    const Map& map(int i) const {
        check_index(i);
        return maps_[i];
    }

    /// Apply f_i to x, writing into out (resized if needed).
    void apply_into(int i, const Vector& x, Vector& out) const {
        check_index(i);
        if (!domain_.contains(x)) throw OutOfDomain("point outside the family domain");
        if (out.size() != x.size()) out.resize(x.size());
        maps_[i].eval(x, out);
    }

    Vector apply(int i, const Vector& x) const {
        Vector out(x.size());
        apply_into(i, x, out);
        return out;
    }

    Vector iterate(int i, Vector x, int n) const {
        Vector y(x.size());
        for (int k = 0; k < n; ++k) {
            apply_into(i, x, y);
            x.swap(y);
        }
        return x;
    }

    /// Jacobian of f_i at x: analytic when provided, otherwise central
    /// finite differences with step h.
    Matrix jacobian(int i, const Vector& x, double h = 1e-6) const {
        check_index(i);
        if (!domain_.contains(x)) throw OutOfDomain("point outside the family domain");
        Matrix jac(x.size(), x.size());
        if (maps_[i].jacobian) {
            maps_[i].jacobian(x, jac);
            return jac;
        }
        Vector xp = x, xm = x, fp(x.size()), fm(x.size());
        for (Eigen::Index d = 0; d < x.size(); ++d) {
            xp[d] = x[d] + h;
            xm[d] = x[d] - h;
            maps_[i].eval(xp, fp);
            maps_[i].eval(xm, fm);
            jac.col(d) = (fp - fm) / (2.0 * h);
            xp[d] = x[d];
            xm[d] = x[d];
        }
        return jac;
    }

private:
    void check_index(int i) const {
        if (i < 0 || i >= alphabet_size()) throw InvalidSpec("map index outside alphabet");
    }

    std::string name_;
    Box domain_;
    std::vector<Map> maps_;
};

/// Leaky-integrator network update x -> (1-a)x + a tanh(Wr x + Win u),
/// one map per input value.
struct EsnParams {
    Matrix w_reservoir;
    Matrix w_input;
    double leak = 0.25;
    std::vector<Vector> inputs;

    void validate() const {
        if (w_reservoir.rows() == 0 || w_reservoir.rows() != w_reservoir.cols())
            throw InvalidSpec("reservoir matrix must be square and nonempty");
        if (w_input.rows() != w_reservoir.rows())
            throw InvalidSpec("input matrix row count must match the state dimension");
        if (!(leak > 0.0 && leak <= 1.0)) throw InvalidSpec("leak rate must lie in (0, 1]");
        if (inputs.empty()) throw InvalidSpec("at least one input value is required");
        for (const auto& u : inputs)
            if (u.size() != w_input.cols())
                throw InvalidSpec("input vector dimension must match the input matrix");
    }
};

inline MapFamily make_esn(const EsnParams& params, std::string name = "esn") {
    params.validate();
    const auto r = params.w_reservoir.rows();
    std::vector<MapFamily::Map> maps;
    maps.reserve(params.inputs.size());
    for (const auto& u : params.inputs) {
        const Matrix wr = params.w_reservoir;
        const Vector bias = params.w_input * u;
        const double a = params.leak;
        MapFamily::EvalFn eval = [wr, bias, a](const Vector& x, Vector& out) {
            out.noalias() = wr * x;
            out += bias;
            out.array() = (1.0 - a) * x.array() + a * out.array().tanh();
        };
        MapFamily::JacFn jac = [wr, bias, a](const Vector& x, Matrix& out) {
            const Vector z = wr * x + bias;
            const Vector sech2 = 1.0 - z.array().tanh().square();
            out = a * sech2.asDiagonal() * wr;
            out.diagonal().array() += 1.0 - a;
        };
        maps.push_back({std::move(eval), std::move(jac)});
    }
    return MapFamily(std::move(name), Box::cube(static_cast<int>(r), -1.0, 1.0), std::move(maps));
}

/// The two-neuron reference network: diagonal reservoir (1/2, 7/4),
/// identity input coupling, leak 1/4, inputs (1/4, 1/20) and (-1/4, -1/2).
inline EsnParams esn2d_params() {
    EsnParams p;
    p.w_reservoir = Matrix{{0.5, 0.0}, {0.0, 1.75}};
    p.w_input = Matrix::Identity(2, 2);
    p.leak = 0.25;
    p.inputs = {Vector{{0.25, 0.05}}, Vector{{-0.25, -0.5}}};
    return p;
}

inline MapFamily make_esn2d() { return make_esn(esn2d_params(), "esn2d"); }

/// Scalar base map with a sin(pi/x)-modulated core on [-1, 1] and linear
/// slope-1/2 tails glued continuously at +-1.
inline double diabolic_base(double x) {
    if (x > 1.0) return 0.5 * x + 0.5;
    if (x < -1.0) return 0.5 * x - 0.5;
    if (x == 0.0) return 0.0;
    return x + x * x * std::sin(M_PI / x);
}

inline double diabolic_base_derivative(double x) {
    if (x > 1.0 || x < -1.0) return 0.5;
    if (x == 0.0) return 1.0;
    return 1.0 + 2.0 * x * std::sin(M_PI / x) - M_PI * std::cos(M_PI / x);
}

/// Two shifted copies of the base map: f0(x) = f(x) + 1 and
/// f1(x) = f(x - 1). Each has a unique attracting fixed point (at 3 and at
/// -2 respectively), yet their alternation supports many coexisting
/// attracting responses.
inline MapFamily make_diabolic() {
    MapFamily::Map f0{
        [](const Vector& x, Vector& out) { out[0] = diabolic_base(x[0]) + 1.0; },
        [](const Vector& x, Matrix& out) { out(0, 0) = diabolic_base_derivative(x[0]); }};
    MapFamily::Map f1{
        [](const Vector& x, Vector& out) { out[0] = diabolic_base(x[0] - 1.0); },
        [](const Vector& x, Matrix& out) { out(0, 0) = diabolic_base_derivative(x[0] - 1.0); }};
    return MapFamily("diabolic", Box::cube(1, -5.0, 5.0), {std::move(f0), std::move(f1)});
}

/// Single-map family applying the listed maps in order (order[0] first).
/// Jacobians chain when every stage has an analytic one. The optional
/// domain restricts the composed family; intermediate states may leave it.
inline MapFamily compose_maps(const MapFamily& family, std::vector<int> order,
                              std::optional<Box> domain = std::nullopt) {
    if (order.empty()) throw InvalidSpec("composition order must be nonempty");
    std::vector<MapFamily::Map> stages;
    stages.reserve(order.size());
    bool all_jac = true;
    for (int i : order) {
        stages.push_back(family.map(i));
        all_jac = all_jac && static_cast<bool>(stages.back().jacobian);
    }
    MapFamily::EvalFn eval = [stages](const Vector& x, Vector& out) {
        Vector cur = x;
        for (const auto& stage : stages) {
            stage.eval(cur, out);
            cur.swap(out);
        }
        out = cur;
    };
    MapFamily::JacFn jac;
    if (all_jac) {
        jac = [stages](const Vector& x, Matrix& out) {
            Vector cur = x, next(x.size());
            Matrix stage_jac(x.size(), x.size());
            out = Matrix::Identity(x.size(), x.size());
            for (const auto& stage : stages) {
                stage.jacobian(cur, stage_jac);
                out = stage_jac * out;
                stage.eval(cur, next);
                cur.swap(next);
            }
        };
    }
    return MapFamily(family.name() + "-composed", domain ? *domain : family.domain(),
                     {{std::move(eval), std::move(jac)}});
}

}  // namespace echolab
