#include "echolab/io.hpp"
#include "echolab/map_family.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace echolab;

TEST_CASE("esn2d update at the origin") {
    const auto fam = make_esn2d();
    const Vector x = Vector::Zero(2);
    const Vector y = fam.apply(0, x);
    CHECK(y[0] == Catch::Approx(0.25 * std::tanh(0.25)).epsilon(1e-15));
    CHECK(y[1] == Catch::Approx(0.25 * std::tanh(0.05)).epsilon(1e-15));
}

TEST_CASE("esn equilibria satisfy x = tanh(Wr x + Win u) independent of the leak") {
    // Fixed point from the per-coordinate bisection oracle.
    const double x1 = oracle::tanh_equilibria(0.5, -0.25).at(0);
    const double x2 = oracle::tanh_equilibria(1.75, -0.5).at(0);
    for (double leak : {0.1, 0.25, 1.0}) {
        auto params = esn2d_params();
        params.leak = leak;
        const auto fam = make_esn(params);
        const Vector fp{{x1, x2}};
        CHECK((fam.apply(1, fp) - fp).norm() < 1e-9);
    }
}

TEST_CASE("diabolic maps fix the derived attractors") {
    const auto fam = make_diabolic();
    CHECK(fam.apply(0, Vector{{3.0}})[0] == 3.0);
    CHECK(fam.apply(1, Vector{{-2.0}})[0] == -2.0);
    // Linear tails have slope exactly 1/2.
    CHECK(fam.jacobian(0, Vector{{2.5}})(0, 0) == 0.5);
    CHECK(fam.jacobian(1, Vector{{-3.0}})(0, 0) == 0.5);
}

TEST_CASE("analytic jacobians match central differences") {
    const auto check_family = [](const MapFamily& fam, std::uint64_t seed) {
        SplitMix64 rng(seed);
        const auto& box = fam.domain();
        for (int i = 0; i < fam.alphabet_size(); ++i) {
            for (int trial = 0; trial < 100; ++trial) {
                Vector x(fam.dim());
                for (int d = 0; d < fam.dim(); ++d)
                    x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * rng.next_unit();
                const auto f = [&](const Vector& y) { return fam.apply(i, y); };
                const Matrix analytic = fam.jacobian(i, x);
                const Matrix fd = oracle::fd_jacobian(f, x);
                const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
                REQUIRE((analytic - fd).cwiseAbs().maxCoeff() / scale < 1e-6);
            }
        }
    };
    check_family(make_esn2d(), 11);
    check_family(make_diabolic(), 12);
}

TEST_CASE("degenerate network: full leak and zero reservoir is constant") {
    EsnParams p;
    p.w_reservoir = Matrix::Zero(2, 2);
    p.w_input = Matrix::Identity(2, 2);
    p.leak = 1.0;
    p.inputs = {Vector{{0.3, -0.2}}};
    const auto fam = make_esn(p);
    CHECK(fam.jacobian(0, Vector{{0.4, -0.9}}).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("maps are self-maps of their boxes") {
    for (const auto* name : {"esn2d", "diabolic"}) {
        const auto fam = family_from_name(name);
        SplitMix64 rng(3);
        for (int i = 0; i < fam.alphabet_size(); ++i)
            for (int trial = 0; trial < 200; ++trial) {
                Vector x(fam.dim());
                for (int d = 0; d < fam.dim(); ++d)
                    x[d] = fam.domain().lo[d] +
                           (fam.domain().hi[d] - fam.domain().lo[d]) * rng.next_unit();
                CHECK(fam.domain().contains(fam.apply(i, x)));
            }
    }
}

TEST_CASE("domain membership is enforced") {
    const auto fam = make_esn2d();
    CHECK_THROWS_AS(fam.apply(0, Vector{{1.5, 0.0}}), OutOfDomain);
    CHECK_THROWS_AS(fam.jacobian(0, Vector{{0.0, -2.0}}), OutOfDomain);
    CHECK_THROWS_AS(fam.apply(2, Vector{{0.0, 0.0}}), InvalidSpec);
}

TEST_CASE("composition applies maps in listed order") {
    const auto fam = make_diabolic();
    // f1(f0(x)) collapses to the double base map.
    const auto composed = compose_maps(fam, {0, 1}, Box::cube(1, -1.0, 1.0));
    for (double x : {-0.9, -0.3, 0.05, 0.4, 1.0}) {
        const double direct = diabolic_base(diabolic_base(x));
        CHECK(composed.apply(0, Vector{{x}})[0] == Catch::Approx(direct).margin(1e-15));
    }
    // Chain-rule jacobian agrees with central differences.
    const auto f = [&](const Vector& y) { return composed.apply(0, y); };
    const Vector probe{{0.37}};
    CHECK(composed.jacobian(0, probe)(0, 0) ==
          Catch::Approx(oracle::fd_jacobian(f, probe)(0, 0)).margin(1e-5));
}

TEST_CASE("esn params validation") {
    EsnParams p = esn2d_params();
    p.leak = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidSpec);
    p = esn2d_params();
    p.inputs.clear();
    CHECK_THROWS_AS(p.validate(), InvalidSpec);
    p = esn2d_params();
    p.inputs[0] = Vector{{1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(p.validate(), InvalidSpec);
}

TEST_CASE("esn params JSON round trip and custom family construction") {
    const auto params = esn2d_params();
    const auto j = to_json(params);
    const auto back = esn_params_from_json(j);
    CHECK(back.w_reservoir == params.w_reservoir);
    CHECK(back.w_input == params.w_input);
    CHECK(back.leak == params.leak);
    REQUIRE(back.inputs.size() == 2);
    CHECK(back.inputs[1] == params.inputs[1]);

    const auto fam = family_from_json(j);
    const auto ref = make_esn2d();
    const Vector x{{0.2, -0.4}};
    CHECK(fam.apply(1, x) == ref.apply(1, x));

    CHECK(family_from_json(Json::parse(R"({"preset":"diabolic"})")).name() == "diabolic");
    CHECK_THROWS_AS(family_from_json(Json::parse(R"({"preset":"nope"})")), InvalidSpec);
}
