#include "echolab/atlas.hpp"
#include "echolab/cocycle.hpp"
#include "echolab/io.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace echolab;
using oracle::seq_of;

namespace {

MapFamily contraction_family(double rate) {
    MapFamily::Map m{[rate](const Vector& x, Vector& out) { out = rate * x; },
                     [rate](const Vector&, Matrix& out) { out(0, 0) = rate; }};
    return MapFamily("contraction", Box::cube(1, -1.0, 1.0), {std::move(m)});
}

SymbolSequence constant_window(Symbol s, int len, std::ptrdiff_t origin) {
    SymbolSequence v;
    v.symbols.assign(len, s);
    v.origin = origin;
    return v;
}

}  // namespace

TEST_CASE("zero steps is the identity") {
    const auto fam = make_esn2d();
    const Vector x0{{0.3, -0.7}};
    const auto traj = iterate_cocycle(fam, seq_of("0101"), x0, 0, 0);
    REQUIRE(traj.states.size() == 1);
    CHECK(traj.states[0] == x0);
}

TEST_CASE("composition splits bit-exactly") {
    const auto fam = make_esn2d();
    const auto spec = RepeatSpec::binary(2, 9, 1, 7, 0.6, 0.7);
    SplitMix64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const auto v = generate_sequence(spec, 64, trial);
        const int total = 2 + rng.next_below(62);
        const int split = 1 + rng.next_below(total - 1);
        Vector x0(2);
        x0 << 2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0;

        const auto whole = iterate_cocycle(fam, v, x0, 0, total);
        const auto first = iterate_cocycle(fam, v, x0, 0, split);
        const auto second = iterate_cocycle(fam, v, first.states.back(), split, total - split);
        REQUIRE(whole.states.back() == second.states.back());  // bitwise
    }
}

TEST_CASE("constant input converges to the fixed point of that map") {
    const auto fam = make_esn2d();
    const Vector fp{{oracle::tanh_equilibria(0.5, -0.25).at(0),
                     oracle::tanh_equilibria(1.75, -0.5).at(0)}};
    const auto traj =
        iterate_cocycle(fam, constant_window(1, 500, 0), Vector{{0.9, 0.8}}, 0, 500);
    CHECK((traj.states.back() - fp).norm() < 1e-6);
}

TEST_CASE("window exhaustion is reported") {
    const auto fam = make_esn2d();
    CHECK_THROWS_AS(iterate_cocycle(fam, seq_of("0101"), Vector{{0.0, 0.0}}, 0, 5),
                    WindowExhausted);
    CHECK_THROWS_AS(iterate_cocycle(fam, seq_of("0101"), Vector{{0.0, 0.0}}, -1, 2),
                    WindowExhausted);
}

TEST_CASE("pullback collapses under the globally attracting map") {
    const auto fam = make_esn2d();
    const auto ensemble = Ensemble::uniform(fam.domain(), 50, 7, true);
    const auto report = pullback_cloud(fam, constant_window(1, 501, 500), 500, ensemble);
    CHECK(report.diameter < 1e-8);
}

TEST_CASE("pullback under map 0 keeps two response points") {
    const auto fam = make_esn2d();
    const auto ensemble = Ensemble::uniform(fam.domain(), 50, 7, true);
    const auto report = pullback_cloud(fam, constant_window(0, 501, 500), 500, ensemble);
    const auto clusters = single_linkage(report.cloud, 1e-6);
    REQUIRE(clusters.sizes.size() == 2);
    const double separation =
        std::abs(clusters.centers[0][1] - clusters.centers[1][1]);
    const auto roots = oracle::tanh_equilibria(1.75, 0.05);
    CHECK(separation == Catch::Approx(roots.back() - roots.front()).margin(1e-4));
    CHECK(report.diameter == Catch::Approx(separation).margin(1e-3));
}

TEST_CASE("zero-depth pullback returns the ensemble") {
    const auto fam = make_esn2d();
    const auto ensemble = Ensemble::uniform(fam.domain(), 20, 3);
    const auto report = pullback_cloud(fam, constant_window(0, 1, 0), 0, ensemble);
    CHECK(report.cloud == ensemble.points);
    CHECK(report.diameter == Catch::Approx(cloud_diameter(ensemble.points)));
}

TEST_CASE("pullback diameter is non-increasing in depth") {
    const auto fam = make_esn2d();
    const auto ensemble = Ensemble::uniform(fam.domain(), 30, 11, true);
    const auto spec = RepeatSpec::binary(3, 20, 2, 10, 0.8, 0.9);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto v = generate_sequence(spec, 600, seed);
        v.origin = 500;
        double prev = std::numeric_limits<double>::infinity();
        for (int depth : {5, 50, 120, 500}) {
            const double diam = pullback_cloud(fam, v, depth, ensemble).diameter;
            CHECK(diam <= prev + 1e-12);
            prev = diam;
        }
    }
}

TEST_CASE("pullback reports the gap to a reference set") {
    const auto fam = make_esn2d();
    const auto ensemble = Ensemble::uniform(fam.domain(), 20, 5, true);
    std::vector<Vector> reference;
    for (const auto& fp : stable_only(find_fixed_points(fam, 0)))
        reference.push_back(fp.location);
    const auto report =
        pullback_cloud(fam, constant_window(0, 801, 800), 800, ensemble, &reference);
    REQUIRE(report.hausdorff_to_reference.has_value());
    CHECK(*report.hausdorff_to_reference < 1e-8);
}

TEST_CASE("hausdorff semidistance") {
    const std::vector<Vector> a{Vector{{0.0, 0.0}}};
    const std::vector<Vector> b{Vector{{3.0, 4.0}}};
    CHECK(hausdorff_semidistance(a, a) == 0.0);
    CHECK(hausdorff_semidistance(a, b) == 5.0);

    // Subset: one-sided distance vanishes one way but not the other.
    const std::vector<Vector> small{Vector{{0.0}}, Vector{{1.0}}};
    const std::vector<Vector> big{Vector{{0.0}}, Vector{{1.0}}, Vector{{9.0}}};
    CHECK(hausdorff_semidistance(small, big) == 0.0);
    CHECK(hausdorff_semidistance(big, small) == 8.0);

    const std::vector<Vector> empty;
    CHECK_THROWS_AS(hausdorff_semidistance(empty, a), EmptySet);
}

TEST_CASE("hausdorff semidistance satisfies the triangle inequality") {
    SplitMix64 rng(21);
    const auto random_set = [&] {
        std::vector<Vector> s;
        const int n = 1 + rng.next_below(6);
        for (int q = 0; q < n; ++q) {
            Vector x(2);
            x << 4.0 * rng.next_unit() - 2.0, 4.0 * rng.next_unit() - 2.0;
            s.push_back(std::move(x));
        }
        return s;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_set(), b = random_set(), c = random_set();
        CHECK(hausdorff_semidistance(a, c) <=
              hausdorff_semidistance(a, b) + hausdorff_semidistance(b, c) + 1e-12);
    }
}

TEST_CASE("esp verdicts on the reference network") {
    const auto fam = make_esn2d();
    CHECK(esp_test(fam, constant_window(1, 1001, 1000), 400, 1e-6, 50, 3).verdict ==
          EspVerdict::kEsp);
    CHECK(esp_test(fam, constant_window(0, 1001, 1000), 400, 1e-6, 50, 3).verdict ==
          EspVerdict::kNotEsp);
    CHECK(esp_test(fam, constant_window(0, 1001, 1000), 3, 1e-6, 50, 3).verdict ==
          EspVerdict::kUndecided);
}

TEST_CASE("esp on a one-map contraction once the depth beats the diameter") {
    const auto fam = contraction_family(0.5);
    // 0.5^n * 2 < 1e-6 from n = 21 on.
    const auto report = esp_test(fam, constant_window(0, 101, 100), 25, 1e-6, 20, 9);
    CHECK(report.verdict == EspVerdict::kEsp);
    CHECK(esp_test(fam, constant_window(0, 101, 100), 10, 1e-6, 20, 9).verdict !=
          EspVerdict::kEsp);
}

TEST_CASE("trajectory CSV layout") {
    const auto fam = contraction_family(0.5);
    const auto v = seq_of("000", 0);
    const auto traj = iterate_cocycle(fam, v, Vector{{1.0}}, 0, 2);
    const auto csv = trajectory_csv(traj, v);
    CHECK(csv == "k,symbol,x_1\n0,0,1\n1,0,0.5\n2,0,0.25\n");
}

TEST_CASE("pullback report serializes with a cluster summary") {
    const auto fam = make_esn2d();
    const auto ensemble = Ensemble::uniform(fam.domain(), 30, 7, true);
    const auto report = pullback_cloud(fam, constant_window(0, 501, 500), 500, ensemble);
    const auto j = to_json(report);
    CHECK(j["steps"] == 500);
    CHECK(j["diameter"].get<double>() == Catch::Approx(report.diameter));
    CHECK(j["cluster_count"] == 2);
    REQUIRE(j["clusters"].size() == 2);
    CHECK(j["clusters"][0]["size"].get<int>() + j["clusters"][1]["size"].get<int>() == 34);
}
