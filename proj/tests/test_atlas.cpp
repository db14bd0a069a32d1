#include "echolab/atlas.hpp"
#include "echolab/io.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace echolab;
using oracle::seq_of;

namespace {

/// One-map family x -> rate * x on [-1, 1], a global contraction.
MapFamily linear_family(double rate) {
    MapFamily::Map m{[rate](const Vector& x, Vector& out) { out = rate * x; },
                     [rate](const Vector&, Matrix& out) { out(0, 0) = rate; }};
    return MapFamily("linear", Box::cube(1, -1.0, 1.0), {std::move(m)});
}

TransitionTable esn_table() {
    const auto fam = make_esn2d();
    std::vector<std::vector<FixedPoint>> stable;
    for (int i = 0; i < 2; ++i) stable.push_back(stable_only(find_fixed_points(fam, i)));
    return transition_table(fam, stable);
}

}  // namespace

TEST_CASE("map 0 of the network has two stable points and a saddle") {
    const auto fam = make_esn2d();
    const auto search = find_fixed_points(fam, 0);
    REQUIRE(search.points.size() == 3);

    // Per-coordinate oracle: the 2-D equilibria are products of scalar roots.
    const auto c1 = oracle::tanh_equilibria(0.5, 0.25);
    const auto c2 = oracle::tanh_equilibria(1.75, 0.05);
    REQUIRE(c1.size() == 1);
    REQUIRE(c2.size() == 3);

    int stable = 0, saddle = 0;
    for (const auto& fp : search.points) {
        CHECK(fp.residual < 1e-10);
        CHECK(fp.location[0] == Catch::Approx(c1[0]).margin(1e-8));
        if (fp.kind == StabilityKind::kStable) ++stable;
        if (fp.kind == StabilityKind::kSaddle) ++saddle;
    }
    CHECK(stable == 2);
    CHECK(saddle == 1);

    // Sorted by coordinates: down attractor, saddle, up attractor.
    CHECK(search.points[0].location[1] == Catch::Approx(c2[0]).margin(1e-8));
    CHECK(search.points[1].location[1] == Catch::Approx(c2[1]).margin(1e-8));
    CHECK(search.points[2].location[1] == Catch::Approx(c2[2]).margin(1e-8));

    // The common first coordinate sits near 0.44.
    CHECK(search.points[0].location[0] > 0.40);
    CHECK(search.points[0].location[0] < 0.50);
}

TEST_CASE("map 1 of the network has a single stable point, both coordinates negative") {
    const auto fam = make_esn2d();
    const auto search = find_fixed_points(fam, 1);
    REQUIRE(search.points.size() == 1);
    const auto& fp = search.points[0];
    CHECK(fp.kind == StabilityKind::kStable);
    CHECK(fp.residual < 1e-10);
    CHECK(fp.location[0] < 0.0);
    CHECK(fp.location[1] < 0.0);
    CHECK(fp.location[0] == Catch::Approx(oracle::tanh_equilibria(0.5, -0.25).at(0)).margin(1e-8));
    CHECK(fp.location[1] == Catch::Approx(oracle::tanh_equilibria(1.75, -0.5).at(0)).margin(1e-8));
}

TEST_CASE("fixed points are leak-independent and seed-density-stable") {
    auto params = esn2d_params();
    std::vector<Vector> reference;
    for (const auto& fp : find_fixed_points(make_esn2d(), 0).points)
        reference.push_back(fp.location);
    for (double leak : {0.1, 1.0}) {
        params.leak = leak;
        const auto pts = find_fixed_points(make_esn(params), 0).points;
        REQUIRE(pts.size() == reference.size());
        for (std::size_t q = 0; q < pts.size(); ++q)
            CHECK((pts[q].location - reference[q]).norm() < 1e-9);
    }
    FixedPointOptions dense;
    dense.seeds_per_dim = 24;
    const auto pts = find_fixed_points(make_esn2d(), 0, dense).points;
    REQUIRE(pts.size() == reference.size());
    for (std::size_t q = 0; q < pts.size(); ++q)
        CHECK((pts[q].location - reference[q]).norm() < 1e-9);
}

TEST_CASE("stable eigenvalues lie strictly inside the unit circle") {
    const auto fam = make_esn2d();
    for (int i = 0; i < 2; ++i)
        for (const auto& fp : find_fixed_points(fam, i).points) {
            if (fp.kind != StabilityKind::kStable) continue;
            for (Eigen::Index d = 0; d < fp.eigenvalues.size(); ++d)
                CHECK(std::abs(fp.eigenvalues[d]) < 1.0 - 1e-6);
        }
}

TEST_CASE("diabolic maps each have exactly one stable fixed point") {
    const auto fam = make_diabolic();
    FixedPointOptions opt;
    opt.seeds_per_dim = 64;
    const auto s0 = stable_only(find_fixed_points(fam, 0, opt));
    REQUIRE(s0.size() == 1);
    CHECK(s0[0].location[0] == Catch::Approx(3.0).margin(1e-9));
    const auto s1 = stable_only(find_fixed_points(fam, 1, opt));
    REQUIRE(s1.size() == 1);
    CHECK(s1[0].location[0] == Catch::Approx(-2.0).margin(1e-9));
}

TEST_CASE("basins of map 0 split along the saddle line") {
    const auto fam = make_esn2d();
    const auto stable = stable_only(find_fixed_points(fam, 0));
    const double saddle_x2 = find_fixed_points(fam, 0).points[1].location[1];
    BasinOptions opt;
    opt.grid_res = 200;
    const auto grid = estimate_basins(fam, 0, stable, opt);
    CHECK(grid.unresolved_fraction < 0.01);

    const double cell = 2.0 / opt.grid_res;
    for (int cx : {10, 100, 190})
        for (int cy = 0; cy < opt.grid_res; ++cy) {
            const double x2 = -1.0 + (cy + 0.5) * cell;
            const int label = grid.labels[static_cast<std::size_t>(cx) * opt.grid_res + cy];
            if (label == BasinGrid::kUnresolved) continue;
            if (x2 > saddle_x2 + cell) CHECK(label == 1);
            if (x2 < saddle_x2 - cell) CHECK(label == 0);
        }
}

TEST_CASE("map 1 attracts the whole box") {
    const auto fam = make_esn2d();
    const auto stable = stable_only(find_fixed_points(fam, 1));
    BasinOptions opt;
    opt.grid_res = 60;
    const auto grid = estimate_basins(fam, 1, stable, opt);
    CHECK(grid.unresolved_fraction == 0.0);
    for (const auto label : grid.labels) CHECK(label == 0);
}

TEST_CASE("global contraction labels every cell") {
    const auto fam = linear_family(0.5);
    const auto stable = stable_only(find_fixed_points(fam, 0));
    REQUIRE(stable.size() == 1);
    const auto grid = estimate_basins(fam, 0, stable, {.grid_res = 100});
    for (const auto label : grid.labels) CHECK(label == 0);
    CHECK_THROWS_AS(estimate_basins(fam, 0, {}, {}), NoStablePoints);
}

TEST_CASE("each stable point sits in its own basin cell") {
    const auto fam = make_esn2d();
    for (int i = 0; i < 2; ++i) {
        const auto stable = stable_only(find_fixed_points(fam, i));
        const auto grid = estimate_basins(fam, i, stable, {.grid_res = 120});
        for (std::size_t j = 0; j < stable.size(); ++j)
            CHECK(grid.label_at(stable[j].location) == static_cast<std::int32_t>(j));
    }
}

TEST_CASE("network transition table") {
    const auto table = esn_table();
    REQUIRE(table.complete());
    REQUIRE(table.attractor_counts == std::vector<int>{2, 1});
    // Down attractor first in coordinate order: index 0 = down, 1 = up.
    CHECK(table.at(0, 0, 1) == 0);
    CHECK(table.at(0, 1, 1) == 0);
    CHECK(table.at(1, 0, 0) == 0);  // map 1's attractor lies below the saddle line
    CHECK(table.at(0, 0, 0) == 0);
    CHECK(table.at(0, 1, 0) == 1);
    CHECK(table.at(1, 0, 1) == 0);
}

TEST_CASE("transition table consistency: orbits land on the designated attractor") {
    const auto fam = make_esn2d();
    std::vector<std::vector<FixedPoint>> stable;
    for (int i = 0; i < 2; ++i) stable.push_back(stable_only(find_fixed_points(fam, i)));
    const auto table = transition_table(fam, stable);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < table.attractor_counts[i]; ++j)
            for (int k = 0; k < 2; ++k) {
                const Vector limit = fam.iterate(k, stable[i][j].location, 3000);
                CHECK(max_norm_dist(limit, stable[k][table.at(i, j, k)].location) < 1e-6);
            }
}

TEST_CASE("diabolic transition table is all zeros") {
    const auto fam = make_diabolic();
    FixedPointOptions opt;
    opt.seeds_per_dim = 64;
    std::vector<std::vector<FixedPoint>> stable;
    for (int i = 0; i < 2; ++i) stable.push_back(stable_only(find_fixed_points(fam, i, opt)));
    const auto table = transition_table(fam, stable);
    REQUIRE(table.complete());
    CHECK(table.at(0, 0, 1) == 0);
    CHECK(table.at(1, 0, 0) == 0);
}

TEST_CASE("forward attractor sequences follow the table") {
    const auto table = esn_table();

    std::string w(20, '0');
    w += std::string(10, '1');
    w += std::string(20, '0');
    const auto seq = forward_attractor_sequence(table, seq_of(w), 1);
    REQUIRE(seq.indices.size() == 50);
    for (int k = 0; k < 20; ++k) CHECK(seq.indices[k] == 1);   // stays up
    for (int k = 20; k < 30; ++k) CHECK(seq.indices[k] == 0);  // unique attractor of map 1
    for (int k = 30; k < 50; ++k) CHECK(seq.indices[k] == 0);  // re-enters below: down

    const auto constant = forward_attractor_sequence(table, seq_of(std::string(40, '0')), 0);
    for (int v : constant.indices) CHECK(v == 0);

    CHECK_THROWS_AS(forward_attractor_sequence(table, seq_of("111"), 1), InvalidSeed);
}

TEST_CASE("attractor sequence counts") {
    const auto table = esn_table();

    const auto constant = count_attractor_sequences(table, seq_of(std::string(40, '0')));
    CHECK(constant.distinct_windows == 2);
    CHECK(constant.distinct_tails == 2);

    std::string w(20, '0');
    w += std::string(35, '1');
    w += std::string(20, '0');
    const auto merged = count_attractor_sequences(table, seq_of(w));
    CHECK(merged.distinct_windows == 2);
    CHECK(merged.distinct_tails == 1);

    const auto fam = make_diabolic();
    FixedPointOptions opt;
    opt.seeds_per_dim = 64;
    std::vector<std::vector<FixedPoint>> stable;
    for (int i = 0; i < 2; ++i) stable.push_back(stable_only(find_fixed_points(fam, i, opt)));
    const auto dtable = transition_table(fam, stable);
    const auto alt = count_attractor_sequences(dtable, seq_of("01010101"));
    CHECK(alt.distinct_windows == 1);
    CHECK(alt.distinct_tails == 1);
}

TEST_CASE("tail count never exceeds window count or the seed count") {
    const auto table = esn_table();
    const auto spec = RepeatSpec::binary(2, 10, 1, 8, 0.5, 0.5);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto v = generate_sequence(spec, 60, seed);
        const auto count = count_attractor_sequences(table, v);
        CHECK(count.distinct_tails <= count.distinct_windows);
        CHECK(count.distinct_windows <= table.attractor_counts[v.symbols.front()]);
    }
}

TEST_CASE("contraction horizon of exact linear maps") {
    CHECK(contraction_horizon(linear_family(0.5), 0, Vector{{0.0}}, 0.3, 0.1) == 2);
    CHECK(contraction_horizon(linear_family(0.9), 0, Vector{{0.0}}, 0.99, 0.1) == 1);
    ContractionOptions tight;
    tight.cap = 3;
    CHECK_THROWS_AS(contraction_horizon(linear_family(0.99), 0, Vector{{0.0}}, 0.1, 0.1, tight),
                    HorizonExceeded);
}

TEST_CASE("contraction horizon of map 1 near its attractor") {
    const auto fam = make_esn2d();
    const auto fp = find_fixed_points(fam, 1).points.at(0);
    const int n = contraction_horizon(fam, 1, fp.location, 0.5, 1e-3);

    // Cross-check against the product of jacobian spectral radii along the
    // constant orbit (finite differences, independent of the library path).
    const auto f = [&](const Vector& y) { return fam.apply(1, y); };
    const Matrix jac = oracle::fd_jacobian(f, fp.location);
    const double sr = std::max(std::abs(jac(0, 0)), std::abs(jac(1, 1)));
    const int predicted = static_cast<int>(std::ceil(std::log(0.5) / std::log(sr)));
    CHECK(n >= predicted - 1);
    CHECK(n <= predicted + 2);
}

TEST_CASE("funneling horizon of simple criteria") {
    const auto fam = linear_family(0.5);
    const auto criterion = FunnelCriterion::enter_balls({Vector{{0.0}}}, 0.6);
    CHECK(estimate_mmin(fam, 0, criterion, fam.domain(), 100) == 1);

    const auto tiny = FunnelCriterion::enter_balls({Vector{{0.0}}}, 1e-30);
    CHECK_THROWS_AS(estimate_mmin(fam, 0, tiny, fam.domain(), 10, 50), NotFunneling);

    const auto already = FunnelCriterion::enter_balls({Vector{{0.0}}}, 2.5);
    CHECK(estimate_mmin(fam, 0, already, fam.domain(), 10) == 0);
}

TEST_CASE("funneling horizon of map 1 across the saddle line") {
    const auto fam = make_esn2d();
    const double saddle_x2 = find_fixed_points(fam, 0).points[1].location[1];
    const Box upper(Vector{{-1.0, saddle_x2}}, Vector{{1.0, 1.0}});
    const int m = estimate_mmin(fam, 1, FunnelCriterion::below(1, saddle_x2), upper, 100);
    CHECK(m >= 28);
    CHECK(m <= 31);
}

TEST_CASE("atlas bundles fixed points, basins and transitions") {
    AtlasOptions opt;
    opt.basins.grid_res = 80;
    const auto atlas = build_atlas(make_esn2d(), opt);
    REQUIRE(atlas.maps.size() == 2);
    CHECK(atlas.maps[0].stable.size() == 2);
    CHECK(atlas.maps[0].other.size() == 1);
    CHECK(atlas.maps[1].stable.size() == 1);
    CHECK(atlas.table.complete());
    CHECK(atlas.maps[0].basins.unresolved_fraction < 0.01);

    const auto j = to_json(atlas);
    CHECK(j["family"] == "esn2d");
    CHECK(j["attractor_counts"] == Json::array({2, 1}));
    CHECK(j["maps"].size() == 2);

    const auto pgm = basin_pgm(atlas.maps[0].basins);
    CHECK(pgm.rfind("P2\n80 80\n2\n", 0) == 0);
}
