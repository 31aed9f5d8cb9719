#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "chern/invariants.hpp"
#include "chern/phasediag.hpp"

using namespace chern;
using namespace chern::phasediag;
using models::builtin_model;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);

std::vector<std::pair<int, int>> random_degree_pairs(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> degree(-6, 6);
    std::vector<std::pair<int, int>> out;
    while (static_cast<int>(out.size()) < count) {
        const int d = degree(rng);
        const int dprime = degree(rng);
        if (d != dprime) out.emplace_back(d, dprime);
    }
    return out;
}

int winding(const RoseCurve& curve) { return invariants::winding_number({curve.samples, true}); }

// Oracle for the mb_dirac regions: signed count of z-axis crossings above the
// origin, with heights M, M - B, M - B, M - 2B and signs +1, -1, -1, +1.
int mb_expected(double M, double B) { return (M > 0) - 2 * (M - B > 0) + (M - 2 * B > 0); }

void check_jumps_cross_degeneracies(const PhaseDiagram& diagram, double threshold) {
    for (const auto& b : diagram.boundaries) {
        const auto& from = diagram.cells[b.from];
        const auto& to = diagram.cells[b.to];
        if (from.chern && to.chern && *from.chern != *to.chern) CHECK(b.gap < threshold);
    }
}

}  // namespace

TEST_CASE("wall zero examples") {
    CHECK(wall_zeros(1, 2) == std::vector<double>{pi});
    const auto trifolium = wall_zeros(1, -2);
    REQUIRE(trifolium.size() == 3);
    CHECK(trifolium[0] == doctest::Approx(pi / 3));
    CHECK(trifolium[1] == doctest::Approx(pi));
    CHECK(trifolium[2] == doctest::Approx(5 * pi / 3));
    CHECK(wall_zeros(-2, 4).size() == 6);
    const auto collapse = wall_zeros(1, -1);
    REQUIRE(collapse.size() == 2);
    CHECK(collapse[0] == doctest::Approx(pi / 2));
    CHECK(collapse[1] == doctest::Approx(3 * pi / 2));
    CHECK_THROWS_AS(wall_zeros(3, 3), ConfigError);
    CHECK(dirac_count(1, 2) == 1);
    CHECK(dirac_count(4, 4) == 0);
    CHECK(dirac_count(-2, 4) == 6);
}

TEST_CASE("walls are localised at t = 1/2") {
    for (const auto& [d, dprime] : random_degree_pairs(31, 50)) {
        const auto family = wall_family(d, dprime);
        for (const double phi : wall_zeros(d, dprime)) {
            CHECK(norm(family.equator(0.5, phi)) < 1e-12);
            CHECK(norm(family(0.5, phi, pi / 2)) < 1e-12);
        }
        for (const auto& s : wall_trace(d, dprime, 101, 512)) {
            if (std::abs(s.t - 0.5) > 0.05) {
                CHECK(s.min_norm > 0.099);
            } else if (std::abs(s.t - 0.5) < 1e-12) {
                CHECK(s.min_norm < 1e-6);
            }
        }
        // Off the equator the sphere map keeps its vertical component.
        for (const double theta : {0.3, 1.2, 2.0, 2.9}) {
            for (const double phi : wall_zeros(d, dprime)) CHECK(norm(family(0.5, phi, theta)) >= std::abs(std::cos(theta)) - 1e-15);
        }
    }
}

TEST_CASE("rose windings plateau on either side of the wall") {
    for (const auto& [d, dprime] : random_degree_pairs(32, 20)) {
        for (const double t : {0.1, 0.25, 0.4}) CHECK(winding(rose_curve(d, dprime, t)) == d);
        for (const double t : {0.6, 0.75, 0.9}) CHECK(winding(rose_curve(d, dprime, t)) == dprime);
    }
    CHECK(winding(rose_curve(1, 2, 0.25)) == 1);
    CHECK(winding(rose_curve(5, 7, 0.75)) == 7);
}

TEST_CASE("rose curves at the wall satisfy the polar equation") {
    for (const auto& [d, dprime] : random_degree_pairs(33, 30)) {
        const auto curve = rose_curve(d, dprime, 0.5);
        if (d + dprime == 0) {
            CHECK_FALSE(curve.k_rose);
            CHECK_THROWS_AS(polar_deviation(curve), ConfigError);
            for (const auto& p : curve.samples) CHECK(std::abs(p.y) < 1e-12);
            continue;
        }
        CHECK(*curve.k_rose == doctest::Approx(std::abs(d - dprime) / static_cast<double>(std::abs(d + dprime))));
        CHECK(polar_deviation(curve) < 1e-9);
    }
    CHECK(rose_curve(1, 2, 0.5).polar_period == 3.0);
    CHECK(rose_curve(1, -2, 0.5).polar_period == 1.0);
    CHECK(rose_curve(-2, 4, 0.5).polar_period == 1.0);
    CHECK(rose_curve(1, 3, 0.5).polar_period == 4.0);
    CHECK_THROWS_AS(polar_deviation(rose_curve(1, 2, 0.3)), ConfigError);
}

TEST_CASE("a degree zero endpoint gives the half circle") {
    for (const int dprime : {1, 2, -3}) {
        for (const auto& p : rose_curve(0, dprime, 0.5).samples) CHECK(norm(p - Vec2{0.5, 0.0}) == doctest::Approx(0.5));
    }
}

TEST_CASE("rose sampling density") {
    for (const auto& [d, dprime] : random_degree_pairs(34, 20)) {
        for (const double t : {0.05, 0.3, 0.45, 0.7}) {
            const auto curve = rose_curve(d, dprime, t, 10);
            const auto n = curve.samples.size();
            CHECK(n >= static_cast<std::size_t>(16 * (std::abs(d) + std::abs(dprime) + 1)));
            double widest = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 a = curve.samples[i];
                const Vec2 b = curve.samples[(i + 1) % n];
                widest = std::max(widest, std::abs(std::atan2(cross(a, b), dot(a, b))));
            }
            CHECK(widest < 0.1);
        }
    }
    CHECK(rose_curve(1, 2, 0.25, 5000).samples.size() >= 5000);
}

TEST_CASE("two-chamber fan is the standard wall") {
    const FanDiagram fan{{1, -1}};
    const auto family = fan_family(fan);
    const auto wall = wall_family(-1, 1);
    for (const double s : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        const double alpha = 1.5 * pi + s * pi;
        const Vec2 p{std::cos(alpha), std::sin(alpha)};
        for (const double phi : {0.1, 1.7, 4.0}) {
            for (const double theta : {0.4, pi / 2, 2.5}) CHECK(norm(family(p, phi, theta) - wall(s, phi, theta)) < 1e-12);
        }
    }
    const auto report = verify_realization(fan, family);
    CHECK(report.ok);
}

TEST_CASE("fan realisations") {
    SUBCASE("three chambers") {
        const FanDiagram fan{{0, 1, 2}};
        const auto report = verify_realization(fan, fan_family(fan));
        CHECK(report.ok);
        CHECK(report.measured == std::vector<std::optional<int>>{0, 1, 2});
        CHECK(report.ray_degenerate == std::vector<bool>{true, true, true});
        CHECK(report.degenerate_angles.empty());
        CHECK(report.off_ray_min_norm > 1e-3);
    }
    SUBCASE("constant labels are nowhere degenerate") {
        const FanDiagram fan{{1, 1, 1, 1}};
        const auto report = verify_realization(fan, fan_family(fan));
        CHECK(report.ok);
        CHECK(report.ray_degenerate == std::vector<bool>{false, false, false, false});
        CHECK(report.off_ray_min_norm > 0.5);
    }
    SUBCASE("a family built for other labels fails") {
        const auto report = verify_realization(FanDiagram{{0, 1, 2}}, fan_family(FanDiagram{{0, 1, 3}}));
        CHECK_FALSE(report.ok);
    }
    CHECK_THROWS_AS(fan_family(FanDiagram{}), ConfigError);
    CHECK_THROWS_AS(verify_realization(FanDiagram{{1, 2, 3}}, fan_family(FanDiagram{{1, 2, 3}}), 0.0), ConfigError);
}

TEST_CASE("minimum gap finds the Dirac point") {
    const auto model = builtin_model("haldane");
    const auto found = minimum_gap(model, model.resolve({{"t2", 1.0}, {"m", 3 * sqrt3}}));
    CHECK(found.gap < 1e-9);
    const auto f = model.zone.fractional(found.k - KPoint{-4 * pi / (3 * sqrt3), 0.0});
    CHECK(std::abs(f.x - std::round(f.x)) < 1e-6);
    CHECK(std::abs(f.y - std::round(f.y)) < 1e-6);
}

TEST_CASE("bhz line scan") {
    const auto model = builtin_model("bhz_square");
    const auto diagram = scan(model, model.defaults(), {{"m", -3.0, 3.0, 121}});
    REQUIRE(diagram.criticals.size() == 3);
    CHECK(diagram.criticals[0].location == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(std::abs(diagram.criticals[1].location) < 1e-6);
    CHECK(diagram.criticals[2].location == doctest::Approx(2.0).epsilon(1e-6));
    for (const auto& cell : diagram.cells) {
        const double m = cell.coords[0];
        if (std::abs(std::abs(m) - 2.0) < 1e-9 || std::abs(m) < 1e-9) {
            CHECK(cell.degenerate);
            continue;
        }
        REQUIRE(cell.chern);
        const int expected = std::abs(m) > 2 ? 0 : (m < 0 ? 1 : -1);
        CHECK(*cell.chern == expected);
    }
    check_jumps_cross_degeneracies(diagram, 1e-6);
    CHECK(diagram.errors.empty());
}

TEST_CASE("kagome line scan") {
    const auto model = builtin_model("kagome");
    const auto diagram = scan(model, model.defaults(), {{"u1", -3.0, 3.0, 25}});
    REQUIRE(diagram.criticals.size() == 3);
    CHECK(std::abs(diagram.criticals[0].location + sqrt3) < 1e-6);
    CHECK(std::abs(diagram.criticals[1].location) < 1e-6);
    CHECK(std::abs(diagram.criticals[2].location - sqrt3) < 1e-6);
}

TEST_CASE("haldane plane scan tracks |m| = 3 sqrt3 t2 |sin phi|") {
    const auto model = builtin_model("haldane");
    const auto base = model.resolve({{"t2", 1.0}});
    const auto diagram = scan(model, base, {{"phi", -pi, pi, 9}, {"m", -7.0, 7.0, 8}}, {.chern_grid = {30, 30}, .gap = {}});
    std::set<int> labels;
    for (const auto& cell : diagram.cells) {
        if (cell.chern) labels.insert(*cell.chern);
    }
    CHECK(labels == std::set<int>{-1, 0, 1});
    int along_m = 0;
    for (const auto& b : diagram.boundaries) {
        if (b.axis != 1) continue;
        ++along_m;
        const double phi = diagram.cells[b.from].coords[0];
        CHECK(std::abs(std::abs(b.location) - 3 * sqrt3 * std::abs(std::sin(phi))) < 1e-6);
    }
    CHECK(along_m > 0);
    check_jumps_cross_degeneracies(diagram, 1e-6);
}

TEST_CASE("mb_dirac plane scan reproduces the six regions") {
    const auto model = builtin_model("mb_dirac");
    const auto diagram = scan(model, model.defaults(), {{"M", -2.3, 2.3, 9}, {"B", -2.1, 2.1, 9}});
    std::set<int> seen;
    for (const auto& cell : diagram.cells) {
        if (!cell.chern) continue;
        CHECK(*cell.chern == mb_expected(cell.coords[0], cell.coords[1]));
        seen.insert(*cell.chern);
    }
    CHECK(seen == std::set<int>{-1, 0, 1});

    ScanOptions ray;
    ray.method = invariants::Method::degree_ray;
    const auto relabelled = scan(model, model.defaults(), {{"M", -2.3, 2.3, 9}, {"B", -2.1, 2.1, 9}}, ray);
    for (std::size_t i = 0; i < diagram.cells.size(); ++i) {
        if (diagram.cells[i].chern) CHECK(relabelled.cells[i].chern == diagram.cells[i].chern);
    }
}

TEST_CASE("scan input validation") {
    const auto model = builtin_model("bhz_square");
    const auto p = model.defaults();
    CHECK_THROWS_AS(scan(model, p, {}), ConfigError);
    CHECK_THROWS_AS(scan(model, p, {{"mass", 0, 1, 3}}), ConfigError);
    CHECK_THROWS_AS(scan(model, p, {{"m", 0, 1, 1}}), ConfigError);
    CHECK_THROWS_AS(scan(model, p, {{"m", 0, 1, 3}, {"m", 0, 1, 3}}), ConfigError);
    const auto haldane_n = builtin_model("haldane_n");
    CHECK_THROWS_AS(scan(haldane_n, haldane_n.defaults(), {{"N", 0.5, 1.5, 3}}), ConfigError);
}
