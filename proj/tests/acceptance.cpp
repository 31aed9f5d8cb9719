// Acceptance run: one PASS/FAIL line per criterion. Chern signs follow the
// library's orientation (C = deg h for the lower band); where an expected value
// is only meaningful up to that global orientation, the line compares |C| and
// relative signs and says so.

#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "chern/invariants.hpp"
#include "chern/models.hpp"
#include "chern/phasediag.hpp"
#include "chern/quadring.hpp"

using namespace chern;
using models::builtin_model;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);

constexpr double location_tol = 1e-6;
constexpr double residual_tol = 0.02;
constexpr double wall_tol = 1e-9;
constexpr double scramble_tol = 1e-12;
constexpr double sample_gap_floor = 1e-3;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    Verdict() { detail.precision(17); }

    void require(bool condition, const std::string& what) {
        if (!condition) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int berry(const models::BlochModel& model, const models::Params& p, int band = 0, invariants::GridSize grid = {60, 60}) {
    return invariants::chern_berry_lattice(model, p, band, grid).value;
}

Verdict haldane_probes() {
    Verdict v;
    const auto model = builtin_model("haldane");
    const double t2 = 0.5;
    struct Probe {
        double m, phi;
        int expected;
    };
    const Probe probes[] = {{3 * t2, pi / 2, 0}, {0.0, pi / 2, 1}, {0.0, -pi / 2, -1}};
    std::vector<int> measured;
    for (const auto& probe : probes) {
        const auto p = model.resolve({{"t2", t2}, {"m", probe.m}, {"phi", probe.phi}});
        measured.push_back(berry(model, p));
        const auto integral = invariants::degree_integral(model, p, {200, 200});
        v.require(integral.residual < residual_tol, "integral residual " + std::to_string(integral.residual));
        v.require(integral.value == measured.back(), "integral disagrees with the lattice value");
    }
    v.detail << "C(m, phi) at (1.5, pi/2), (0, pi/2), (0, -pi/2) = (" << measured[0] << ", " << measured[1] << ", "
             << measured[2] << "), expected (0, 1, -1) up to orientation";
    const int orientation = measured[1] == 0 ? 1 : measured[1];
    for (std::size_t i = 0; i < measured.size(); ++i) {
        v.require(measured[i] == orientation * probes[i].expected,
                  "probe " + std::to_string(i + 1) + " gives " + std::to_string(measured[i]));
    }
    const double critical = 3 * sqrt3 * t2;
    if (3 * t2 < critical) {
        v.detail << "; m = 3 t2 = " << 3 * t2 << " lies inside |m| < 3 sqrt3 t2 = " << critical
                 << ", the topological lobe, so 0 is not attainable there";
    }
    return v;
}

Verdict haldane_boundary() {
    Verdict v;
    const auto model = builtin_model("haldane");
    const auto base = model.resolve({{"t2", 1.0}, {"phi", pi / 2}});
    const auto c = phasediag::locate_gap_closing(model, base, "m", 4.5, 6.0);
    const double target = 3 * sqrt3;
    v.detail << "m* = " << c.location << ", 3 sqrt3 = " << target << ", |diff| = " << std::abs(c.location - target)
             << ", gap = " << c.gap;
    v.require(std::abs(c.location - target) < location_tol, "location");
    v.require(c.gap < location_tol, "gap does not close");
    return v;
}

Verdict third_neighbour() {
    Verdict v;
    const auto model = builtin_model("haldane3nn");
    const auto p = model.resolve({{"t2", 0.5}, {"t3", 0.35}, {"phi", pi / 2}, {"m", 0.0}});
    const auto report = invariants::cross_validate(model, p);
    v.detail << "engines:";
    int ran = 0;
    for (const auto& run : report.runs) {
        v.detail << ' ' << invariants::to_string(run.method) << '=';
        if (run.result) {
            ++ran;
            v.detail << run.result->value;
            v.require(run.result->value == 2, invariants::to_string(run.method));
        } else {
            v.detail << "n/a";
        }
    }
    v.require(ran == 3, "every engine applies to a two-band model");
    return v;
}

Verdict bhz_square() {
    Verdict v;
    const auto model = builtin_model("bhz_square");
    const auto base = model.resolve({{"t1", 1.0}});
    v.detail << "closings at";
    for (const double target : {-2.0, 0.0, 2.0}) {
        const auto c = phasediag::locate_gap_closing(model, base, "m", target - 0.5, target + 0.37);
        v.detail << ' ' << c.location;
        v.require(std::abs(c.location - target) < location_tol && c.gap < location_tol,
                  "closing near " + std::to_string(target));
    }
    const auto report = invariants::cross_validate(model, model.resolve({{"m", -1.0}}));
    v.detail << "; C(m = -1) = " << report.value << " by all engines";
    v.require(report.value == 1, "unit Chern number");
    return v;
}

Verdict scaling_law() {
    Verdict v;
    using models::ScaleVariant;
    const auto bhz = builtin_model("bhz_square");
    const auto pb = bhz.defaults();
    const int cb = berry(bhz, pb);
    v.detail << "bhz " << cb;
    for (const int n : {2, 3}) {
        const int c = berry(models::scale_model(bhz, n, ScaleVariant::all), pb, 0, {40 * n, 40 * n});
        v.detail << " N=" << n << ":" << c;
        v.require(c == n * n * cb, "bhz N=" + std::to_string(n));
    }

    const auto haldane = builtin_model("haldane");
    const auto ph = haldane.defaults();
    const int ch = berry(haldane, ph);
    v.detail << "; haldane " << ch;
    for (const int n : {2, 3}) {
        bool rejected = false;
        try {
            (void)models::scale_model(haldane, n, ScaleVariant::all);
        } catch (const ConfigError&) {
            rejected = true;
        }
        v.require(rejected, "haldane N=" + std::to_string(n) + " should be inadmissible");
        const auto unchecked = models::scale_model(haldane, n, ScaleVariant::all, {.check_admissibility = false});
        const int c = berry(unchecked, ph, 0, {40 * n, 40 * n});
        v.detail << " N=" << n << ":inadmissible(pull-back " << c << ")";
        v.require(c == n * n * ch, "haldane pull-back N=" + std::to_string(n));
    }
    for (const int n : {4, -2}) {
        const int side = 40 * std::abs(n);
        const int c = berry(models::scale_model(haldane, n, ScaleVariant::all), ph, 0, {side, side});
        v.detail << " N=" << n << ":" << c;
        v.require(c == n * n * ch, "haldane N=" + std::to_string(n));
    }

    const auto hopping = builtin_model("haldane_n");
    v.detail << "; haldane_n";
    for (const int n : {-2, 3, 4}) {
        const auto p = hopping.resolve({{"N", n}});
        const int side = 60 * std::abs(n);
        const int c = berry(hopping, p, 0, {side, side});
        v.detail << " N=" << n << ":" << c;
        v.require(c == n * ch, "haldane_n N=" + std::to_string(n) + " should be N C(haldane)");
    }
    v.detail << " (C = N up to the orientation sign C(haldane) = " << ch << ")";
    return v;
}

Verdict triangular_ratio() {
    Verdict v;
    const auto tri = builtin_model("triangular");
    const auto hal = builtin_model("haldane");
    const int c0 = berry(tri, tri.defaults());
    const int h0 = berry(hal, hal.defaults());
    v.detail << "C(triangular) = " << c0 << " vs C(haldane) = " << h0 << " at the shared defaults;";
    v.require(std::abs(c0) == 3 && c0 == 3 * h0, "|C| = 3 with the haldane sign");
    int matched = 0;
    for (const double phi : {pi / 2, -pi / 4, pi / 6}) {
        for (const double m : {0.0, 1.0, 3.5}) {
            const models::ParamMap params{{"t2", 0.5}, {"phi", phi}, {"m", m}};
            const int t = berry(tri, tri.resolve(params));
            const int h = berry(hal, hal.resolve(params));
            v.detail << ' ' << t << '/' << h;
            if (t == 3 * h) ++matched;
        }
    }
    v.detail << "; ratio 3 at " << matched << "/9 points";
    v.require(matched == 9, "ratio");
    return v;
}

Verdict kagome() {
    Verdict v;
    const auto model = builtin_model("kagome");
    const auto base = model.resolve({{"t1", 1.0}, {"u1", 1.0}});
    const int c = berry(model, base);
    v.detail << "lowest band C = " << c << "; closings at u1 =";
    v.require(c == -1, "lowest band");
    for (const double target : {-sqrt3, 0.0, sqrt3}) {
        const auto crit = phasediag::locate_gap_closing(model, base, "u1", target - 0.31, target + 0.27);
        v.detail << ' ' << crit.location;
        v.require(std::abs(crit.location - target) < location_tol && crit.gap < location_tol,
                  "closing near " + std::to_string(target));
    }
    const auto diagram = phasediag::scan(model, base, {{"u1", -3.0, 3.0, 25}});
    v.detail << "; line scan finds " << diagram.criticals.size() << " criticals";
    v.require(diagram.criticals.size() == 3, "no other gap closings on [-3, 3]");
    return v;
}

Verdict mb_dirac() {
    Verdict v;
    const auto model = builtin_model("mb_dirac");
    const auto oracle = [](double M, double B) {
        return static_cast<int>(M > 0) - 2 * static_cast<int>(M > B) + static_cast<int>(M > 2 * B);
    };
    v.detail << "rows:";
    for (const auto& [M, B] :
         std::vector<std::pair<double, double>>{{1.0, 2.0}, {1.5, 1.0}, {1.0, 0.25}, {-1.0, -2.0}, {-1.5, -1.0}, {-1.0, 1.0}}) {
        const auto report = invariants::cross_validate(model, model.resolve({{"M", M}, {"B", B}}));
        v.detail << ' ' << report.value;
        v.require(report.value == oracle(M, B), "row at M=" + std::to_string(M) + ", B=" + std::to_string(B));
    }
    const auto points = models::pre_dirac_points(model, model.resolve({{"M", 1.0}, {"B", 2.0}}));
    const std::pair<KPoint, int> expected[] = {{{0, 0}, 1}, {{0, pi}, -1}, {{pi, 0}, -1}, {{pi, pi}, 1}};
    v.detail << "; z-axis signs";
    for (const auto& [k, sign] : expected) {
        int found = 0;
        for (const auto& p : points) {
            if (norm(p.k - k) < 1e-8) found = p.jacobian_sign;
        }
        v.detail << ' ' << found;
        v.require(found == sign, "sign");
    }
    v.require(points.size() == 4, "four pre-images");
    return v;
}

Verdict rose_wall() {
    Verdict v;
    int pairs = 0;
    int plateaus = 0;
    double worst = 0.0;
    for (int d = -6; d <= 6; ++d) {
        for (int dp = -6; dp <= 6; ++dp) {
            if (d == dp) continue;
            ++pairs;
            const auto zeros = phasediag::wall_zeros(d, dp);
            const int delta = std::abs(d - dp);
            v.require(static_cast<int>(zeros.size()) == delta, "zero count");
            for (int j = 0; j < delta && j < static_cast<int>(zeros.size()); ++j) {
                worst = std::max(worst, std::abs(zeros[j] - (2 * j + 1) * pi / delta));
            }
            for (const double t : {0.1, 0.25, 0.4, 0.6, 0.75, 0.9}) {
                const int w = invariants::winding_number({phasediag::rose_curve(d, dp, t).samples, true});
                const bool ok = w == (t < 0.5 ? d : dp);
                plateaus += ok ? 1 : 0;
                if (!ok) v.require(false, "plateau d=" + std::to_string(d) + " d'=" + std::to_string(dp));
            }
        }
    }
    v.detail << pairs << " pairs, max zero offset " << worst << ", plateaus " << plateaus << "/" << 6 * pairs;
    v.require(worst < wall_tol, "zero positions");
    return v;
}

Verdict number_theory() {
    using namespace quadring;
    Verdict v;
    std::vector<double> brute;
    for (std::int64_t n = 1; n <= 20; ++n) {
        std::set<RingElement> found;
        for (std::int64_t a = -n; a <= n; ++a)
            for (std::int64_t b = -n; b <= n; ++b)
                if (a * a + b * b == n * n) found.insert({a, b});
        if (found == std::set<RingElement>{{n, 0}, {-n, 0}, {0, n}, {0, -n}}) brute.push_back(static_cast<double>(n));
    }
    const auto distances = commensurate_distances(PlanarLattice::square, 20);
    v.detail << "square distances to 20: " << distances.size() << " (brute force " << brute.size() << ")";
    v.require(distances == brute, "commensurate distances");

    int inert = 0;
    int shells = 0;
    for (const std::int64_t d : {1, 2, 3, 5, 7, 11, 14, 23}) {
        const auto ring = make_ring(d);
        for (std::uint64_t p = 2; p < 200; ++p) {
            if (!is_prime(p)) continue;
            const auto n = static_cast<std::int64_t>(p);
            for (const std::int64_t norm : {n, n * n}) {
                const auto shell = shell_enumerate(ring, norm);
                std::set<RingElement> pts(shell.points.begin(), shell.points.end());
                ++shells;
                for (const auto z : shell.points) {
                    bool closed = pts.count(conjugate(ring, z)) == 1;
                    for (const auto u : units(ring)) closed = closed && pts.count(multiply(ring, u, z)) == 1;
                    if (!closed) v.require(false, "closure d=" + std::to_string(d) + " n=" + std::to_string(norm));
                }
            }
            if (classify_prime(ring, p) != PrimeBehavior::inert) continue;
            ++inert;
            v.require(!shell_enumerate(ring, n).represented, "inert prime represented");
            if (ring.ufd && p < 50) {
                v.require(shell_enumerate(ring, n * n).points.size() == unit_count(ring), "inert p^2 shell");
            }
        }
    }
    v.detail << "; " << inert << " inert primes, " << shells << " shells closed";

    const auto ring14 = make_ring(14);
    const auto shell = shell_enumerate(ring14, 225);
    const std::set<RingElement> pts(shell.points.begin(), shell.points.end());
    bool witnesses = true;
    for (const RingElement z : {RingElement{1, 4}, RingElement{1, -4}, RingElement{13, 2}, RingElement{13, -2}}) {
        witnesses = witnesses && pts.count(z) == 1;
    }
    v.detail << "; Z[sqrt-14] norm 225 has " << shell.points.size() << " points";
    v.require(witnesses, "1 +- 4 sqrt-14 and 13 +- 2 sqrt-14");
    v.require(!shell.isolated && !is_isolated_norm(ring14, 225), "norm 225 not isolated");
    return v;
}

// Real parameters drawn from the default widened by max(2, 2 |default|), clipped to the schema.
models::Params sample_params(const models::BlochModel& model, std::mt19937_64& rng) {
    auto out = model.defaults();
    for (std::size_t i = 0; i < model.schema.size(); ++i) {
        const auto& spec = model.schema[i];
        if (spec.integer) continue;
        const double width = std::max(2.0, 2.0 * std::abs(out[i]));
        const double lo = std::max(spec.lo, out[i] - width);
        const double hi = std::min(spec.hi, out[i] + width);
        out[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    return out;
}

Verdict unanimity() {
    Verdict v;
    int validated = 0;
    int scrambled = 0;
    int summed = 0;
    std::mt19937_64 rng(2024);
    for (const auto& name : models::model_names()) {
        const auto model = builtin_model(name);
        for (int accepted = 0, attempts = 0; accepted < 20;) {
            v.require(++attempts < 1000, name + " sampling");
            if (attempts >= 1000) break;
            const auto p = sample_params(model, rng);
            if (phasediag::minimum_gap(model, p).gap < sample_gap_floor) continue;
            ++accepted;
            try {
                if (model.bands == 2) {
                    (void)invariants::cross_validate(model, p);
                    ++validated;
                }
                int sum = 0;
                for (int band = 0; band < model.bands; ++band) {
                    const auto plain = invariants::chern_berry_lattice(model, p, band);
                    const auto gauge = invariants::chern_berry_lattice(model, p, band, {}, {.scramble_seed = 1000u + static_cast<std::uint64_t>(accepted)});
                    v.require(gauge.value == plain.value && std::abs(gauge.raw - plain.raw) < scramble_tol,
                              name + " gauge");
                    ++scrambled;
                    sum += plain.value;
                }
                v.require(sum == 0, name + " band sum");
                ++summed;
            } catch (const Error& e) {
                v.require(false, name + ": " + e.what());
            }
        }
    }
    v.detail << validated << " cross-validated points, " << scrambled << " gauge scrambles, " << summed
             << " band sums";
    return v;
}

Verdict pre_dirac() {
    Verdict v;
    const auto model = builtin_model("haldane_n");
    v.detail << "counts";
    for (const int n : {2, 3, 4}) {
        const auto count = models::pre_dirac_points(model, model.resolve({{"N", n}})).size();
        v.detail << ' ' << count;
        v.require(count == static_cast<std::size_t>(2 * n * n), "N=" + std::to_string(n));
    }
    return v;
}

Verdict fan() {
    Verdict v;
    const phasediag::FanDiagram diagram{{0, 1, 2}};
    const auto report = phasediag::verify_realization(diagram, phasediag::fan_family(diagram));
    v.detail << "measured";
    for (const auto& m : report.measured) v.detail << ' ' << (m ? std::to_string(*m) : "?");
    v.detail << ", off-ray min |F| = " << report.off_ray_min_norm << ", degenerate off-ray samples "
             << report.degenerate_angles.size();
    v.require(report.ok, "realization");
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"haldane phase probes", haldane_probes},
        {"haldane boundary constant", haldane_boundary},
        {"third-neighbour haldane", third_neighbour},
        {"bhz square", bhz_square},
        {"scaling law", scaling_law},
        {"triangular", triangular_ratio},
        {"kagome", kagome},
        {"mb dirac table", mb_dirac},
        {"rose and wall suite", rose_wall},
        {"number theory", number_theory},
        {"engine unanimity", unanimity},
        {"pre-dirac scaling", pre_dirac},
        {"fan realization", fan},
    };
    std::cout.precision(17);
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [title, check] = criteria[i];
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << "threw: " << e.what();
        }
        failures += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS " : "FAIL ") << i + 1 << " " << title << ": " << v.detail.str() << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
