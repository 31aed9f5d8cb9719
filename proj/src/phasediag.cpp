#include "chern/phasediag.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>

#include "parallel.hpp"

namespace chern::phasediag {

namespace {

using models::BlochModel;
using models::Params;
using Cplx = std::complex<double>;

constexpr double pi = std::numbers::pi;
constexpr double golden = 0.6180339887498949;

double gap_at(const BlochModel& model, const Params& params, KPoint k, const GapOptions& options) {
    if (options.scope == GapScope::band || model.bands == 2) return models::gap(model, params, k, options.band);
    const Eigen::VectorXd e = models::spectrum(models::assemble(model, params, k));
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < e.size(); ++i) best = std::min(best, e(i + 1) - e(i));
    return best;
}

// Pattern search in fractional coordinates along the axes and diagonals,
// halving the step whenever no direction improves.
GapMinimum compass(const BlochModel& model, const Params& params, Vec2 start, double step,
                   const GapOptions& options) {
    static constexpr Vec2 directions[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    Vec2 at = start;
    double best = gap_at(model, params, model.zone.at(at.x, at.y), options);
    while (step > 1e-14 && best > 0.0) {
        bool moved = false;
        for (const Vec2 dir : directions) {
            const Vec2 trial = at + step * dir;
            const double value = gap_at(model, params, model.zone.at(trial.x, trial.y), options);
            if (value < best) {
                best = value;
                at = trial;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    return {best, model.zone.at(at.x, at.y)};
}

template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
    double a = lo;
    double b = hi;
    double x1 = b - golden * (b - a);
    double x2 = a + golden * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

std::optional<std::string> label_of(const Cell& cell) {
    if (cell.chern) return std::to_string(*cell.chern);
    if (cell.degenerate) return "DEG";
    return std::nullopt;
}

int compute_chern(const BlochModel& model, const Params& params, const ScanOptions& options) {
    using invariants::Method;
    switch (options.method) {
        case Method::berry_lattice:
            return invariants::chern_berry_lattice(model, params, options.band, options.chern_grid).value;
        case Method::degree_integral:
            return invariants::degree_integral(model, params, options.chern_grid).value;
        case Method::degree_ray:
            return invariants::degree_ray(model, params).value;
    }
    return 0;
}

Cplx unit(double angle) { return std::polar(1.0, angle); }

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * pi);
    return a < 0.0 ? a + 2.0 * pi : a;
}

}  // namespace

GapMinimum minimum_gap(const BlochModel& model, const Params& params, const GapOptions& options) {
    const int nx = options.grid.nx;
    const int ny = options.grid.ny;
    if (nx < 2 || ny < 2) throw ConfigError("InvalidArgument", "gap grid must be at least 2x2");
    std::vector<double> grid(static_cast<std::size_t>(nx) * ny);
    detail::parallel_for(grid.size(), [&](std::size_t idx) {
        const double s = static_cast<double>(idx % nx) / nx;
        const double t = static_cast<double>(idx / nx) / ny;
        grid[idx] = gap_at(model, params, model.zone.at(s, t), options);
    });
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto starts = std::min<std::size_t>(std::max(options.refine_starts, 1), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                      [&](std::size_t a, std::size_t b) { return grid[a] < grid[b] || (grid[a] == grid[b] && a < b); });

    GapMinimum best{std::numeric_limits<double>::infinity(), {}};
    for (std::size_t i = 0; i < starts; ++i) {
        const std::size_t idx = order[i];
        const Vec2 start{static_cast<double>(idx % nx) / nx, static_cast<double>(idx / nx) / ny};
        const auto found = compass(model, params, start, 1.0 / std::max(nx, ny), options);
        if (found.gap < best.gap) best = found;
    }
    return best;
}

double Axis::value(int i) const {
    if (points < 2) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / (points - 1);
}

std::size_t PhaseDiagram::index(int i, int j) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(axes.front().points);
}

Critical locate_gap_closing(const BlochModel& model, const Params& base, const std::string& param, double lo,
                            double hi, const GapOptions& gap, double tol) {
    if (!model.has_param(param)) throw ConfigError("UnknownParameter", "model " + model.name + " has no parameter " + param);
    if (!(lo < hi)) throw ConfigError("InvalidArgument", "empty search interval for " + param);
    const std::size_t slot = model.index_of(param);
    auto profile = [&](double value) {
        Params p = base;
        p[slot] = value;
        return minimum_gap(model, p, gap).gap;
    };
    const double where = golden_section(profile, lo, hi, tol);
    return {where, profile(where)};
}

PhaseDiagram scan(const BlochModel& model, const Params& base, const std::vector<Axis>& axes,
                  const ScanOptions& options) {
    if (axes.empty() || axes.size() > 2) throw ConfigError("InvalidArgument", "a scan takes one or two axes");
    std::vector<std::size_t> slots;
    for (const auto& axis : axes) {
        if (!model.has_param(axis.name)) {
            throw ConfigError("UnknownParameter", "model " + model.name + " has no parameter " + axis.name);
        }
        if (axis.points < 2) throw ConfigError("InvalidArgument", "axis " + axis.name + " needs at least 2 points");
        if (!std::isfinite(axis.lo) || !std::isfinite(axis.hi)) {
            throw ConfigError("InvalidArgument", "axis " + axis.name + " has a non-finite bound");
        }
        slots.push_back(model.index_of(axis.name));
    }
    if (slots.size() == 2 && slots[0] == slots[1]) throw ConfigError("InvalidArgument", "both axes name " + axes[0].name);

    PhaseDiagram out;
    out.model = model.name;
    out.axes = axes;
    const int n0 = axes[0].points;
    const int n1 = axes.size() > 1 ? axes[1].points : 1;
    out.cells.resize(static_cast<std::size_t>(n0) * n1);
    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            Cell& cell = out.cells[out.index(i, j)];
            cell.params = base;
            cell.coords.push_back(axes[0].value(i));
            if (axes.size() > 1) cell.coords.push_back(axes[1].value(j));
            for (std::size_t a = 0; a < slots.size(); ++a) cell.params[slots[a]] = cell.coords[a];
            cell.params = model.resolve(model.named(cell.params));
        }
    }

    GapOptions gap = options.gap;
    gap.band = options.band;
    detail::parallel_for(out.cells.size(), [&](std::size_t idx) {
        Cell& cell = out.cells[idx];
        try {
            const auto found = minimum_gap(model, cell.params, gap);
            cell.min_gap = found.gap;
            cell.min_gap_at = found.k;
            cell.degenerate = found.gap < options.threshold;
            if (!cell.degenerate) cell.chern = compute_chern(model, cell.params, options);
        } catch (const Error& e) {
            cell.error = e.kind() + ": " + e.what();
        }
    });
    for (std::size_t idx = 0; idx < out.cells.size(); ++idx) {
        if (!out.cells[idx].error.empty()) out.errors.push_back("cell " + std::to_string(idx) + ": " + out.cells[idx].error);
    }

    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            const std::size_t from = out.index(i, j);
            if (i + 1 < n0) out.boundaries.push_back({from, out.index(i + 1, j), 0, 0.0, 0.0});
            if (j + 1 < n1) out.boundaries.push_back({from, out.index(i, j + 1), 1, 0.0, 0.0});
        }
    }
    std::erase_if(out.boundaries, [&](const Boundary& b) {
        const auto x = label_of(out.cells[b.from]);
        const auto y = label_of(out.cells[b.to]);
        return !x || !y || *x == *y;
    });
    detail::parallel_for(out.boundaries.size(), [&](std::size_t idx) {
        Boundary& b = out.boundaries[idx];
        const Cell& from = out.cells[b.from];
        const Cell& to = out.cells[b.to];
        const auto axis = static_cast<std::size_t>(b.axis);
        if (!options.locate_boundaries) {
            b.location = 0.5 * (from.coords[axis] + to.coords[axis]);
            b.gap = std::min(from.min_gap, to.min_gap);
            return;
        }
        const auto found = locate_gap_closing(model, from.params, axes[axis].name, from.coords[axis],
                                              to.coords[axis], gap, options.boundary_tol);
        b.location = found.location;
        b.gap = found.gap;
    });

    if (axes.size() == 1) {
        std::vector<int> minima;
        for (int i = 0; i < n0; ++i) {
            const double g = out.cells[i].min_gap;
            const bool left = i == 0 || g <= out.cells[i - 1].min_gap;
            const bool right = i + 1 == n0 || g <= out.cells[i + 1].min_gap;
            if (left && right) minima.push_back(i);
        }
        std::vector<Critical> found(minima.size());
        detail::parallel_for(minima.size(), [&](std::size_t m) {
            const int i = minima[m];
            const double lo = axes[0].value(std::max(i - 1, 0));
            const double hi = axes[0].value(std::min(i + 1, n0 - 1));
            found[m] = locate_gap_closing(model, out.cells[i].params, axes[0].name, std::min(lo, hi),
                                          std::max(lo, hi), gap, options.boundary_tol);
        });
        const double spacing = std::abs(axes[0].hi - axes[0].lo) / (n0 - 1);
        for (const auto& c : found) {
            if (c.gap >= options.threshold) continue;
            const bool seen = std::any_of(out.criticals.begin(), out.criticals.end(), [&](const Critical& o) {
                return std::abs(o.location - c.location) < 1e-3 * spacing;
            });
            if (!seen) out.criticals.push_back(c);
        }
        std::sort(out.criticals.begin(), out.criticals.end(),
                  [](const Critical& a, const Critical& b) { return a.location < b.location; });
    }
    return out;
}

Vec3 suspension(int d, double phi, double theta) {
    return {std::sin(theta) * std::cos(d * phi), std::sin(theta) * std::sin(d * phi), std::cos(theta)};
}

Vec3 WallFamily::operator()(double t, double phi, double theta) const {
    return (1.0 - t) * suspension(d, phi, theta) + t * suspension(dprime, phi, theta);
}

Vec2 WallFamily::equator(double t, double phi) const {
    const Cplx g = (1.0 - t) * unit(d * phi) + t * unit(dprime * phi);
    return {g.real(), g.imag()};
}

WallFamily wall_family(int d, int dprime) { return {d, dprime}; }

std::vector<double> wall_zeros(int d, int dprime) {
    if (d == dprime) throw ConfigError("NoWall", "d = d' = " + std::to_string(d) + " has no wall");
    const int delta = std::abs(d - dprime);
    std::vector<double> zeros;
    for (int j = 0; j < delta; ++j) zeros.push_back((2 * j + 1) * pi / delta);
    return zeros;
}

std::vector<WallSample> wall_trace(int d, int dprime, int t_samples, int phi_samples) {
    if (t_samples < 2 || phi_samples < 1) throw ConfigError("InvalidArgument", "wall trace needs at least 2 t samples");
    std::vector<double> angles;
    for (int i = 0; i < phi_samples; ++i) angles.push_back(2.0 * pi * i / phi_samples);
    if (d != dprime) {
        const auto zeros = wall_zeros(d, dprime);
        angles.insert(angles.end(), zeros.begin(), zeros.end());
    }
    const auto family = wall_family(d, dprime);
    std::vector<WallSample> out(static_cast<std::size_t>(t_samples));
    detail::parallel_for(out.size(), [&](std::size_t i) {
        const double t = static_cast<double>(i) / (t_samples - 1);
        double best = std::numeric_limits<double>::infinity();
        for (const double phi : angles) best = std::min(best, norm(family.equator(t, phi)));
        out[i] = {t, best};
    });
    return out;
}

int dirac_count(int d, int dprime) { return std::abs(d - dprime); }

int rose_sample_count(int d, int dprime, double t, int requested) {
    constexpr int cap = 1 << 21;
    int n = std::max(requested, 16 * (std::abs(d) + std::abs(dprime) + 1));
    if (std::abs(t - 0.5) < 1e-12 || n >= cap) return std::min(n, cap);
    // Double until no pair of adjacent samples subtends 0.1 rad or more.
    const auto family = wall_family(d, dprime);
    for (; n < cap; n *= 2) {
        double widest = 0.0;
        Vec2 prev = family.equator(t, 0.0);
        for (int i = 1; i <= n; ++i) {
            const Vec2 next = family.equator(t, 2.0 * pi * i / n);
            widest = std::max(widest, std::abs(std::atan2(cross(prev, next), dot(prev, next))));
            prev = next;
        }
        if (widest < 0.1) break;
    }
    return std::min(n, cap);
}

RoseCurve rose_curve(int d, int dprime, double t, int nsamples) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("InvalidArgument", "t must lie in [0, 1]");
    RoseCurve out{d, dprime, t, {}, std::nullopt, 0.0};
    const int n = rose_sample_count(d, dprime, t, nsamples);
    const auto family = wall_family(d, dprime);
    out.samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.samples.push_back(family.equator(t, 2.0 * pi * i / n));
    if (d + dprime != 0) {
        const int r = std::abs(d - dprime);
        const int s = std::abs(d + dprime);
        out.k_rose = static_cast<double>(r) / s;
        const int g = std::gcd(r, s);
        const int rr = r / g;
        const int ss = s / g;
        out.polar_period = (rr % 2 == 1 && ss % 2 == 1) ? ss : 2.0 * ss;
    }
    return out;
}

double polar_deviation(const RoseCurve& curve) {
    if (std::abs(curve.t - 0.5) > 1e-15) throw ConfigError("InvalidArgument", "the polar identity holds at t = 1/2");
    if (!curve.k_rose) throw ConfigError("RoseUndefined", "d = -d' collapses the rose");
    const double k = static_cast<double>(curve.d - curve.dprime) / (curve.d + curve.dprime);
    const auto n = curve.samples.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 g = curve.samples[i];
        if (norm(g) < 1e-6) continue;
        const double phi = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        const double theta = 0.5 * (curve.d + curve.dprime) * phi;
        const double r = std::cos(k * theta);
        worst = std::max(worst, norm(g - Vec2{r * std::cos(theta), r * std::sin(theta)}));
    }
    return worst;
}

namespace {

struct Blend {
    int left = 0;   // label with weight a1
    int right = 0;  // label with weight a2
    double a1 = 0.0;
    double a2 = 0.0;
};

// Chamber i (1-based) lies between the rays zeta_k^(i-1) and zeta_k^i. The
// sector around ray zeta_k^i, between the dual rays zeta_2k^(2i-1) and
// zeta_2k^(2i+1), blends labels d_i and d_(i+1).
Blend blend_at(const FanDiagram& fan, Vec2 p) {
    const int k = fan.k();
    const double r = norm(p);
    if (r == 0.0) return {fan.labels[0], fan.labels[0], 0.0, 0.0};
    const double width = 2.0 * pi / k;
    const double alpha = wrap_angle(std::atan2(p.y, p.x));
    // Sector i covers [(2i-1) pi / k, (2i+1) pi / k).
    int i = static_cast<int>(std::floor((alpha + 0.5 * width) / width));
    const double lo = (2 * i - 1) * pi / k;
    i = ((i - 1) % k + k) % k + 1;
    Blend out{fan.labels[i - 1], fan.labels[i % k], 0.0, 0.0};
    if (k >= 3) {
        const Vec2 u{std::cos(lo), std::sin(lo)};
        const Vec2 v{std::cos(lo + width), std::sin(lo + width)};
        const double det = cross(u, v);
        out.a1 = cross(p, v) / det;
        out.a2 = cross(u, p) / det;
    } else {
        const double s = std::clamp((alpha - lo) / width, 0.0, 1.0);
        out.a1 = r * (1.0 - s);
        out.a2 = r * s;
    }
    return out;
}

}  // namespace

Vec3 FanFamily::operator()(Vec2 p, double phi, double theta) const {
    const auto b = blend_at(fan, p);
    return b.a1 * suspension(b.left, phi, theta) + b.a2 * suspension(b.right, phi, theta);
}

std::array<Vec3, 3> FanFamily::jet(Vec2 p, double phi, double theta) const {
    const auto b = blend_at(fan, p);
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    std::array<Vec3, 3> out{};
    for (const auto& [weight, d] : {std::pair{b.a1, b.left}, std::pair{b.a2, b.right}}) {
        const double c = std::cos(d * phi);
        const double s = std::sin(d * phi);
        out[0] = out[0] + weight * Vec3{st * c, st * s, ct};
        out[1] = out[1] + weight * Vec3{ct * c, ct * s, -st};
        out[2] = out[2] + weight * Vec3{-d * st * s, d * st * c, 0.0};
    }
    return out;
}

FanFamily fan_family(const FanDiagram& fan) {
    if (fan.labels.empty()) throw ConfigError("InvalidArgument", "a fan needs at least one ray");
    return {fan};
}

double sphere_degree(const FanFamily& family, Vec2 p, int n_theta, int n_phi) {
    const double dt = pi / n_theta;
    const double dp = 2.0 * pi / n_phi;
    std::vector<double> rows(static_cast<std::size_t>(n_theta));
    detail::parallel_for(rows.size(), [&](std::size_t i) {
        const double theta = (static_cast<double>(i) + 0.5) * dt;
        double sum = 0.0;
        for (int j = 0; j < n_phi; ++j) {
            const double phi = (j + 0.5) * dp;
            const auto [f, f_theta, f_phi] = family.jet(p, phi, theta);
            const double r = norm(f);
            if (r == 0.0) {
                throw NumericError("DegenerateFamily", "fan map vanishes on the sphere");
            }
            sum += dot(f, cross(f_theta, f_phi)) / (r * r * r);
        }
        rows[i] = sum;
    });
    return std::accumulate(rows.begin(), rows.end(), 0.0) * dt * dp / (4.0 * pi);
}

namespace {

// Minimum of |F(p, .)| over the sphere. Sampled on a (theta, phi) grid that
// contains the equator and the predicted zeros of every wall.
double sphere_min_norm(const FanFamily& family, Vec2 p) {
    std::vector<double> angles;
    constexpr int n_phi = 1024;
    for (int j = 0; j < n_phi; ++j) angles.push_back(2.0 * pi * j / n_phi);
    const auto b = blend_at(family.fan, p);
    if (b.left != b.right) {
        const auto zeros = wall_zeros(b.left, b.right);
        angles.insert(angles.end(), zeros.begin(), zeros.end());
    }
    constexpr int n_theta = 33;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_theta; ++i) {
        const double theta = pi * i / (n_theta - 1);
        for (const double phi : angles) best = std::min(best, norm(family(p, phi, theta)));
    }
    return best;
}

}  // namespace

RealizationReport verify_realization(const FanDiagram& fan, const FanFamily& family, double probe_radius,
                                     double tolerance) {
    if (!(probe_radius > 0.0)) throw ConfigError("InvalidArgument", "probe radius must be positive");
    const int k = fan.k();
    if (k == 0) throw ConfigError("InvalidArgument", "a fan needs at least one ray");
    RealizationReport out;
    out.expected = fan.labels;
    out.ok = true;
    const double width = 2.0 * pi / k;

    for (int i = 1; i <= k; ++i) {
        // Probe on the chamber bisector, with a quarter-chamber check on either
        // side to exercise the blend.
        std::optional<int> measured;
        bool consistent = true;
        for (const double offset : {0.5, 0.25, 0.75}) {
            const double alpha = (i - 1 + offset) * width;
            const Vec2 p = probe_radius * Vec2{std::cos(alpha), std::sin(alpha)};
            if (sphere_min_norm(family, p) < tolerance) {
                consistent = false;
                break;
            }
            const double raw = sphere_degree(family, p);
            const int value = static_cast<int>(std::lround(raw));
            if (std::abs(raw - value) > 0.02 || (measured && *measured != value)) {
                consistent = false;
                break;
            }
            if (!measured) measured = value;
        }
        out.measured.push_back(consistent ? measured : std::nullopt);
        if (!consistent || measured != fan.labels[static_cast<std::size_t>(i - 1)]) out.ok = false;
    }

    for (int i = 1; i <= k; ++i) {
        const double alpha = i * width;
        const Vec2 p = probe_radius * Vec2{std::cos(alpha), std::sin(alpha)};
        const double m = sphere_min_norm(family, p);
        out.ray_min_norm.push_back(m);
        const bool degenerate = m < tolerance;
        out.ray_degenerate.push_back(degenerate);
        const bool wall = fan.labels[static_cast<std::size_t>(i - 1)] != fan.labels[static_cast<std::size_t>(i % k)];
        if (degenerate != wall) out.ok = false;
    }

    constexpr int directions = 360;
    std::vector<double> norms(directions);
    detail::parallel_for(norms.size(), [&](std::size_t j) {
        const double alpha = 2.0 * pi * (static_cast<double>(j) + 0.5) / directions;
        norms[j] = sphere_min_norm(family, probe_radius * Vec2{std::cos(alpha), std::sin(alpha)});
    });
    out.off_ray_min_norm = *std::min_element(norms.begin(), norms.end());
    for (int j = 0; j < directions; ++j) {
        if (norms[static_cast<std::size_t>(j)] < tolerance) out.degenerate_angles.push_back(2.0 * pi * (j + 0.5) / directions);
    }
    if (!out.degenerate_angles.empty()) out.ok = false;
    return out;
}

}  // namespace chern::phasediag
