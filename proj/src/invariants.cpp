#include "chern/invariants.hpp"

#include <chrono>
#include <limits>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "parallel.hpp"

namespace chern::invariants {

using models::BlochModel;
using models::Params;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string format_k(KPoint k) {
    std::ostringstream out;
    out.precision(17);
    out << "(" << k.x << ", " << k.y << ")";
    return out.str();
}

void check_grid(GridSize grid) {
    if (grid.nx < 2 || grid.ny < 2) throw ConfigError("InvalidArgument", "grid must be at least 2x2");
}

void require_two_band(const BlochModel& model, const char* engine) {
    if (model.bands != 2 || model.basis != models::Basis::pauli) {
        throw MethodInapplicable(std::string(engine) + " needs a two-band Pauli model; '" + model.name + "' has " +
                                 std::to_string(model.bands) + " bands");
    }
}

void round_result(ChernResult& r) {
    r.value = static_cast<int>(std::lround(r.raw));
    r.residual = std::abs(r.raw - r.value);
    if (!(r.residual < 0.5)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << to_string(r.method) << " raw value " << r.raw << " on a " << r.grid.nx << "x" << r.grid.ny
            << " grid does not round unambiguously; refine the grid";
        throw ResolutionError(r.raw, msg.str());
    }
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::berry_lattice: return "berry_lattice";
        case Method::degree_integral: return "degree_integral";
        case Method::degree_ray: return "degree_ray";
    }
    return "unknown";
}

DegenerateFamily::DegenerateFamily(KPoint at, double g, const std::string& detail)
    : NumericError("DegenerateFamily", detail), k(at), gap(g) {}

ResolutionError::ResolutionError(double r, const std::string& detail)
    : NumericError("Resolution", detail), raw(r) {}

MethodInapplicable::MethodInapplicable(const std::string& detail) : NumericError("MethodInapplicable", detail) {}

RaySelectionError::RaySelectionError(const std::string& detail) : NumericError("RaySelection", detail) {}

EngineDisagreement::EngineDisagreement(CrossValidation r)
    : NumericError("EngineDisagreement", "Chern engines disagree"), report(std::move(r)) {}

ChernResult chern_berry_lattice(const BlochModel& model, const Params& params, int band, GridSize grid,
                                const BerryOptions& options) {
    check_grid(grid);
    if (band < 0 || band >= model.bands) {
        throw ConfigError("InvalidArgument", "band " + std::to_string(band) + " does not exist");
    }
    const int nx = grid.nx;
    const int ny = grid.ny;
    const auto& zone = model.zone;
    std::vector<Eigen::VectorXcd> states(static_cast<std::size_t>(nx) * ny);
    std::vector<double> gaps(states.size());

    detail::parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
        for (int i = 0; i < nx; ++i) {
            const KPoint k = zone.at(static_cast<double>(i) / nx, static_cast<double>(j) / ny);
            const auto es = models::eigensystem(model, params, k);
            double g = std::numeric_limits<double>::infinity();
            if (band + 1 < model.bands) g = std::min(g, es.values(band + 1) - es.values(band));
            if (band > 0) g = std::min(g, es.values(band) - es.values(band - 1));
            const std::size_t at = j * nx + i;
            gaps[at] = g;
            states[at] = es.vectors.col(band);
        }
    });

    ChernResult r;
    r.method = Method::berry_lattice;
    r.grid = grid;
    r.band = band;
    r.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t at = 0; at < gaps.size(); ++at) {
        r.min_gap = std::min(r.min_gap, gaps[at]);
        if (gaps[at] <= options.gap_floor) {
            const KPoint k = zone.at(static_cast<double>(at % nx) / nx, static_cast<double>(at / nx) / ny);
            std::ostringstream msg;
            msg.precision(17);
            msg << "band " << band << " touches a neighbour (gap " << gaps[at] << ") at k = " << format_k(k);
            throw DegenerateFamily(k, gaps[at], msg.str());
        }
    }

    if (options.scramble_seed) {
        std::mt19937_64 rng(*options.scramble_seed);
        std::uniform_real_distribution<double> phase(0.0, two_pi);
        for (auto& u : states) u *= std::polar(1.0, phase(rng));
    }

    const auto state = [&](int i, int j) -> const Eigen::VectorXcd& {
        return states[static_cast<std::size_t>((j % ny) * nx + (i % nx))];
    };
    std::vector<double> row_flux(static_cast<std::size_t>(ny));
    detail::parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jj) {
        const int j = static_cast<int>(jj);
        double sum = 0.0;
        for (int i = 0; i < nx; ++i) {
            const auto u1 = state(i, j).dot(state(i + 1, j));
            const auto u2 = state(i + 1, j).dot(state(i + 1, j + 1));
            const auto u3 = state(i + 1, j + 1).dot(state(i, j + 1));
            const auto u4 = state(i, j + 1).dot(state(i, j));
            sum += std::arg(u1 * u2 * u3 * u4);
        }
        row_flux[jj] = sum;
    });
    double flux = 0.0;
    for (double f : row_flux) flux += f;
    r.raw = -zone.orientation() * flux / two_pi;
    round_result(r);
    return r;
}

namespace {

struct IntegralPass {
    double raw = 0.0;
    double min_norm = 0.0;
    KPoint min_at;
};

IntegralPass integrate_degree(const BlochModel& model, const Params& params, GridSize grid, bool fd) {
    const int nx = grid.nx;
    const int ny = grid.ny;
    const auto& zone = model.zone;
    std::vector<double> row_sum(static_cast<std::size_t>(ny));
    std::vector<double> row_min(static_cast<std::size_t>(ny));
    std::vector<KPoint> row_min_at(static_cast<std::size_t>(ny));
    detail::parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jj) {
        const double t = (static_cast<double>(jj) + 0.5) / ny;
        double sum = 0.0;
        double lowest = std::numeric_limits<double>::infinity();
        KPoint lowest_at;
        for (int i = 0; i < nx; ++i) {
            const double s = (i + 0.5) / nx;
            const KPoint k = zone.at(s, t);
            Vec3 h;
            double density;
            if (fd) {
                const double ds = 1.0 / nx;
                const double dt = 1.0 / ny;
                const auto at = [&](double ss, double tt) { return models::eval_field(model, params, zone.at(ss, tt)).pauli(); };
                h = at(s, t);
                const Vec3 hs = (1.0 / (2 * ds)) * (at(s + ds, t) - at(s - ds, t));
                const Vec3 ht = (1.0 / (2 * dt)) * (at(s, t + dt) - at(s, t - dt));
                const double n = norm(h);
                density = zone.orientation() * dot(h, cross(hs, ht)) / (n * n * n) / (static_cast<double>(nx) * ny);
            } else {
                const auto jet = models::eval_jet(model, params, k);
                h = jet.value;
                const double n = norm(h);
                density = dot(h, cross(jet.d_kx, jet.d_ky)) / (n * n * n) * zone.area() /
                          (static_cast<double>(nx) * ny);
            }
            sum += density;
            const double n = norm(h);
            if (n < lowest) {
                lowest = n;
                lowest_at = k;
            }
        }
        row_sum[jj] = sum;
        row_min[jj] = lowest;
        row_min_at[jj] = lowest_at;
    });
    IntegralPass pass;
    pass.min_norm = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < row_sum.size(); ++j) {
        pass.raw += row_sum[j];
        if (row_min[j] < pass.min_norm) {
            pass.min_norm = row_min[j];
            pass.min_at = row_min_at[j];
        }
    }
    pass.raw /= 4.0 * std::numbers::pi;
    return pass;
}

}  // namespace

ChernResult degree_integral(const BlochModel& model, const Params& params, GridSize grid,
                            const IntegralOptions& options) {
    check_grid(grid);
    require_two_band(model, "degree_integral");
    const bool fd = options.finite_differences || !model.jet;
    ChernResult r;
    r.method = Method::degree_integral;
    r.grid = grid;
    r.analytic_derivatives = !fd;

    const auto full = integrate_degree(model, params, grid, fd);
    if (2.0 * full.min_norm <= options.gap_floor) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "|h| = " << full.min_norm << " at k = " << format_k(full.min_at) << "; the family is degenerate";
        throw DegenerateFamily(full.min_at, 2.0 * full.min_norm, msg.str());
    }
    if (grid.nx >= 4 && grid.ny >= 4) {
        const GridSize half{grid.nx / 2, grid.ny / 2};
        r.history.push_back({half, integrate_degree(model, params, half, fd).raw});
    }
    r.history.push_back({grid, full.raw});
    r.raw = full.raw;
    r.min_field_norm = full.min_norm;
    round_result(r);
    return r;
}

namespace {

Vec3 perturbed_ray(Vec3 ray, int attempt) {
    if (attempt == 0) return ray;
    const Vec3 n = normalized(ray);
    const Vec3 pick = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = normalized(cross(cross(n, pick), n));
    const Vec3 e2 = cross(n, e1);
    const double tilt = 1e-3 * attempt;
    const double azimuth = attempt * std::numbers::pi * (3.0 - std::sqrt(5.0));
    return normalized(std::cos(tilt) * n + std::sin(tilt) * (std::cos(azimuth) * e1 + std::sin(azimuth) * e2));
}

}  // namespace

ChernResult degree_ray(const BlochModel& model, const Params& params, const RayOptions& options) {
    require_two_band(model, "degree_ray");
    if (!(norm(options.ray) > 0.0)) throw ConfigError("InvalidArgument", "ray must be a nonzero vector");
    std::string last_problem;
    bool only_degenerate = true;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        const Vec3 ray = perturbed_ray(options.ray, attempt);
        const auto points = models::pre_dirac_points(model, params, {options.seed_density, options.tol, ray});
        ChernResult r;
        r.method = Method::degree_ray;
        r.grid = {options.seed_density, options.seed_density};
        r.ray = ray;
        r.ray_attempts = attempt + 1;
        bool degenerate = false;
        int count = 0;
        int signed_sum = 0;
        for (const auto& p : points) {
            if (std::abs(2.0 * p.height) <= options.gap_floor) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "the field vanishes at the pre-image k = " << format_k(p.k);
                throw DegenerateFamily(p.k, std::abs(2.0 * p.height), msg.str());
            }
            if (p.degenerate) {
                degenerate = true;
                last_problem = "singular Jacobian at pre-image k = " + format_k(p.k);
                break;
            }
            r.contributions.push_back({p.k, p.jacobian_sign, p.height});
            if (p.height > 0) count += p.jacobian_sign;
            signed_sum += p.jacobian_sign * (p.height > 0 ? 1 : -1);
        }
        if (degenerate) continue;
        r.half_sum = 0.5 * signed_sum;
        if (r.half_sum != static_cast<double>(count)) {
            only_degenerate = false;
            std::ostringstream msg;
            msg << "ray count " << count << " differs from the half-sum " << r.half_sum;
            last_problem = msg.str();
            continue;
        }
        r.raw = count;
        round_result(r);
        return r;
    }
    const std::string detail = "no admissible ray after " + std::to_string(options.max_retries) +
                               " perturbations: " + last_problem;
    if (only_degenerate) throw MethodInapplicable(detail);
    throw RaySelectionError(detail);
}

int winding_number(const PlanarCurve& curve, Vec2 origin) {
    const auto& pts = curve.points;
    if (pts.size() < 3) throw ConfigError("InvalidArgument", "a closed curve needs at least three samples");
    if (!curve.closed) throw ConfigError("InvalidArgument", "winding number needs a closed curve");
    for (const auto& p : pts) {
        if (norm(p - origin) <= 1e-12) throw NumericError("OriginOnCurve", "the curve passes through the origin");
    }
    double total = 0.0;
    const std::size_t n = pts.size();
    const bool repeats_start = norm(pts.front() - pts.back()) <= 1e-9;
    const std::size_t segments = repeats_start ? n - 1 : n;
    for (std::size_t i = 0; i < segments; ++i) {
        const Vec2 a = pts[i] - origin;
        const Vec2 b = pts[(i + 1) % n] - origin;
        const double step = std::atan2(cross(a, b), dot(a, b));
        if (std::abs(step) > std::numbers::pi - 1e-6) {
            throw NumericError("Resolution", "consecutive samples straddle the origin; resample the curve");
        }
        total += step;
    }
    return static_cast<int>(std::lround(total / two_pi));
}

CrossValidation cross_validate(const BlochModel& model, const Params& params, const CrossValidateOptions& options) {
    require_two_band(model, "cross_validate");
    CrossValidation report;
    const auto timed = [&](Method method, auto&& run) {
        EngineRun entry;
        entry.method = method;
        const auto start = std::chrono::steady_clock::now();
        try {
            entry.result = run();
        } catch (const MethodInapplicable& e) {
            entry.inapplicable = e.what();
        } catch (const RaySelectionError& e) {
            entry.inapplicable = e.what();
        }
        entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.runs.push_back(std::move(entry));
    };
    timed(Method::berry_lattice, [&] { return chern_berry_lattice(model, params, 0, options.berry_grid); });
    timed(Method::degree_integral, [&] {
        GridSize grid = options.integral_grid;
        for (;;) {
            const bool last = 2 * std::max(grid.nx, grid.ny) > options.integral_max_side;
            try {
                auto r = degree_integral(model, params, grid);
                if (r.residual < options.integral_tolerance || last) return r;
            } catch (const ResolutionError&) {
                if (last) throw;
            }
            grid = {2 * grid.nx, 2 * grid.ny};
        }
    });
    timed(Method::degree_ray, [&] { return degree_ray(model, params, options.ray); });

    std::optional<int> agreed;
    report.unanimous = true;
    for (const auto& run : report.runs) {
        if (!run.result) continue;
        if (!agreed) agreed = run.result->value;
        if (*agreed != run.result->value) report.unanimous = false;
    }
    report.value = agreed.value_or(0);
    if (!report.unanimous) throw EngineDisagreement(report);
    return report;
}

}  // namespace chern::invariants
