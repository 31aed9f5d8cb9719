#include "chern/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "chern/quadring.hpp"

namespace chern::models {

namespace {

std::string format_k(KPoint k) {
    std::ostringstream out;
    out.precision(17);
    out << "(" << k.x << ", " << k.y << ")";
    return out.str();
}

Vec3 frame_component(const FieldJet& jet, Vec3 e) { return {dot(jet.value, e), dot(jet.d_kx, e), dot(jet.d_ky, e)}; }

}  // namespace

Vec2 BrillouinZone::fractional(KPoint k) const {
    const double det = cross(g1, g2);
    return {cross(k, g2) / det, cross(g1, k) / det};
}

std::size_t BlochModel::index_of(std::string_view param) const {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].name == param) return i;
    }
    throw ConfigError("UnknownParameter", "model '" + name + "' has no parameter '" + std::string(param) + "'");
}

bool BlochModel::has_param(std::string_view param) const {
    return std::any_of(schema.begin(), schema.end(), [&](const ParamSpec& s) { return s.name == param; });
}

Params BlochModel::defaults() const {
    Params p;
    for (const auto& s : schema) p.push_back(s.default_value);
    return p;
}

Params BlochModel::resolve(const ParamMap& overrides) const {
    Params p = defaults();
    for (const auto& [key, value] : overrides) p[index_of(key)] = value;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& s = schema[i];
        const double v = p[i];
        if (!std::isfinite(v)) throw ConfigError("InvalidParameter", s.name + " must be finite");
        if (s.integer && v != std::round(v)) throw ConfigError("InvalidParameter", s.name + " must be an integer");
        if (v < s.lo || v > s.hi) {
            std::ostringstream msg;
            msg << s.name << " = " << v << " is outside [" << s.lo << ", " << s.hi << "]";
            throw ConfigError("InvalidParameter", msg.str());
        }
        if (s.name == "N" && v == 0.0) throw ConfigError("InvalidParameter", "N must be nonzero");
    }
    return p;
}

ParamMap BlochModel::named(const Params& params) const {
    ParamMap out;
    for (std::size_t i = 0; i < schema.size() && i < params.size(); ++i) out[schema[i].name] = params[i];
    return out;
}

namespace {

void check_params(const BlochModel& model, const Params& params) {
    if (params.size() != model.schema.size()) {
        throw ConfigError("InvalidParameter", "model '" + model.name + "' expects " +
                                                  std::to_string(model.schema.size()) + " parameters, got " +
                                                  std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (std::isnan(params[i])) throw ConfigError("InvalidParameter", model.schema[i].name + " is NaN");
    }
}

}  // namespace

FieldValue eval_field(const BlochModel& model, const Params& params, KPoint k) {
    check_params(model, params);
    if (!model.field) {
        throw NumericError("MethodInapplicable", "model '" + model.name + "' has no coefficient basis");
    }
    return model.field(params, k);
}

FieldJet eval_jet(const BlochModel& model, const Params& params, KPoint k) {
    check_params(model, params);
    if (model.basis != Basis::pauli) {
        throw NumericError("MethodInapplicable", "model '" + model.name + "' is not a two-band Pauli model");
    }
    if (model.jet) return model.jet(params, k);
    constexpr double step = 1e-5;
    const auto at = [&](double dx, double dy) { return model.field(params, {k.x + dx, k.y + dy}).pauli(); };
    return {at(0, 0), (1.0 / (2 * step)) * (at(step, 0) - at(-step, 0)),
            (1.0 / (2 * step)) * (at(0, step) - at(0, -step))};
}

Eigen::MatrixXcd assemble(const BlochModel& model, const Params& params, KPoint k) {
    check_params(model, params);
    if (model.matrix) return model.matrix(params, k);
    const auto f = model.field(params, k);
    using C = std::complex<double>;
    if (f.basis == Basis::pauli) {
        Eigen::MatrixXcd h(2, 2);
        h(0, 0) = f.h0 + f.h[2];
        h(1, 1) = f.h0 - f.h[2];
        h(0, 1) = C(f.h[0], -f.h[1]);
        h(1, 0) = C(f.h[0], f.h[1]);
        return h;
    }
    const double r3 = 1.0 / std::sqrt(3.0);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
    h(0, 1) = C(f.h[0], -f.h[1]);
    h(0, 2) = C(f.h[3], -f.h[4]);
    h(1, 2) = C(f.h[5], -f.h[6]);
    h(1, 0) = std::conj(h(0, 1));
    h(2, 0) = std::conj(h(0, 2));
    h(2, 1) = std::conj(h(1, 2));
    h(0, 0) = f.h0 + f.h[2] + f.h[7] * r3;
    h(1, 1) = f.h0 - f.h[2] + f.h[7] * r3;
    h(2, 2) = f.h0 - 2.0 * f.h[7] * r3;
    return h;
}

Eigen::VectorXd spectrum(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("EigenFailure", "eigensolver did not converge");
    return solver.eigenvalues();
}

Eigensystem eigensystem(const BlochModel& model, const Params& params, KPoint k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(assemble(model, params, k));
    if (solver.info() != Eigen::Success) {
        throw NumericError("EigenFailure", "eigensolver did not converge at k = " + format_k(k));
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double gap(const BlochModel& model, const Params& params, KPoint k, int band) {
    if (band < 0 || band > model.bands - 2) {
        throw ConfigError("InvalidArgument", "band index " + std::to_string(band) + " out of range for " +
                                                 std::to_string(model.bands) + " bands");
    }
    if (model.basis == Basis::pauli && !model.matrix) return 2.0 * norm(eval_field(model, params, k).pauli());
    Eigen::VectorXd e;
    try {
        e = spectrum(assemble(model, params, k));
    } catch (const NumericError&) {
        throw NumericError("EigenFailure", "eigensolver did not converge at k = " + format_k(k));
    }
    return e(band + 1) - e(band);
}

std::vector<PreDiracPoint> pre_dirac_points(const BlochModel& model, const Params& params,
                                            const PreDiracOptions& options) {
    if (model.basis != Basis::pauli || model.bands != 2) {
        throw NumericError("MethodInapplicable", "pre-Dirac points need a two-band model");
    }
    if (options.seed_density < 1 || !(options.tol > 0.0)) {
        throw ConfigError("InvalidArgument", "seed density and tolerance must be positive");
    }
    const Vec3 e3 = normalized(options.axis);
    const Vec3 pick = std::abs(e3.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = normalized(cross(cross(e3, pick), e3));
    const Vec3 e2 = cross(e3, e1);
    const auto& zone = model.zone;
    const double max_step = 0.25 * std::min(norm(zone.g1), norm(zone.g2));

    struct Local {
        Vec2 f;
        double j11, j12, j21, j22;
        double height;
    };
    const auto local = [&](KPoint k) {
        const auto jet = eval_jet(model, params, k);
        const Vec3 a = frame_component(jet, e1);
        const Vec3 b = frame_component(jet, e2);
        return Local{{a.x, b.x}, a.y, a.z, b.y, b.z, dot(jet.value, e3)};
    };

    std::vector<PreDiracPoint> found;
    std::vector<Vec2> found_frac;
    const int n = options.seed_density;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            KPoint k = zone.at((i + 0.5) / n, (j + 0.5) / n);
            Local l = local(k);
            bool converged = norm(l.f) < options.tol;
            for (int iter = 0; iter < 80 && !converged; ++iter) {
                const double det = l.j11 * l.j22 - l.j12 * l.j21;
                if (det == 0.0) break;
                Vec2 step{-(l.j22 * l.f.x - l.j12 * l.f.y) / det, -(-l.j21 * l.f.x + l.j11 * l.f.y) / det};
                const double len = norm(step);
                if (len > max_step) step = (max_step / len) * step;
                double alpha = 1.0;
                Local trial = local(k + step);
                for (int back = 0; back < 12 && norm(trial.f) >= norm(l.f); ++back) {
                    alpha *= 0.5;
                    trial = local(k + alpha * step);
                }
                if (norm(trial.f) >= norm(l.f)) break;
                k = k + alpha * step;
                l = trial;
                converged = norm(l.f) < options.tol;
            }
            if (!converged) continue;

            const double det = l.j11 * l.j22 - l.j12 * l.j21;
            // |det J| / |J|_F is within a factor sqrt 2 of the smallest singular value.
            const double frobenius = std::sqrt(l.j11 * l.j11 + l.j12 * l.j12 + l.j21 * l.j21 + l.j22 * l.j22);
            const bool degenerate = frobenius < 1e-12 || std::abs(det) / frobenius < 1e-4;
            Vec2 frac = zone.fractional(k);
            frac = {frac.x - std::floor(frac.x), frac.y - std::floor(frac.y)};
            const double merge = degenerate ? 1e-3 : 1e-6;
            bool duplicate = false;
            for (std::size_t q = 0; q < found.size() && !duplicate; ++q) {
                double dx = frac.x - found_frac[q].x;
                double dy = frac.y - found_frac[q].y;
                dx -= std::round(dx);
                dy -= std::round(dy);
                const double radius = found[q].degenerate ? std::max(merge, 1e-3) : merge;
                duplicate = std::hypot(dx, dy) < radius;
            }
            if (duplicate) continue;
            const int sign = degenerate ? 0 : (det > 0 ? 1 : -1);
            found.push_back({zone.at(frac.x, frac.y), sign, degenerate, l.height});
            found_frac.push_back(frac);
        }
    }
    std::vector<std::size_t> order(found.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(found_frac[a].x, found_frac[a].y) < std::pair(found_frac[b].x, found_frac[b].y);
    });
    std::vector<PreDiracPoint> out;
    for (auto i : order) out.push_back(found[i]);
    return out;
}

std::string to_string(ScaleVariant variant) { return variant == ScaleVariant::all ? "all" : "hopping_only"; }

ScaleVariant parse_scale_variant(std::string_view text) {
    if (text == "all") return ScaleVariant::all;
    if (text == "hopping_only") return ScaleVariant::hopping_only;
    throw ConfigError("InvalidArgument", "variant must be 'all' or 'hopping_only', got '" + std::string(text) + "'");
}

namespace {

std::string admissibility_problem(const std::string& lattice, int n) {
    using namespace quadring;
    if (lattice == "square") return shell_obstruction(PlanarLattice::square, n);
    if (lattice == "triangular") return shell_obstruction(PlanarLattice::triangular, n);
    if (lattice == "honeycomb") {
        if (honeycomb_admissible(n)) return {};
        const auto site = honeycomb_site_check(n);
        return site.reason.empty() ? shell_obstruction(PlanarLattice::triangular, n) : site.reason;
    }
    if (lattice == "kagome") {
        if (kagome_admissible(n)) return {};
        const auto site = kagome_site_check(n);
        return site.reason.empty() ? shell_obstruction(PlanarLattice::triangular, n) : site.reason;
    }
    return {};
}

}  // namespace

BlochModel scale_model(const BlochModel& model, int n, ScaleVariant variant, const ScaleOptions& options) {
    if (n == 0) throw ConfigError("InvalidArgument", "scale factor N must be nonzero");
    if (options.check_admissibility) {
        const auto problem = admissibility_problem(model.lattice, n);
        if (!problem.empty()) {
            throw ConfigError("InadmissibleScale", "N = " + std::to_string(n) + " is not admissible on the " +
                                                       model.lattice + " lattice: " + problem);
        }
    }
    if (variant == ScaleVariant::hopping_only) {
        if (model.hopping_family.empty() || model.scale != 1) {
            throw ConfigError("InvalidArgument", "model '" + model.name + "' has no nearest-neighbour-only rescaling");
        }
        BlochModel scaled = builtin_model(model.hopping_family);
        auto& spec = scaled.schema[scaled.index_of("N")];
        spec.default_value = spec.lo = spec.hi = n;
        return scaled;
    }
    BlochModel scaled = model;
    const double f = n;
    scaled.scale = model.scale * n;
    scaled.name = model.name + "*" + std::to_string(n);
    for (auto* vs : {&scaled.geometry.a, &scaled.geometry.b, &scaled.geometry.c})
        for (auto& v : *vs) v = f * v;
    if (model.field) {
        scaled.field = [inner = model.field, f](const Params& p, KPoint k) { return inner(p, f * k); };
    }
    if (model.orbital_field) {
        scaled.orbital_field = [inner = model.orbital_field, f](const Params& p, KPoint k) { return inner(p, f * k); };
    }
    if (model.jet) {
        scaled.jet = [inner = model.jet, f](const Params& p, KPoint k) {
            auto j = inner(p, f * k);
            j.d_kx = f * j.d_kx;
            j.d_ky = f * j.d_ky;
            return j;
        };
    }
    if (model.matrix) {
        scaled.matrix = [inner = model.matrix, f](const Params& p, KPoint k) { return inner(p, f * k); };
    }
    return scaled;
}

BlochModel fold_bands(const BlochModel& model, int n) {
    if (n <= 0) throw ConfigError("InvalidArgument", "fold factor must be positive");
    const double tau = 2.0 * std::acos(-1.0);
    const auto& z = model.zone;
    const bool square_zone = std::abs(z.g1.x - tau) < 1e-12 && std::abs(z.g1.y) < 1e-12 &&
                             std::abs(z.g2.x) < 1e-12 && std::abs(z.g2.y - tau) < 1e-12;
    if (!square_zone) throw ConfigError("InvalidArgument", "band folding needs the square zone");
    if (n == 1) return model;
    BlochModel folded = model;
    folded.name = model.name + "/" + std::to_string(n);
    folded.bands = model.bands * n * n;
    folded.basis = Basis::matrix;
    folded.zone = {(1.0 / n) * z.g1, (1.0 / n) * z.g2};
    folded.field = nullptr;
    folded.jet = nullptr;
    folded.orbital_field = nullptr;
    folded.hopping_family.clear();
    folded.matrix = [base = model, n](const Params& p, KPoint k) {
        const int b = base.bands;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(b * n * n, b * n * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const KPoint shifted = k + (static_cast<double>(i) / n) * base.zone.g1 +
                                       (static_cast<double>(j) / n) * base.zone.g2;
                const int at = (i * n + j) * b;
                h.block(at, at, b, b) = assemble(base, p, shifted);
            }
        }
        return h;
    };
    return folded;
}

}  // namespace chern::models
