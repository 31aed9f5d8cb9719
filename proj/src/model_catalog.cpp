#include <cmath>
#include <complex>
#include <numbers>

#include "chern/models.hpp"
#include "dual.hpp"

namespace chern::models {

namespace {

using detail::Dual;
using std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);

template <class T>
struct Pauli {
    T h1{};
    T h2{};
    T h3{};
    T h0{};
};

template <class T>
struct Cplx {
    T re{};
    T im{};
    friend Cplx operator+(Cplx a, Cplx b) { return {a.re + b.re, a.im + b.im}; }
    friend Cplx operator*(Cplx a, Cplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
    friend Cplx operator*(double s, Cplx a) { return {s * a.re, s * a.im}; }
};

template <class T>
Cplx<T> expi(T phase) {
    using std::cos;
    using std::sin;
    using detail::cos;
    using detail::sin;
    return {cos(phase), sin(phase)};
}

template <class T>
T along(T kx, T ky, Vec2 v) {
    return kx * v.x + ky * v.y;
}

template <class T>
Cplx<T> power(Cplx<T> z, int n) {
    Cplx<T> out{T(1.0), T(0.0)};
    for (int i = 0; i < n; ++i) out = out * z;
    return out;
}

int as_int(double v) { return static_cast<int>(std::lround(v)); }

// Geometry

const std::vector<Vec2> honeycomb_a{{0.0, 1.0}, {sqrt3 / 2, -0.5}, {-sqrt3 / 2, -0.5}};
const std::vector<Vec2> honeycomb_b{{sqrt3, 0.0}, {-sqrt3 / 2, 1.5}, {-sqrt3 / 2, -1.5}};
const std::vector<Vec2> honeycomb_c{{0.0, -2.0}, {-sqrt3, 1.0}, {sqrt3, 1.0}};

const std::vector<Vec2> triangular_a{{-1.0, 0.0}, {-0.5, -sqrt3 / 2}, {0.5, -sqrt3 / 2},
                                     {1.0, 0.0},  {0.5, sqrt3 / 2},   {-0.5, sqrt3 / 2}};
const std::vector<Vec2> triangular_b{{0.0, sqrt3},  {-1.5, sqrt3 / 2}, {-1.5, -sqrt3 / 2},
                                     {0.0, -sqrt3}, {1.5, -sqrt3 / 2}, {1.5, sqrt3 / 2}};

const std::vector<Vec2> kagome_a{{1.0, 0.0}, {0.5, sqrt3 / 2}, {-0.5, sqrt3 / 2}};

const BrillouinZone honeycomb_zone{{2 * pi / sqrt3, 2 * pi / 3}, {-2 * pi / sqrt3, 2 * pi / 3}};
const BrillouinZone triangular_zone{{2 * pi, -2 * pi / sqrt3}, {0.0, 4 * pi / sqrt3}};
const BrillouinZone kagome_zone{{pi, -pi / sqrt3}, {0.0, 2 * pi / sqrt3}};
const BrillouinZone square_zone{{2 * pi, 0.0}, {0.0, 2 * pi}};

// Field formulas. `all` multiplies every momentum, `hop` only the
// nearest-neighbour hoppings.

struct HoneycombTerms {
    double t1, t2, phi, m, t3;
    int hop, all;
};

template <class T>
Pauli<T> honeycomb(const HoneycombTerms& p, T kx, T ky, bool periodic) {
    using std::sin;
    using std::cos;
    using detail::sin;
    using detail::cos;
    const T qx = kx * static_cast<double>(p.all);
    const T qy = ky * static_cast<double>(p.all);
    const Vec2 origin = periodic ? static_cast<double>(p.hop) * honeycomb_a[0] : Vec2{};
    Cplx<T> off{};
    for (const auto& a : honeycomb_a) off = off + p.t1 * expi(along(qx, qy, static_cast<double>(p.hop) * a - origin));
    if (p.t3 != 0.0) {
        const Vec2 origin3 = periodic ? honeycomb_a[0] : Vec2{};
        for (const auto& c : honeycomb_c) off = off + p.t3 * expi(along(qx, qy, c - origin3));
    }
    T sin_sum{};
    T cos_sum{};
    for (const auto& b : honeycomb_b) {
        sin_sum += sin(along(qx, qy, b));
        cos_sum += cos(along(qx, qy, b));
    }
    return {off.re, off.im, p.m - 2.0 * p.t2 * std::sin(p.phi) * sin_sum, 2.0 * p.t2 * std::cos(p.phi) * cos_sum};
}

struct TriangularTerms {
    double t1, t2, phi, m;
    int hop, all;
};

template <class T>
Pauli<T> triangular(const TriangularTerms& p, T kx, T ky) {
    using std::sin;
    using std::cos;
    using detail::sin;
    using detail::cos;
    const T qx = kx * static_cast<double>(p.all);
    const T qy = ky * static_cast<double>(p.all);
    T h1{}, h2{}, s{}, c{};
    for (std::size_t i = 0; i < 6; ++i) {
        const double sign = i % 2 == 0 ? -1.0 : 1.0;  // (-1)^i counted from i = 1
        const T phase = along(qx, qy, static_cast<double>(p.hop) * triangular_a[i]);
        h1 += cos(phase);
        h2 += sign * sin(phase);
        s += sign * sin(along(qx, qy, triangular_b[i]));
        c += cos(along(qx, qy, triangular_b[i]));
    }
    return {-0.5 * p.t1 * h1, -0.5 * p.t1 * h2, p.m - p.t2 * std::sin(p.phi) * s, p.t2 * std::cos(p.phi) * c};
}

template <class T>
Pauli<T> square_bhz(double t1, double m, int all, T kx, T ky) {
    using std::sin;
    using std::cos;
    using detail::sin;
    using detail::cos;
    const T qx = kx * static_cast<double>(all);
    const T qy = ky * static_cast<double>(all);
    return {t1 * sin(qx), t1 * sin(qy), m - t1 * cos(qx) - t1 * cos(qy), T{}};
}

template <class T>
Pauli<T> square_power(const Params& p, T kx, T ky) {
    using std::sin;
    using std::cos;
    using detail::sin;
    using detail::cos;
    const double alpha = p[0], beta = p[1], gamma1 = p[2], gamma2 = p[3], m0 = p[4];
    const int d = as_int(p[5]);
    Cplx<T> z{alpha * cos(kx), (d >= 0 ? beta : -beta) * cos(ky)};
    const Cplx<T> w = power(z, d >= 0 ? d : -d);  // w = h1 - i h2
    return {w.re, -w.im, m0 + gamma1 * sin(kx) + gamma2 * sin(ky), T{}};
}

template <class T>
Pauli<T> mb_dirac(double M, double B, T kx, T ky) {
    using std::sin;
    using detail::sin;
    const T sx = sin(kx * 0.5);
    const T sy = sin(ky * 0.5);
    return {sin(kx), sin(ky), M - B * (sx * sx + sy * sy), T{}};
}

// Degree-one map of the torus onto the sphere; its planar part vanishes at the
// four half-periods.
template <class T>
Pauli<T> sphere_base(T kx, T ky) {
    using std::sin;
    using std::cos;
    using detail::sin;
    using detail::cos;
    return {sin(kx), sin(ky), cos(kx) + cos(ky) - 1.0, T{}};
}

template <class T>
Pauli<T> suspended(int d, T kx, T ky) {
    const auto base = sphere_base(kx, ky);
    Cplx<T> w{base.h1, d >= 0 ? base.h2 : -base.h2};
    const Cplx<T> wd = power(w, d >= 0 ? d : -d);
    return {wd.re, wd.im, base.h3, T{}};
}

// Kagome, as a 3x3 matrix in the sublattice-offset gauge (cosines of the bond
// vectors) or its periodic counterpart.
Eigen::Matrix3cd kagome_matrix(double t1, double u1, int all, KPoint k, bool periodic) {
    using C = std::complex<double>;
    const KPoint q = static_cast<double>(all) * k;
    const double c1 = std::cos(dot(q, kagome_a[0]));
    const double c2 = std::cos(dot(q, kagome_a[1]));
    const double c3 = std::cos(dot(q, kagome_a[2]));
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    h(0, 1) = C(-2 * t1, 2 * u1) * c1;
    h(0, 2) = C(-2 * t1, -2 * u1) * c2;
    h(1, 2) = C(-2 * t1, 2 * u1) * c3;
    if (periodic) {
        const std::array<Vec2, 3> site{Vec2{}, kagome_a[0], kagome_a[1]};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) h(i, j) *= std::polar(1.0, -dot(q, site[j] - site[i]));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) h(j, i) = std::conj(h(i, j));
    return h;
}

FieldValue gell_mann_coefficients(const Eigen::Matrix3cd& h) {
    FieldValue f;
    f.basis = Basis::gell_mann;
    const double trace = (h(0, 0) + h(1, 1) + h(2, 2)).real();
    f.h0 = trace / 3.0;
    f.h[0] = h(0, 1).real();
    f.h[1] = -h(0, 1).imag();
    f.h[2] = 0.5 * (h(0, 0).real() - h(1, 1).real());
    f.h[3] = h(0, 2).real();
    f.h[4] = -h(0, 2).imag();
    f.h[5] = h(1, 2).real();
    f.h[6] = -h(1, 2).imag();
    f.h[7] = (0.5 * (h(0, 0).real() + h(1, 1).real()) - h(2, 2).real()) * (sqrt3 / 3.0);
    return f;
}

// Wraps a templated Pauli formula into the value and jet callbacks.
template <class Formula>
void bind_pauli(BlochModel& model, Formula formula) {
    model.basis = Basis::pauli;
    model.bands = 2;
    model.field = [formula](const Params& p, KPoint k) {
        const auto v = formula(p, k.x, k.y);
        FieldValue f;
        f.h[0] = v.h1;
        f.h[1] = v.h2;
        f.h[2] = v.h3;
        f.h0 = v.h0;
        return f;
    };
    model.jet = [formula](const Params& p, KPoint k) {
        const auto v = formula(p, Dual{k.x, 1.0, 0.0}, Dual{k.y, 0.0, 1.0});
        return FieldJet{{v.h1.v, v.h2.v, v.h3.v}, {v.h1.dx, v.h2.dx, v.h3.dx}, {v.h1.dy, v.h2.dy, v.h3.dy}};
    };
}

template <class Formula>
FieldFn pauli_value(Formula formula) {
    return [formula](const Params& p, KPoint k) {
        const auto v = formula(p, k.x, k.y);
        FieldValue f;
        f.h[0] = v.h1;
        f.h[1] = v.h2;
        f.h[2] = v.h3;
        f.h0 = v.h0;
        return f;
    };
}

ParamSpec real(std::string name, double value) { return {std::move(name), value, -1e6, 1e6, false}; }
ParamSpec angle(std::string name, double value) { return {std::move(name), value, -4 * pi, 4 * pi, false}; }
ParamSpec whole(std::string name, double value, double lo = -64, double hi = 64) {
    return {std::move(name), value, lo, hi, true};
}

BlochModel honeycomb_model(std::string name, bool third, int scale_kind) {
    // scale_kind: 0 none, 1 all momenta by N, 2 nearest-neighbour hoppings by N
    BlochModel model;
    model.name = std::move(name);
    model.lattice = "honeycomb";
    model.zone = honeycomb_zone;
    model.geometry = {honeycomb_a, honeycomb_b, third ? honeycomb_c : std::vector<Vec2>{}};
    model.schema = {real("t1", 1.0), real("t2", 0.5), angle("phi", pi / 2), real("m", 0.0)};
    if (third) model.schema.push_back(real("t3", 0.35));
    if (scale_kind != 0) model.schema.push_back(whole("N", scale_kind == 1 ? 2 : -2));
    auto terms = [third, scale_kind](const Params& p) {
        const int n = scale_kind != 0 ? as_int(p[4]) : 1;
        return HoneycombTerms{p[0], p[1], p[2], p[3], third ? p[4] : 0.0, scale_kind == 2 ? n : 1,
                              scale_kind == 1 ? n : 1};
    };
    bind_pauli(model, [terms](const Params& p, auto kx, auto ky) { return honeycomb(terms(p), kx, ky, true); });
    model.orbital_field =
        pauli_value([terms](const Params& p, auto kx, auto ky) { return honeycomb(terms(p), kx, ky, false); });
    if (!third && scale_kind == 0) model.hopping_family = "haldane_n";
    return model;
}

BlochModel triangular_model(std::string name, int scale_kind) {
    BlochModel model;
    model.name = std::move(name);
    model.lattice = "triangular";
    model.zone = triangular_zone;
    model.geometry = {triangular_a, triangular_b, {}};
    model.schema = {real("t1", 1.0), real("t2", 0.5), angle("phi", pi / 2), real("m", 0.0)};
    if (scale_kind != 0) model.schema.push_back(whole("N", 2));
    bind_pauli(model, [scale_kind](const Params& p, auto kx, auto ky) {
        const int n = scale_kind != 0 ? as_int(p[4]) : 1;
        return triangular(TriangularTerms{p[0], p[1], p[2], p[3], scale_kind == 2 ? n : 1, scale_kind == 1 ? n : 1},
                          kx, ky);
    });
    if (scale_kind == 0) model.hopping_family = "triangular_n";
    return model;
}

BlochModel kagome_model(std::string name, bool scaled) {
    BlochModel model;
    model.name = std::move(name);
    model.lattice = "kagome";
    model.bands = 3;
    model.basis = Basis::gell_mann;
    model.zone = kagome_zone;
    model.geometry = {kagome_a, {}, {}};
    model.schema = {real("t1", 1.0), real("u1", 1.0)};
    if (scaled) model.schema.push_back(whole("N", 3));
    model.field = [scaled](const Params& p, KPoint k) {
        return gell_mann_coefficients(kagome_matrix(p[0], p[1], scaled ? as_int(p[2]) : 1, k, true));
    };
    model.orbital_field = [scaled](const Params& p, KPoint k) {
        return gell_mann_coefficients(kagome_matrix(p[0], p[1], scaled ? as_int(p[2]) : 1, k, false));
    };
    return model;
}

BlochModel square_model(std::string name, std::vector<ParamSpec> schema) {
    BlochModel model;
    model.name = std::move(name);
    model.lattice = "square";
    model.zone = square_zone;
    model.geometry = {{{1.0, 0.0}}, {{0.0, 1.0}}, {}};
    model.schema = std::move(schema);
    return model;
}

std::vector<BlochModel> build_catalog() {
    std::vector<BlochModel> out;
    out.push_back(honeycomb_model("haldane", false, 0));
    out.push_back(honeycomb_model("haldane3nn", true, 0));
    out.push_back(honeycomb_model("haldane_n2", false, 1));
    out.push_back(honeycomb_model("haldane_n", false, 2));

    auto bhz = square_model("bhz_square", {real("t1", 1.0), real("m", -1.0)});
    bind_pauli(bhz, [](const Params& p, auto kx, auto ky) { return square_bhz(p[0], p[1], 1, kx, ky); });
    out.push_back(bhz);

    auto bhz_n = square_model("square_n2", {real("t1", 1.0), real("m", -1.0), whole("N", 2)});
    bind_pauli(bhz_n, [](const Params& p, auto kx, auto ky) { return square_bhz(p[0], p[1], as_int(p[2]), kx, ky); });
    out.push_back(bhz_n);

    auto power = square_model("square_power", {real("alpha", 1.0), real("beta", 1.0), real("gamma1", 1.0),
                                               real("gamma2", 1.0), real("m0", 1.0), whole("d", 1, -8, 8)});
    bind_pauli(power, [](const Params& p, auto kx, auto ky) { return square_power(p, kx, ky); });
    out.push_back(power);

    out.push_back(triangular_model("triangular", 0));
    out.push_back(triangular_model("triangular_n2", 1));
    out.push_back(triangular_model("triangular_n", 2));
    out.push_back(kagome_model("kagome", false));
    out.push_back(kagome_model("kagome_n2", true));

    auto mb = square_model("mb_dirac", {real("M", 1.0), real("B", 2.0)});
    bind_pauli(mb, [](const Params& p, auto kx, auto ky) { return mb_dirac(p[0], p[1], kx, ky); });
    out.push_back(mb);

    BlochModel spin;
    spin.name = "spin_ssphere";
    spin.lattice = "none";
    spin.zone = square_zone;
    spin.schema = {whole("d", 1, -8, 8)};
    bind_pauli(spin, [](const Params& p, auto kx, auto ky) { return suspended(as_int(p[0]), kx, ky); });
    out.push_back(spin);

    BlochModel torus;
    torus.name = "torus_wind";
    torus.lattice = "none";
    torus.zone = square_zone;
    torus.schema = {whole("d1", 1, -8, 8), whole("d2", 1, -8, 8)};
    bind_pauli(torus, [](const Params& p, auto kx, auto ky) {
        return sphere_base(kx * static_cast<double>(as_int(p[0])), ky * static_cast<double>(as_int(p[1])));
    });
    out.push_back(torus);
    return out;
}

const std::vector<BlochModel>& catalog() {
    static const std::vector<BlochModel> models = build_catalog();
    return models;
}

}  // namespace

std::vector<std::string> model_names() {
    std::vector<std::string> names;
    for (const auto& m : catalog()) names.push_back(m.name);
    return names;
}

BlochModel builtin_model(std::string_view name) {
    for (const auto& m : catalog()) {
        if (m.name == name) return m;
    }
    throw ConfigError("UnknownModel", "no builtin model named '" + std::string(name) + "'");
}

}  // namespace chern::models
