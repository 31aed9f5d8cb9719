#pragma once

// Momentum-space tight-binding models. A model maps a point of the Brillouin
// torus to the real coefficients of a Hermitian matrix in the Pauli basis
// (two bands, plus the identity shift h0) or the Gell-Mann basis (three bands).

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chern/errors.hpp"
#include "chern/vec.hpp"

namespace chern::models {

struct BrillouinZone {
    Vec2 g1;
    Vec2 g2;

    double area() const { return std::abs(cross(g1, g2)); }
    double orientation() const { return cross(g1, g2) > 0.0 ? 1.0 : -1.0; }
    KPoint at(double s, double t) const { return s * g1 + t * g2; }
    // Fractional coordinates (s, t) with k = s g1 + t g2.
    Vec2 fractional(KPoint k) const;
};

enum class Basis { pauli, gell_mann, matrix };

struct ParamSpec {
    std::string name;
    double default_value = 0.0;
    double lo = -1e6;
    double hi = 1e6;
    bool integer = false;
};

// Parameter values in schema order.
using Params = std::vector<double>;
using ParamMap = std::map<std::string, double>;

struct Geometry {
    std::vector<Vec2> a;  // first neighbours
    std::vector<Vec2> b;  // second neighbours
    std::vector<Vec2> c;  // third neighbours
};

// Pauli models fill h[0..2] = (h1, h2, h3); Gell-Mann models fill h[0..7].
struct FieldValue {
    Basis basis = Basis::pauli;
    std::array<double, 8> h{};
    double h0 = 0.0;

    Vec3 pauli() const { return {h[0], h[1], h[2]}; }
};

// Traceless Pauli part and its momentum derivatives.
struct FieldJet {
    Vec3 value;
    Vec3 d_kx;
    Vec3 d_ky;
};

using FieldFn = std::function<FieldValue(const Params&, KPoint)>;
using JetFn = std::function<FieldJet(const Params&, KPoint)>;
using MatrixFn = std::function<Eigen::MatrixXcd(const Params&, KPoint)>;

struct BlochModel {
    std::string name;
    std::string lattice;  // honeycomb, square, triangular, kagome or none
    int bands = 2;
    Basis basis = Basis::pauli;
    std::vector<ParamSpec> schema;
    BrillouinZone zone;
    Geometry geometry;
    FieldFn field;           // periodic on the zone
    JetFn jet;               // empty when no analytic derivative exists
    FieldFn orbital_field;   // sublattice-offset gauge, when it differs from field
    MatrixFn matrix;         // used by models without a coefficient basis
    std::string hopping_family;  // builtin realising the nearest-neighbour-only rescaling
    int scale = 1;

    std::size_t index_of(std::string_view param) const;
    bool has_param(std::string_view param) const;
    Params defaults() const;
    // Defaults overridden by name; unknown names, NaN, non-integers in integer
    // slots and out-of-range values are configuration errors.
    Params resolve(const ParamMap& overrides = {}) const;
    ParamMap named(const Params& params) const;
};

std::vector<std::string> model_names();
BlochModel builtin_model(std::string_view name);

FieldValue eval_field(const BlochModel& model, const Params& params, KPoint k);
FieldJet eval_jet(const BlochModel& model, const Params& params, KPoint k);

Eigen::MatrixXcd assemble(const BlochModel& model, const Params& params, KPoint k);
Eigen::VectorXd spectrum(const Eigen::MatrixXcd& h);

struct Eigensystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors;  // columns
};
Eigensystem eigensystem(const BlochModel& model, const Params& params, KPoint k);

// Gap between band and band + 1.
double gap(const BlochModel& model, const Params& params, KPoint k, int band = 0);

struct PreDiracPoint {
    KPoint k;
    int jacobian_sign = 0;   // 0 when degenerate
    bool degenerate = false;
    double height = 0.0;      // component of h along the axis
};

struct PreDiracOptions {
    int seed_density = 64;
    double tol = 1e-10;
    Vec3 axis{0.0, 0.0, 1.0};
};

// Zeros on the torus of the projection of h onto the plane orthogonal to the
// axis. The Jacobian sign is taken in the right-handed frame (e1, e2, axis).
std::vector<PreDiracPoint> pre_dirac_points(const BlochModel& model, const Params& params,
                                            const PreDiracOptions& options = {});

enum class ScaleVariant { all, hopping_only };

struct ScaleOptions {
    bool check_admissibility = true;
};

BlochModel scale_model(const BlochModel& model, int n, ScaleVariant variant,
                       const ScaleOptions& options = {});

BlochModel fold_bands(const BlochModel& model, int n);

std::string to_string(ScaleVariant variant);
ScaleVariant parse_scale_variant(std::string_view text);

}  // namespace chern::models
