#pragma once

// Three independent first-Chern-number engines and a harness that runs them
// against each other.
//
// Orientation convention: the zone carries dkx ^ dky, and the reported value
// of a band is the integral of its Berry curvature with the sign for which the
// lower band of h . sigma has C = deg(h / |h|). The two degree engines compute
// that degree directly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chern/errors.hpp"
#include "chern/models.hpp"

namespace chern::invariants {

enum class Method { berry_lattice, degree_integral, degree_ray };

std::string to_string(Method method);

struct GridSize {
    int nx = 60;
    int ny = 60;
};

struct RayContribution {
    KPoint k;
    int jacobian_sign = 0;
    double height = 0.0;  // h . ray at the pre-image
};

struct QuadratureEstimate {
    GridSize grid;
    double raw = 0.0;
};

struct ChernResult {
    int value = 0;
    Method method = Method::berry_lattice;
    double raw = 0.0;
    double residual = 0.0;
    GridSize grid;
    int band = 0;

    std::vector<RayContribution> contributions;  // degree_ray
    Vec3 ray{0.0, 0.0, 1.0};
    int ray_attempts = 0;
    double half_sum = 0.0;

    std::vector<QuadratureEstimate> history;  // degree_integral
    double min_field_norm = 0.0;
    bool analytic_derivatives = true;

    double min_gap = 0.0;  // berry_lattice, over the grid
};

class DegenerateFamily : public NumericError {
public:
    DegenerateFamily(KPoint k, double gap, const std::string& detail);
    KPoint k;
    double gap;
};

class ResolutionError : public NumericError {
public:
    ResolutionError(double raw, const std::string& detail);
    double raw;
};

class MethodInapplicable : public NumericError {
public:
    explicit MethodInapplicable(const std::string& detail);
};

class RaySelectionError : public NumericError {
public:
    explicit RaySelectionError(const std::string& detail);
};

inline constexpr double default_gap_floor = 1e-8;

struct BerryOptions {
    double gap_floor = default_gap_floor;
    // Multiply each grid eigenvector by an independent random phase.
    std::optional<std::uint64_t> scramble_seed;
};

ChernResult chern_berry_lattice(const models::BlochModel& model, const models::Params& params, int band,
                                GridSize grid = {}, const BerryOptions& options = {});

struct IntegralOptions {
    double gap_floor = default_gap_floor;
    bool finite_differences = false;  // central differences at grid spacing
};

ChernResult degree_integral(const models::BlochModel& model, const models::Params& params,
                            GridSize grid = {200, 200}, const IntegralOptions& options = {});

struct RayOptions {
    Vec3 ray{0.0, 0.0, 1.0};
    int seed_density = 64;
    double tol = 1e-10;
    int max_retries = 5;
    double gap_floor = default_gap_floor;
};

ChernResult degree_ray(const models::BlochModel& model, const models::Params& params,
                       const RayOptions& options = {});

struct PlanarCurve {
    std::vector<Vec2> points;
    bool closed = true;
};

int winding_number(const PlanarCurve& curve, Vec2 origin = {});

struct EngineRun {
    Method method = Method::berry_lattice;
    std::optional<ChernResult> result;
    std::string inapplicable;  // reason the engine did not run
    double seconds = 0.0;
};

struct CrossValidation {
    std::vector<EngineRun> runs;
    bool unanimous = false;
    int value = 0;
};

class EngineDisagreement : public NumericError {
public:
    explicit EngineDisagreement(CrossValidation report);
    CrossValidation report;
};

struct CrossValidateOptions {
    GridSize berry_grid{60, 60};
    GridSize integral_grid{200, 200};
    // The quadrature grid is doubled until its residual drops below
    // integral_tolerance or the grid would exceed this side length.
    int integral_max_side = 1600;
    double integral_tolerance = 0.02;
    RayOptions ray;
};

CrossValidation cross_validate(const models::BlochModel& model, const models::Params& params,
                               const CrossValidateOptions& options = {});

}  // namespace chern::invariants
