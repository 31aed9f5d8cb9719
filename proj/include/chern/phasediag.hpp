#pragma once

// Phase diagrams of model families, and synthetic families that realise
// prescribed Chern jumps: walls between two suspension maps, their rose-curve
// critical loci, and fans of chambers in the plane.

#include <optional>
#include <string>
#include <vector>

#include "chern/invariants.hpp"
#include "chern/models.hpp"

namespace chern::phasediag {

// Minimum gap

enum class GapScope { band, all };

struct GapMinimum {
    double gap = 0.0;
    KPoint k;
};

struct GapOptions {
    invariants::GridSize grid{48, 48};
    GapScope scope = GapScope::all;
    int band = 0;
    int refine_starts = 4;  // grid minima polished by compass search
};

GapMinimum minimum_gap(const models::BlochModel& model, const models::Params& params,
                       const GapOptions& options = {});

// Scans

struct Axis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    int points = 2;

    double value(int i) const;
};

inline constexpr double default_degeneracy_threshold = 1e-6;

struct ScanOptions {
    double threshold = default_degeneracy_threshold;
    invariants::GridSize chern_grid{40, 40};
    invariants::Method method = invariants::Method::berry_lattice;
    int band = 0;
    GapOptions gap;
    double boundary_tol = 1e-9;
    bool locate_boundaries = true;
};

struct Cell {
    std::vector<double> coords;  // one per axis
    models::Params params;
    std::optional<int> chern;    // empty when degenerate or failed
    bool degenerate = false;
    double min_gap = 0.0;
    KPoint min_gap_at;
    std::string error;
};

struct Boundary {
    std::size_t from = 0;  // cell indices
    std::size_t to = 0;
    int axis = 0;
    double location = 0.0;  // value of the axis parameter at the gap minimum
    double gap = 0.0;
};

// Degeneracies of a one-parameter scan, found by refining local minima of the
// gap profile.
struct Critical {
    double location = 0.0;
    double gap = 0.0;
};

struct PhaseDiagram {
    std::string model;
    std::vector<Axis> axes;
    std::vector<Cell> cells;  // row-major, the first axis varies fastest
    std::vector<Boundary> boundaries;
    std::vector<Critical> criticals;
    std::vector<std::string> errors;

    std::size_t index(int i, int j = 0) const;
};

PhaseDiagram scan(const models::BlochModel& model, const models::Params& base, const std::vector<Axis>& axes,
                  const ScanOptions& options = {});

// Golden-section search of the minimum gap along one parameter in [lo, hi].
Critical locate_gap_closing(const models::BlochModel& model, const models::Params& base, const std::string& param,
                            double lo, double hi, const GapOptions& gap = {}, double tol = 1e-9);

// Walls

// f_d(phi, theta) = (sin theta cos d phi, sin theta sin d phi, cos theta).
Vec3 suspension(int d, double phi, double theta);

struct WallFamily {
    int d = 0;
    int dprime = 0;

    // (1 - t) f_d + t f_d'
    Vec3 operator()(double t, double phi, double theta) const;
    // Equatorial part (1 - t) z^d + t z^d' at z = e^{i phi}.
    Vec2 equator(double t, double phi) const;
};

WallFamily wall_family(int d, int dprime);
std::vector<double> wall_zeros(int d, int dprime);

struct WallSample {
    double t = 0.0;
    double min_norm = 0.0;  // min over the circle of |(1 - t) z^d + t z^d'|
};
std::vector<WallSample> wall_trace(int d, int dprime, int t_samples = 101, int phi_samples = 2048);

int dirac_count(int d, int dprime);

// Rose curves

struct RoseCurve {
    int d = 0;
    int dprime = 0;
    double t = 0.0;
    std::vector<Vec2> samples;  // g_t(phi) for phi in [0, 2 pi], closed
    std::optional<double> k_rose;  // |d - d'| / |d + d'|
    double polar_period = 0.0;  // in units of pi
};

int rose_sample_count(int d, int dprime, double t, int requested);
RoseCurve rose_curve(int d, int dprime, double t, int nsamples = 0);
// Largest deviation of the t = 1/2 samples from r = cos(k theta) along the
// parameterisation theta = (d + d') phi / 2.
double polar_deviation(const RoseCurve& curve);

// Fans

struct FanDiagram {
    std::vector<int> labels;  // chamber i lies between rays i - 1 and i
    int k() const { return static_cast<int>(labels.size()); }
};

struct FanFamily {
    FanDiagram fan;
    // Map of the sphere attached to the plane point p.
    Vec3 operator()(Vec2 p, double phi, double theta) const;
    // Value and partial derivatives in theta and phi.
    std::array<Vec3, 3> jet(Vec2 p, double phi, double theta) const;
};

FanFamily fan_family(const FanDiagram& fan);

struct RealizationReport {
    std::vector<int> expected;
    std::vector<std::optional<int>> measured;
    std::vector<double> ray_min_norm;        // min |F| over the sphere on each ray
    std::vector<bool> ray_degenerate;
    double off_ray_min_norm = 0.0;            // over sampled directions away from the rays
    std::vector<double> degenerate_angles;    // sampled directions where |F| fell below tolerance
    bool ok = false;
};

RealizationReport verify_realization(const FanDiagram& fan, const FanFamily& family, double probe_radius = 1.0,
                                     double tolerance = 1e-9);

// Degree of a map S^2 -> R^3 \ {0} over the (theta, phi) sphere.
double sphere_degree(const FanFamily& family, Vec2 p, int n_theta = 200, int n_phi = 400);

}  // namespace chern::phasediag
