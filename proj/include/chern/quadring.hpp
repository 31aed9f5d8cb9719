#pragma once

// Arithmetic in the ring of integers of Q(sqrt(-d)), used to decide at which
// integer multiples of the nearest-neighbour distance a square, triangular,
// honeycomb or kagome lattice repeats its nearest-neighbour shell.

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chern/errors.hpp"
#include "chern/vec.hpp"

namespace chern::quadring {

struct QuadraticRing {
    std::int64_t d = 1;            // positive, square-free
    bool half_basis = false;       // true iff d = 3 mod 4
    std::int64_t discriminant = -4;
    bool ufd = true;
};

// An element a + b*w of the owning ring. For half-basis rings
// w = (-1 + sqrt(-d))/2, otherwise w = sqrt(-d). For d = 3 this is the
// primitive cube root of unity and the norm reads a^2 - ab + b^2.
struct RingElement {
    std::int64_t a = 0;
    std::int64_t b = 0;

    friend constexpr auto operator<=>(const RingElement&, const RingElement&) = default;
};

enum class PrimeBehavior { inert, split, ramified };

std::string to_string(PrimeBehavior behavior);

struct Shell {
    std::int64_t n = 0;
    std::vector<RingElement> points;  // sorted
    bool represented = false;         // some element has norm n
    bool isolated = false;            // represented and exactly |units| points
};

class NotSquareFree : public ConfigError {
public:
    explicit NotSquareFree(std::int64_t d);
};

class NotPrime : public ConfigError {
public:
    explicit NotPrime(std::uint64_t p);
};

class CapacityExceeded : public ConfigError {
public:
    CapacityExceeded(std::int64_t n, std::int64_t cap);
};

inline constexpr std::int64_t default_enumeration_cap = 100'000'000;

QuadraticRing make_ring(std::int64_t d);

std::int64_t norm_of(const QuadraticRing& ring, RingElement z);
RingElement multiply(const QuadraticRing& ring, RingElement x, RingElement y);
RingElement conjugate(const QuadraticRing& ring, RingElement z);
RingElement negate(RingElement z);

// Position of z in the complex plane, with 1 -> (1, 0).
Vec2 embed(const QuadraticRing& ring, RingElement z);

std::size_t unit_count(const QuadraticRing& ring);
std::vector<RingElement> units(const QuadraticRing& ring);
bool are_associates(const QuadraticRing& ring, RingElement x, RingElement y);

bool is_prime(std::uint64_t n);
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

PrimeBehavior classify_prime(const QuadraticRing& ring, std::uint64_t p);

Shell shell_enumerate(const QuadraticRing& ring, std::int64_t n,
                      std::int64_t cap = default_enumeration_cap);

// Exact answer. Unique-factorization rings are decided from the prime
// factorization of n; other rings fall back to enumerating the shell.
bool is_isolated_norm(const QuadraticRing& ring, std::int64_t n);

// Advisory only: every prime factor of n is inert with even exponent or
// ramified and represented by the norm. Sufficient for isolation, not
// necessary outside unique-factorization rings.
bool isolated_norm_sufficient(const QuadraticRing& ring, std::int64_t n);

enum class PlanarLattice { square, triangular };

QuadraticRing lattice_ring(PlanarLattice lattice);

// A shell of the lattice that consists of exactly one orbit of the unit
// group. Aligned shells are integer dilations of the nearest-neighbour shell;
// rotated shells are the 45 (square) or 30 (triangular) degree classes.
struct CommensurateShell {
    std::int64_t norm = 0;       // squared distance
    double distance = 0.0;
    bool aligned = true;
    bool criterion = false;      // number-theoretic prediction for the same shell
};

std::vector<CommensurateShell> commensurate_shells(PlanarLattice lattice, double limit,
                                                   bool include_rotated = false);

// Aligned distances only: N <= limit whose shell at N^2 is N times the unit shell.
std::vector<double> commensurate_distances(PlanarLattice lattice, double limit);

// Distant-neighbour rules for the two triangular-based lattices. Honeycomb:
// N*a_i must land on the opposite sublattice and the triangular shell at N^2
// must be a dilation of the unit shell. Kagome: the same shell rule and N odd.
bool honeycomb_admissible(std::int64_t n);
bool kagome_admissible(std::int64_t n);

// Explicit sublattice lookup in the triangular lattice, independent of the
// congruence rules above. Returns a human-readable reason on failure.
struct SiteCheck {
    bool ok = false;
    std::string reason;
};
SiteCheck honeycomb_site_check(std::int64_t n);
SiteCheck kagome_site_check(std::int64_t n);

// Why N fails the aligned-shell rule (empty string when it passes).
std::string shell_obstruction(PlanarLattice lattice, std::int64_t n);

}  // namespace chern::quadring
