#include "chern/quadring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace chern::quadring {

namespace {

constexpr std::array<std::int64_t, 9> heegner{1, 2, 3, 7, 11, 19, 43, 67, 163};

std::int64_t isqrt(std::int64_t n) {
    if (n < 0) return -1;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (e > 0) {
        if (e & 1U) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        e >>= 1U;
    }
    return result;
}

// Euler's criterion; returns 1, -1 or 0.
int legendre(std::int64_t a, std::uint64_t p) {
    const auto r = static_cast<std::uint64_t>(mod(a, static_cast<std::int64_t>(p)));
    if (r == 0) return 0;
    return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

bool square_free(std::int64_t d) {
    for (std::int64_t q = 2; q * q <= d; ++q) {
        if (d % (q * q) == 0) return false;
    }
    return true;
}

std::string describe(std::int64_t n) { return std::to_string(n); }

}  // namespace

std::string to_string(PrimeBehavior behavior) {
    switch (behavior) {
        case PrimeBehavior::inert: return "inert";
        case PrimeBehavior::split: return "split";
        case PrimeBehavior::ramified: return "ramified";
    }
    return "unknown";
}

NotSquareFree::NotSquareFree(std::int64_t d)
    : ConfigError("NotSquareFree", "d = " + describe(d) + " is not square-free") {}

NotPrime::NotPrime(std::uint64_t p)
    : ConfigError("NotPrime", std::to_string(p) + " is not a rational prime") {}

CapacityExceeded::CapacityExceeded(std::int64_t n, std::int64_t cap)
    : ConfigError("CapacityExceeded",
                  "norm " + describe(n) + " exceeds the enumeration cap " + describe(cap)) {}

QuadraticRing make_ring(std::int64_t d) {
    if (d < 1) throw ConfigError("InvalidArgument", "d must be a positive integer, got " + describe(d));
    if (!square_free(d)) throw NotSquareFree(d);
    QuadraticRing ring;
    ring.d = d;
    ring.half_basis = d % 4 == 3;
    ring.discriminant = ring.half_basis ? -d : -4 * d;
    ring.ufd = std::find(heegner.begin(), heegner.end(), d) != heegner.end();
    return ring;
}

std::int64_t norm_of(const QuadraticRing& ring, RingElement z) {
    if (ring.half_basis) return z.a * z.a - z.a * z.b + z.b * z.b * ((1 + ring.d) / 4);
    return z.a * z.a + ring.d * z.b * z.b;
}

RingElement multiply(const QuadraticRing& ring, RingElement x, RingElement y) {
    if (ring.half_basis) {
        const std::int64_t q = (1 + ring.d) / 4;  // w^2 = -w - q
        return {x.a * y.a - x.b * y.b * q, x.a * y.b + x.b * y.a - x.b * y.b};
    }
    return {x.a * y.a - ring.d * x.b * y.b, x.a * y.b + x.b * y.a};
}

RingElement conjugate(const QuadraticRing& ring, RingElement z) {
    if (ring.half_basis) return {z.a - z.b, -z.b};
    return {z.a, -z.b};
}

RingElement negate(RingElement z) { return {-z.a, -z.b}; }

Vec2 embed(const QuadraticRing& ring, RingElement z) {
    const double root = std::sqrt(static_cast<double>(ring.d));
    const auto a = static_cast<double>(z.a);
    const auto b = static_cast<double>(z.b);
    if (ring.half_basis) return {a - 0.5 * b, 0.5 * root * b};
    return {a, root * b};
}

std::vector<RingElement> units(const QuadraticRing& ring) {
    if (ring.d == 1) return {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    if (ring.d == 3) return {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}};
    return {{1, 0}, {-1, 0}};
}

std::size_t unit_count(const QuadraticRing& ring) { return units(ring).size(); }

bool are_associates(const QuadraticRing& ring, RingElement x, RingElement y) {
    const auto us = units(ring);
    return std::any_of(us.begin(), us.end(), [&](RingElement u) { return multiply(ring, u, x) == y; });
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t odd = n - 1;
    int twos = 0;
    while ((odd & 1U) == 0) {
        odd >>= 1U;
        ++twos;
    }
    // These twelve bases are a deterministic witness set below 3.3e24.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, odd, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < twos; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, int>> factors;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e > 0) factors.emplace_back(p, e);
    }
    if (n > 1) factors.emplace_back(n, 1);
    return factors;
}

PrimeBehavior classify_prime(const QuadraticRing& ring, std::uint64_t p) {
    if (!is_prime(p)) throw NotPrime(p);
    if (p == 2) {
        if (!ring.half_basis) return PrimeBehavior::ramified;
        return ring.d % 8 == 7 ? PrimeBehavior::split : PrimeBehavior::inert;
    }
    switch (legendre(-ring.d, p)) {
        case 0: return PrimeBehavior::ramified;
        case 1: return PrimeBehavior::split;
        default: return PrimeBehavior::inert;
    }
}

Shell shell_enumerate(const QuadraticRing& ring, std::int64_t n, std::int64_t cap) {
    if (n < 0) throw ConfigError("InvalidArgument", "norm must be non-negative, got " + describe(n));
    if (n > cap) throw CapacityExceeded(n, cap);
    Shell shell;
    shell.n = n;
    if (ring.half_basis) {
        // 4n = (2a - b)^2 + d b^2
        const std::int64_t bmax = isqrt(4 * n / ring.d);
        for (std::int64_t b = -bmax; b <= bmax; ++b) {
            const std::int64_t rest = 4 * n - ring.d * b * b;
            const std::int64_t s = isqrt(rest);
            if (s < 0 || s * s != rest || mod(s - b, 2) != 0) continue;
            shell.points.push_back({(s + b) / 2, b});
            if (s != 0) shell.points.push_back({(b - s) / 2, b});
        }
    } else {
        const std::int64_t bmax = isqrt(n / ring.d);
        for (std::int64_t b = -bmax; b <= bmax; ++b) {
            const std::int64_t rest = n - ring.d * b * b;
            const std::int64_t a = isqrt(rest);
            if (a < 0 || a * a != rest) continue;
            shell.points.push_back({a, b});
            if (a != 0) shell.points.push_back({-a, b});
        }
    }
    std::sort(shell.points.begin(), shell.points.end());
    shell.represented = !shell.points.empty();
    shell.isolated = shell.represented && n > 0 && shell.points.size() == unit_count(ring);
    return shell;
}

bool is_isolated_norm(const QuadraticRing& ring, std::int64_t n) {
    if (n <= 0) throw ConfigError("InvalidArgument", "isolated-norm query needs n > 0, got " + describe(n));
    if (!ring.ufd) return shell_enumerate(ring, n).isolated;
    for (auto [p, e] : factorize(static_cast<std::uint64_t>(n))) {
        switch (classify_prime(ring, p)) {
            case PrimeBehavior::split: return false;
            case PrimeBehavior::inert:
                if (e % 2 != 0) return false;
                break;
            case PrimeBehavior::ramified: break;
        }
    }
    return true;
}

bool isolated_norm_sufficient(const QuadraticRing& ring, std::int64_t n) {
    if (n <= 0) throw ConfigError("InvalidArgument", "isolated-norm query needs n > 0, got " + describe(n));
    for (auto [p, e] : factorize(static_cast<std::uint64_t>(n))) {
        const auto behavior = classify_prime(ring, p);
        if (behavior == PrimeBehavior::inert && e % 2 == 0) continue;
        if (behavior == PrimeBehavior::ramified &&
            shell_enumerate(ring, static_cast<std::int64_t>(p)).represented)
            continue;
        return false;
    }
    return true;
}

QuadraticRing lattice_ring(PlanarLattice lattice) {
    return make_ring(lattice == PlanarLattice::square ? 1 : 3);
}

namespace {

bool is_dilated_unit_shell(const QuadraticRing& ring, const Shell& shell, std::int64_t n) {
    std::vector<RingElement> expected;
    for (auto u : units(ring)) expected.push_back({n * u.a, n * u.b});
    std::sort(expected.begin(), expected.end());
    return expected == shell.points;
}

}  // namespace

std::vector<CommensurateShell> commensurate_shells(PlanarLattice lattice, double limit,
                                                   bool include_rotated) {
    if (!(limit >= 1.0)) throw ConfigError("InvalidArgument", "limit must be at least 1");
    const auto ring = lattice_ring(lattice);
    std::vector<CommensurateShell> out;
    const auto max_norm = static_cast<std::int64_t>(std::floor(limit * limit + 1e-9));
    for (std::int64_t n = 1; n <= max_norm; ++n) {
        const std::int64_t root = isqrt(n);
        const bool square = root * root == n;
        if (!square && !include_rotated) continue;
        const auto shell = shell_enumerate(ring, n);
        if (!shell.isolated) continue;
        const bool aligned = square && is_dilated_unit_shell(ring, shell, root);
        if (!aligned && !include_rotated) continue;
        out.push_back({n, std::sqrt(static_cast<double>(n)), aligned, is_isolated_norm(ring, n)});
    }
    return out;
}

std::vector<double> commensurate_distances(PlanarLattice lattice, double limit) {
    std::vector<double> out;
    for (const auto& s : commensurate_shells(lattice, limit, false)) out.push_back(s.distance);
    return out;
}

std::string shell_obstruction(PlanarLattice lattice, std::int64_t n) {
    const auto ring = lattice_ring(lattice);
    const std::int64_t m = n < 0 ? -n : n;
    const auto shell = shell_enumerate(ring, m * m);
    if (shell.isolated && is_dilated_unit_shell(ring, shell, m)) return {};
    std::ostringstream why;
    why << "the shell at squared distance " << m * m << " has " << shell.points.size()
        << " points, not the " << unit_count(ring) << " dilated nearest neighbours";
    for (auto [p, e] : factorize(static_cast<std::uint64_t>(m))) {
        if (classify_prime(ring, p) == PrimeBehavior::split) {
            why << "; " << p << " splits in Z[" << (ring.d == 1 ? "i" : "w") << "]";
        }
    }
    return why.str();
}

namespace {

// Triangular lattice points a + b w (w = e^{2 pi i/3}). Honeycomb sites are the
// classes (a + b) mod 3 = 0 (A) and 1 (B); class 2 holds the hexagon centres.
int honeycomb_species(RingElement z) { return static_cast<int>(mod(z.a + z.b, 3)); }

// Kagome sites are three of the four cosets of 2Z[w]; (0, 1) mod 2 is empty.
int kagome_species(RingElement z) {
    const auto a = mod(z.a, 2);
    const auto b = mod(z.b, 2);
    if (a == 0 && b == 0) return 0;
    if (a == 1 && b == 0) return 1;
    if (a == 1 && b == 1) return 2;
    return -1;
}

}  // namespace

SiteCheck honeycomb_site_check(std::int64_t n) {
    if (n == 0) throw ConfigError("InvalidArgument", "scale factor N must be nonzero");
    const auto ring = make_ring(3);
    const std::array<RingElement, 3> bonds{RingElement{1, 0}, RingElement{0, 1}, RingElement{-1, -1}};
    std::vector<RingElement> expected;
    for (auto v : bonds) {
        const RingElement target{n * v.a, n * v.b};
        const int species = honeycomb_species(target);
        if (species != 1) {
            return {false, "N*a_i lands on " +
                               std::string(species == 0 ? "the A sublattice" : "a hexagon centre") +
                               " instead of the B sublattice"};
        }
        expected.push_back(target);
    }
    std::sort(expected.begin(), expected.end());
    const auto shell = shell_enumerate(ring, n * n);
    std::vector<RingElement> b_sites;
    for (auto z : shell.points) {
        if (honeycomb_species(z) == 1) b_sites.push_back(z);
    }
    if (b_sites != expected) {
        return {false, "the B shell at distance |N| has " + std::to_string(b_sites.size()) +
                           " sites instead of 3"};
    }
    return {true, {}};
}

SiteCheck kagome_site_check(std::int64_t n) {
    if (n == 0) throw ConfigError("InvalidArgument", "scale factor N must be nonzero");
    const auto ring = make_ring(3);
    const auto shell = shell_enumerate(ring, n * n);
    const std::int64_t m = n < 0 ? -n : n;
    std::vector<RingElement> expected_b{{-m, 0}, {m, 0}};
    std::vector<RingElement> expected_c{{-m, -m}, {m, m}};
    std::vector<RingElement> b_sites;
    std::vector<RingElement> c_sites;
    for (auto z : shell.points) {
        const int s = kagome_species(z);
        if (s == 1) b_sites.push_back(z);
        if (s == 2) c_sites.push_back(z);
    }
    if (kagome_species({n, 0}) != 1) return {false, "N*a_1 lands on the A sublattice"};
    if (b_sites != expected_b || c_sites != expected_c) {
        return {false, "the shell at distance |N| holds " + std::to_string(b_sites.size()) + " B and " +
                           std::to_string(c_sites.size()) + " C sites instead of 2 and 2"};
    }
    return {true, {}};
}

bool honeycomb_admissible(std::int64_t n) {
    if (n == 0) throw ConfigError("InvalidArgument", "scale factor N must be nonzero");
    const std::int64_t m = n < 0 ? -n : n;
    return shell_obstruction(PlanarLattice::triangular, m).empty() && mod(n, 3) == 1;
}

bool kagome_admissible(std::int64_t n) {
    if (n == 0) throw ConfigError("InvalidArgument", "scale factor N must be nonzero");
    const std::int64_t m = n < 0 ? -n : n;
    return shell_obstruction(PlanarLattice::triangular, m).empty() && m % 2 == 1;
}

}  // namespace chern::quadring
