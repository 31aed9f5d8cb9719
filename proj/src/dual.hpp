#pragma once

// Forward-mode derivative in the two momentum directions.

#include <cmath>

namespace chern::detail {

struct Dual {
    double v = 0.0;
    double dx = 0.0;
    double dy = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value) {}
    constexpr Dual(double value, double ddx, double ddy) : v(value), dx(ddx), dy(ddy) {}

    friend constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
    friend constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
    friend constexpr Dual operator-(Dual a) { return {-a.v, -a.dx, -a.dy}; }
    friend constexpr Dual operator*(Dual a, Dual b) {
        return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
    }
    friend constexpr Dual operator/(Dual a, Dual b) {
        const double inv = 1.0 / b.v;
        return {a.v * inv, (a.dx - a.v * inv * b.dx) * inv, (a.dy - a.v * inv * b.dy) * inv};
    }
    Dual& operator+=(Dual o) { return *this = *this + o; }
    Dual& operator-=(Dual o) { return *this = *this - o; }
    Dual& operator*=(Dual o) { return *this = *this * o; }
};

inline Dual sin(Dual a) {
    const double c = std::cos(a.v);
    return {std::sin(a.v), c * a.dx, c * a.dy};
}

inline Dual cos(Dual a) {
    const double s = -std::sin(a.v);
    return {std::cos(a.v), s * a.dx, s * a.dy};
}

inline double value_of(double a) { return a; }
inline double value_of(Dual a) { return a.v; }

}  // namespace chern::detail
