#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "hypercf/matrix.hpp"
#include "hypercf/random.hpp"

namespace hypercf {

struct Complex {
    double re = 0.0;
    double im = 0.0;

    friend bool operator==(const Complex&, const Complex&) = default;
};

/// a + b i + c j + d k
struct Quaternion {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Complex operator+(Complex x, Complex y) { return {x.re + y.re, x.im + y.im}; }
constexpr Complex conj(Complex x) { return {x.re, -x.im}; }

constexpr Quaternion operator+(const Quaternion& p, const Quaternion& q) {
    return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
}
constexpr Quaternion operator-(const Quaternion& p, const Quaternion& q) {
    return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
}
constexpr Quaternion operator*(double s, const Quaternion& q) {
    return {s * q.a, s * q.b, s * q.c, s * q.d};
}
constexpr Quaternion conj(const Quaternion& q) { return {q.a, -q.b, -q.c, -q.d}; }

constexpr Complex complex_mul(Complex x, Complex y) {
    return {x.re * y.re - x.im * y.im, x.im * y.re + x.re * y.im};
}

/// Hamilton product p ⊗ q. Not commutative.
constexpr Quaternion hamilton_product(const Quaternion& p, const Quaternion& q) {
    return {
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    };
}

/// Logistic sigmoid, branched on sign so exp() never overflows.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline Complex split_sigmoid(Complex x) { return {sigmoid(x.re), sigmoid(x.im)}; }

inline Quaternion split_sigmoid(const Quaternion& q) {
    return {sigmoid(q.a), sigmoid(q.b), sigmoid(q.c), sigmoid(q.d)};
}

inline double quaternion_norm(const Quaternion& q) {
    return std::sqrt(q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d);
}

/// Four real matrices holding the a/b/c/d components of a quaternion matrix.
using QuaternionParts = std::array<Matrix, 4>;

inline Quaternion gather(const QuaternionParts& parts, std::size_t r, std::size_t c) {
    return {parts[0](r, c), parts[1](r, c), parts[2](r, c), parts[3](r, c)};
}

/// Upper bound of the modulus drawn by quaternion_init for a given width.
inline double quaternion_init_scale(std::size_t dim) {
    return 1.0 / std::sqrt(2.0 * static_cast<double>(dim));
}

/// Quaternion-aware initialization of a rows x dim quaternion matrix.
///
/// Each entry is phi * (cos(theta) + u sin(theta)) where u is a uniformly
/// random unit pure quaternion, theta ~ U(-pi, pi) and phi ~ U(0, sigma)
/// with sigma = 1 / sqrt(2 dim). Draw order per entry: u (two uniforms:
/// z in [-1,1), azimuth in [-pi,pi)), then theta, then phi. Entries are
/// visited in row-major order. Throws ConfigError on an empty shape.
QuaternionParts quaternion_init(std::size_t rows, std::size_t dim, Rng& rng);

/// Complex analogue of quaternion_init: phi * (cos(theta) + i sin(theta)),
/// theta ~ U(-pi, pi), phi ~ U(0, 1/sqrt(2 dim)).
std::array<Matrix, 2> complex_init(std::size_t rows, std::size_t dim, Rng& rng);

}  // namespace hypercf
