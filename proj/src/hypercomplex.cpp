#include "hypercf/hypercomplex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypercf/error.hpp"

namespace hypercf {

namespace {

void check_shape(std::size_t rows, std::size_t dim) {
    if (rows == 0 || dim == 0) {
        throw ConfigError("hypercomplex init needs rows >= 1 and dim >= 1");
    }
}

}  // namespace

QuaternionParts quaternion_init(std::size_t rows, std::size_t dim, Rng& rng) {
    check_shape(rows, dim);
    const double sigma = quaternion_init_scale(dim);
    constexpr double pi = std::numbers::pi;
    QuaternionParts parts{Matrix(rows, dim), Matrix(rows, dim), Matrix(rows, dim), Matrix(rows, dim)};
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            // Unit pure quaternion, uniform on the sphere (Archimedes).
            const double z = rng.uniform(-1.0, 1.0);
            const double azimuth = rng.uniform(-pi, pi);
            const double ring = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double theta = rng.uniform(-pi, pi);
            const double phi = rng.uniform(0.0, sigma);
            const double s = phi * std::sin(theta);
            parts[0](r, c) = phi * std::cos(theta);
            parts[1](r, c) = s * ring * std::cos(azimuth);
            parts[2](r, c) = s * ring * std::sin(azimuth);
            parts[3](r, c) = s * z;
        }
    }
    return parts;
}

std::array<Matrix, 2> complex_init(std::size_t rows, std::size_t dim, Rng& rng) {
    check_shape(rows, dim);
    const double sigma = quaternion_init_scale(dim);
    constexpr double pi = std::numbers::pi;
    std::array<Matrix, 2> parts{Matrix(rows, dim), Matrix(rows, dim)};
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            const double theta = rng.uniform(-pi, pi);
            const double phi = rng.uniform(0.0, sigma);
            parts[0](r, c) = phi * std::cos(theta);
            parts[1](r, c) = phi * std::sin(theta);
        }
    }
    return parts;
}

}  // namespace hypercf
