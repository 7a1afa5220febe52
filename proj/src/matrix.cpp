#include "hypercf/matrix.hpp"

#include <algorithm>

namespace hypercf {

void Matrix::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

double dot(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sum += x[k] * y[k];
    }
    return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        y[k] += alpha * x[k];
    }
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

}  // namespace hypercf
