#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "hypercf/error.hpp"
#include "hypercf/hypercomplex.hpp"
#include "oracles.hpp"

using namespace hypercf;

namespace {

Quaternion random_quaternion(Rng& rng, double scale = 1.0) {
    return {rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale),
            rng.uniform(-scale, scale)};
}

double max_abs(const Quaternion& q) {
    return std::max({std::fabs(q.a), std::fabs(q.b), std::fabs(q.c), std::fabs(q.d)});
}

bool close_relative(const Quaternion& x, const Quaternion& y, double tol) {
    const double scale = std::max({1.0, max_abs(x), max_abs(y)});
    return max_abs(x - y) <= tol * scale;
}

}  // namespace

TEST_CASE("complex_mul examples") {
    CHECK(complex_mul({1, 0}, {2.5, -7}) == Complex{2.5, -7});
    CHECK(complex_mul({0, 1}, {0, 1}) == Complex{-1, 0});
    CHECK(complex_mul({2, 3}, {4, -1}) == Complex{11, 10});
    CHECK(oracle::complex_product({2, 3}, {4, -1}) == Complex{11, 10});
}

TEST_CASE("complex_mul is commutative and matches the expansion") {
    Rng rng(7);
    for (int n = 0; n < 1000; ++n) {
        const Complex x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const Complex y{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(complex_mul(x, y) == complex_mul(y, x));
        CHECK(complex_mul(x, y) == oracle::complex_product(x, y));
    }
}

TEST_CASE("hamilton_product examples") {
    const Quaternion q{0.3, -1.5, 2.0, 4.25};
    CHECK(hamilton_product({1, 0, 0, 0}, q) == q);
    CHECK(hamilton_product({0, 1, 0, 0}, {0, 0, 1, 0}) == Quaternion{0, 0, 0, 1});
    CHECK(hamilton_product({0, 0, 1, 0}, {0, 1, 0, 0}) == Quaternion{0, 0, 0, -1});
    // i^2 = j^2 = k^2 = ijk = -1
    const Quaternion i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
    CHECK(hamilton_product(i, i) == Quaternion{-1, 0, 0, 0});
    CHECK(hamilton_product(j, j) == Quaternion{-1, 0, 0, 0});
    CHECK(hamilton_product(k, k) == Quaternion{-1, 0, 0, 0});
    CHECK(hamilton_product(hamilton_product(i, j), k) == Quaternion{-1, 0, 0, 0});
    CHECK(hamilton_product({1, 2, 3, 4}, {5, 6, 7, 8}) == Quaternion{-60, 12, 30, 24});
    CHECK(oracle::hamilton({1, 2, 3, 4}, {5, 6, 7, 8}) == Quaternion{-60, 12, 30, 24});
}

TEST_CASE("hamilton_product algebraic properties on random quaternions") {
    Rng rng(11);
    for (int n = 0; n < 10000; ++n) {
        const auto p = random_quaternion(rng, 3.0);
        const auto q = random_quaternion(rng, 3.0);
        const auto r = random_quaternion(rng, 3.0);
        REQUIRE(hamilton_product(p, q) == oracle::hamilton(p, q));

        const double lhs = quaternion_norm(hamilton_product(p, q));
        const double rhs = quaternion_norm(p) * quaternion_norm(q);
        REQUIRE(std::fabs(lhs - rhs) <= 1e-9 * std::max(1.0, rhs));

        REQUIRE(close_relative(hamilton_product(hamilton_product(p, q), r),
                               hamilton_product(p, hamilton_product(q, r)), 1e-9));
        REQUIRE(close_relative(hamilton_product(p, q + r), hamilton_product(p, q) + hamilton_product(p, r), 1e-9));
    }
}

TEST_CASE("complex numbers embed into quaternions") {
    Rng rng(3);
    for (int n = 0; n < 1000; ++n) {
        const Complex x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Complex y{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Quaternion h = hamilton_product({x.re, x.im, 0, 0}, {y.re, y.im, 0, 0});
        const Complex c = complex_mul(x, y);
        CHECK(h.a == c.re);
        CHECK(h.b == c.im);
        CHECK(h.c == 0.0);
        CHECK(h.d == 0.0);
    }
}

TEST_CASE("split_sigmoid") {
    CHECK(split_sigmoid(Quaternion{}) == Quaternion{0.5, 0.5, 0.5, 0.5});
    const auto saturated = split_sigmoid(Quaternion{1e4, -1e4, 0, 0});
    CHECK(saturated.a == doctest::Approx(1.0));
    CHECK(saturated.b == doctest::Approx(0.0));
    CHECK(saturated.c == 0.5);
    CHECK_FALSE(std::isnan(saturated.a));
    CHECK_FALSE(std::isnan(saturated.b));
    const auto ln3 = split_sigmoid(Quaternion{std::log(3.0), 0, 0, 0});
    CHECK(ln3.a == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(ln3.b == 0.5);

    const auto c = split_sigmoid(Complex{std::log(3.0), -1e4});
    CHECK(c.re == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(c.im >= 0.0);
    CHECK(c.im < 1e-300);

    Rng rng(5);
    for (int n = 0; n < 1000; ++n) {
        const double x = rng.uniform(-30, 30);
        CHECK(sigmoid(x) == doctest::Approx(oracle::naive_sigmoid(x)).epsilon(1e-14));
    }
}

TEST_CASE("quaternion_norm") {
    CHECK(quaternion_norm({0, 0, 0, 0}) == 0.0);
    CHECK(quaternion_norm({1, 0, 0, 0}) == 1.0);
    CHECK(quaternion_norm({1, 2, 2, 4}) == 5.0);
}

TEST_CASE("quaternion_init") {
    SUBCASE("deterministic for a fixed seed") {
        Rng a(99), b(99);
        CHECK(quaternion_init(7, 5, a) == quaternion_init(7, 5, b));
    }
    SUBCASE("modulus bounded by sigma") {
        Rng rng(1);
        const std::size_t dim = 8;
        const auto parts = quaternion_init(50, dim, rng);
        const double sigma = 1.0 / std::sqrt(2.0 * dim);
        for (std::size_t r = 0; r < 50; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                CHECK(quaternion_norm(gather(parts, r, c)) <= sigma * (1.0 + 1e-12));
            }
        }
    }
    SUBCASE("components are centred") {
        Rng rng(2024);
        const std::size_t rows = 1000, dim = 100;  // 1e5 samples
        const auto parts = quaternion_init(rows, dim, rng);
        for (const auto& m : parts) {
            double mean = 0.0;
            for (const double v : m.values()) mean += v;
            mean /= static_cast<double>(m.size());
            double var = 0.0;
            for (const double v : m.values()) var += (v - mean) * (v - mean);
            const double sd = std::sqrt(var / static_cast<double>(m.size() - 1));
            CHECK(std::fabs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(m.size())));
        }
    }
    SUBCASE("rejects empty shapes") {
        Rng rng(0);
        CHECK_THROWS_AS(quaternion_init(0, 4, rng), ConfigError);
        CHECK_THROWS_AS(quaternion_init(4, 0, rng), ConfigError);
        CHECK_THROWS_AS(complex_init(0, 4, rng), ConfigError);
    }
}

TEST_CASE("rng helpers") {
    Rng a(5), b(5);
    for (int n = 0; n < 100; ++n) CHECK(a.next_u64() == b.next_u64());
    CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
    CHECK(derive_seed(1, "x", 0) != derive_seed(1, "x", 1));
    Rng rng(8);
    std::array<int, 7> counts{};
    for (int n = 0; n < 70000; ++n) ++counts[rng.uniform_index(7)];
    for (const int c : counts) CHECK(std::abs(c - 10000) < 500);
}
