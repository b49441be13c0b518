#include <doctest.h>

#include <cmath>
#include <vector>

#include "nullwave/stencil.hpp"

using namespace nullwave;

TEST_CASE("fornberg weights reproduce the classical five-point stencils") {
    const std::vector<double> nodes{-2, -1, 0, 1, 2};
    const auto w = fornberg_weights(0.0, nodes, 2);
    const double d1[] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
    const double d2[] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(w[1][j] == doctest::Approx(d1[j]).epsilon(1e-14));
        CHECK(w[2][j] == doctest::Approx(d2[j]).epsilon(1e-14));
    }
    CHECK(w[0][2] == doctest::Approx(1.0));
}

namespace {

double max_error(int order, std::size_t n) {
    const double len = 3.0, h = len / static_cast<double>(n - 1);
    std::vector<double> f(n), out(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(1.3 * static_cast<double>(i) * h + 0.2);
    DerivativeOperator op(order, n, h);
    op.apply(f, out, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 1.3 * static_cast<double>(i) * h + 0.2;
        // d^k sin(a x + b) = a^k sin(a x + b + k pi / 2)
        const double exact = std::pow(1.3, order) * std::sin(x + order * M_PI / 2.0);
        err = std::max(err, std::abs(out[i] - exact));
    }
    return err;
}

}  // namespace

TEST_CASE("derivative operators are fourth order on every row") {
    for (int order = 1; order <= 4; ++order) {
        const double coarse = max_error(order, 81), fine = max_error(order, 161);
        const double rate = std::log2(coarse / fine);
        INFO("order " << order << " rate " << rate);
        CHECK(rate > 3.5);
    }
}

TEST_CASE("apply handles interleaved components independently") {
    const std::size_t n = 64;
    const double h = 0.05;
    std::vector<double> f(2 * n), out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * h;
        f[2 * i] = x * x;
        f[2 * i + 1] = x * x * x;
    }
    DerivativeOperator(1, n, h).apply(f, out, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * h;
        CHECK(out[2 * i] == doctest::Approx(2 * x).epsilon(1e-9));
        CHECK(out[2 * i + 1] == doctest::Approx(3 * x * x).epsilon(1e-9));
    }
}

TEST_CASE("boundary derivative is exact on low-degree polynomials") {
    const double h = 0.1;
    std::vector<double> f(12);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = static_cast<double>(i) * h;
        f[i] = 1.0 + 2.0 * x - 3.0 * x * x + x * x * x;
    }
    CHECK(boundary_derivative(f, 1, 0, 0, h) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(boundary_derivative(f, 1, 0, 1, h) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(boundary_derivative(f, 1, 0, 2, h) == doctest::Approx(-6.0).epsilon(1e-9));
}

TEST_CASE("stencil set rejects orders it does not hold") {
    StencilSet set(32, 0.1);
    CHECK(set.d(4).order() == 4);
    CHECK_THROWS(set.d(0));
    CHECK_THROWS(set.d(5));
}
