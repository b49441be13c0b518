#include "nullwave/quadrature.hpp"

#include <cmath>

#include "nullwave/errors.hpp"

namespace nullwave {

namespace {

struct Panel {
    double a, fa, m, fm, b, fb, whole;
};

double simpson_recurse(const std::function<double(double)>& f, const Panel& p, double tol,
                       int depth) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double delta = left + right - p.whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol, depth - 1) +
           simpson_recurse(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (!(tol > 0.0)) throw DomainError("adaptive_simpson: tolerance must be positive");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, {a, fa, m, fm, b, fb, whole}, tol, max_depth);
}

double composite_simpson_strided(std::span<const double> f, std::size_t count, std::size_t stride,
                                 double h) {
    if (count < 2) return 0.0;
    const std::size_t n = count - 1;  // number of panels
    auto at = [&](std::size_t i) { return f[i * stride]; };
    if (n == 1) return 0.5 * h * (at(0) + at(1));

    double total = 0.0;
    std::size_t simpson_end = (n % 2 == 0) ? n : n - 3;
    if (simpson_end > 0) {
        double odd = 0.0, even = 0.0;
        for (std::size_t i = 1; i < simpson_end; i += 2) odd += at(i);
        for (std::size_t i = 2; i < simpson_end; i += 2) even += at(i);
        total += h / 3.0 * (at(0) + 4.0 * odd + 2.0 * even + at(simpson_end));
    }
    if (n % 2 == 1) {
        const std::size_t s = simpson_end;
        total += 3.0 * h / 8.0 * (at(s) + 3.0 * at(s + 1) + 3.0 * at(s + 2) + at(s + 3));
    }
    return total;
}

double composite_simpson(std::span<const double> f, double h) {
    return composite_simpson_strided(f, f.size(), 1, h);
}

}  // namespace nullwave
