#include "nullwave/domain.hpp"

#include <array>
#include <cmath>

#include "nullwave/errors.hpp"
#include "nullwave/quadrature.hpp"
#include "nullwave/stencil.hpp"
#include "nullwave/weights.hpp"

namespace nullwave {

void GridConfig::validate() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("L must be positive");
    if (nx < 64) throw ConfigError("Nx must be at least 64");
    if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("cfl must lie in (0, 0.5]");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("T_final must be positive");
}

namespace {

constexpr double kBumpHalfWidths = 5.0;
constexpr int kBumpPower = 8;

// Coefficients of (1 - s^2)^8 in powers of s.
std::array<double, 2 * kBumpPower + 1> bump_coefficients() {
    std::array<double, 2 * kBumpPower + 1> c{};
    double binom = 1.0;
    for (int k = 0; k <= kBumpPower; ++k) {
        c[static_cast<std::size_t>(2 * k)] = (k % 2 ? -binom : binom);
        binom = binom * (kBumpPower - k) / (k + 1);
    }
    return c;
}

double hermite(int l, double s) {
    switch (l) {
        case 0: return 1.0;
        case 1: return 2.0 * s;
        case 2: return 4.0 * s * s - 2.0;
        case 3: return 8.0 * s * s * s - 12.0 * s;
        case 4: return 16.0 * s * s * s * s - 48.0 * s * s + 12.0;
        default: throw DomainError("hermite: order out of range");
    }
}

}  // namespace

Profile::Profile(std::string family, const DataShape& shape)
    : family_(std::move(family)), center_(shape.center), width_(shape.width) {
    if (!(width_ > 0.0) || !std::isfinite(width_) || !std::isfinite(center_)) {
        throw ConfigError("data width must be positive and center finite");
    }
    if (family_ == "gaussian-bump") {
        const double reach = width_ * std::sqrt(-std::log(kGaussianCutoff));
        lo_ = center_ - reach;
        hi_ = center_ + reach;
    } else if (family_ == "polynomial-bump") {
        lo_ = center_ - kBumpHalfWidths * width_;
        hi_ = center_ + kBumpHalfWidths * width_;
    } else {
        throw ConfigError("unknown data family '" + family_ + "'");
    }
}

double Profile::derivative(double x, int order) const {
    if (order < 0 || order > 4) throw DomainError("profile derivative order must be 0..4");
    if (x <= lo_ || x >= hi_) return 0.0;
    if (family_ == "gaussian-bump") {
        const double s = (x - center_) / width_;
        const double sign = order % 2 ? -1.0 : 1.0;
        return sign * std::pow(width_, -order) * hermite(order, s) * std::exp(-s * s);
    }
    static const auto coeff = bump_coefficients();
    const double scale = kBumpHalfWidths * width_;
    const double s = (x - center_) / scale;
    double acc = 0.0;
    for (int k = static_cast<int>(coeff.size()) - 1; k >= order; --k) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) falling *= k - j;
        acc = acc * s + coeff[static_cast<std::size_t>(k)] * falling;
    }
    return acc * std::pow(scale, -order);
}

InitialData make_initial_data(const std::string& family, double epsilon, const GridConfig& grid,
                              int n, double delta, const DataShape& shape) {
    grid.validate();
    WeightParams{delta}.validate();
    if (n < 1) throw ConfigError("system dimension must be positive");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be >= 0");

    const Profile profile(family, shape);
    if (profile.support_lo() <= 0.0) {
        throw ConfigError("data support must stay away from x=0 (support starts at " +
                          std::to_string(profile.support_lo()) + ")");
    }
    if (profile.support_hi() + 1.2 * grid.t_final > grid.L) {
        throw ConfigError("support margin violated: x_hi + 1.2*T_final = " +
                          std::to_string(profile.support_hi() + 1.2 * grid.t_final) + " > L = " +
                          std::to_string(grid.L));
    }

    InitialData data;
    data.family = family;
    data.n = n;
    data.dx = grid.dx();
    data.x_lo = profile.support_lo();
    data.x_hi = profile.support_hi();
    const std::size_t npts = grid.npts();
    const auto nc = static_cast<std::size_t>(n);
    data.u0.assign(npts * nc, 0.0);
    data.u1.assign(npts * nc, 0.0);
    for (std::size_t i = 0; i < npts; ++i) {
        const double val = profile.derivative(grid.x(i), 0);
        for (std::size_t c = 0; c < nc; ++c) data.u0[i * nc + c] = val;
    }

    double amplitude = epsilon;
    if (shape.calibration == Calibration::norm && epsilon > 0.0) {
        data.amplitude = 1.0;
        amplitude = epsilon / weighted_data_norm(data, delta);
    }
    for (double& x : data.u0) x *= amplitude;
    data.amplitude = amplitude;
    return data;
}

CompatibilityReport verify_compatibility(const InitialData& data, double tol) {
    const std::size_t nc = static_cast<std::size_t>(data.n);
    if (data.npts() < 7) throw ResolutionError("compatibility check needs at least 7 grid points");
    CompatibilityReport rep;
    const char* marks[3] = {"", "'", "''"};
    auto scan = [&](const std::vector<double>& f, const char* name) {
        for (int order = 0; order <= 2; ++order) {
            for (std::size_t c = 0; c < nc; ++c) {
                const double r = std::abs(boundary_derivative(f, nc, c, order, data.dx));
                std::string label = std::string(name) + marks[order];
                if (nc > 1) label += "[" + std::to_string(c) + "]";
                rep.residuals.emplace_back(label, r);
                rep.max_residual = std::max(rep.max_residual, r);
                if (!(r <= tol)) rep.pass = false;
            }
        }
    };
    scan(data.u0, "u0");
    scan(data.u1, "u1");
    return rep;
}

namespace {

// Norm on every `step`-th sample (step 1: full grid, step 2: coarsened grid).
double data_norm_on(const InitialData& data, double delta, std::size_t step) {
    const std::size_t nc = static_cast<std::size_t>(data.n);
    const std::size_t npts = (data.npts() - 1) / step + 1;
    const double h = data.dx * static_cast<double>(step);

    std::vector<double> weight(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        weight[i] = std::pow(1.0 + (h * i) * (h * i), 3.0 + 3.0 * delta);
    }
    auto subsample = [&](const std::vector<double>& f) {
        std::vector<double> out(npts * nc);
        for (std::size_t i = 0; i < npts; ++i)
            for (std::size_t c = 0; c < nc; ++c) out[i * nc + c] = f[i * step * nc + c];
        return out;
    };

    const StencilSet stencils(npts, h);
    std::vector<double> deriv(npts * nc), integrand(npts);
    double total = 0.0;
    auto accumulate = [&](const std::vector<double>& f, int max_order) {
        for (int l = 0; l <= max_order; ++l) {
            const std::vector<double>* src = &f;
            if (l > 0) {
                stencils.d(l).apply(f, deriv, nc);
                src = &deriv;
            }
            for (std::size_t i = 0; i < npts; ++i) {
                double sq = 0.0;
                for (std::size_t c = 0; c < nc; ++c) sq += (*src)[i * nc + c] * (*src)[i * nc + c];
                integrand[i] = weight[i] * sq;
            }
            total += std::sqrt(std::max(0.0, composite_simpson(integrand, h)));
        }
    };
    accumulate(subsample(data.u0), 4);
    accumulate(subsample(data.u1), 3);
    return total;
}

}  // namespace

double weighted_data_norm(const InitialData& data, double delta) {
    WeightParams{delta}.validate();
    if (data.n < 1 || data.u0.size() != data.u1.size() || data.npts() < 9) {
        throw ConfigError("weighted_data_norm: malformed data");
    }
    const double fine = data_norm_on(data, delta, 1);
    if (fine == 0.0) return 0.0;
    if ((data.npts() - 1) % 2 == 0 && (data.npts() - 1) / 2 >= 8) {
        const double coarse = data_norm_on(data, delta, 2);
        // Fourth-order Richardson estimate of the fine-grid error.
        const double noise = std::abs(fine - coarse) / 15.0;
        if (noise > 0.01 * fine) {
            throw ResolutionError("weighted_data_norm: profile under-resolved (error estimate " +
                                  std::to_string(noise / fine) + " of the norm)");
        }
    }
    return fine;
}

}  // namespace nullwave
