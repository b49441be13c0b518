#pragma once

#include <string>
#include <vector>

namespace nullwave {

struct GridConfig {
    double L = 60.0;
    int nx = 1024;
    double cfl = 0.4;
    double t_final = 100.0;

    /// Throws ConfigError on L <= 0, nx < 64, cfl outside (0, 0.5], t_final <= 0.
    void validate() const;
    double dx() const { return L / nx; }
    double dt() const { return cfl * dx(); }
    std::size_t npts() const { return static_cast<std::size_t>(nx) + 1; }
    double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
};

enum class Calibration { norm, amplitude };

/// Shape parameters shared by both data families. The Gaussian uses
/// exp(-((x - center) / width)^2); the polynomial bump is (1 - s^2)^8 with
/// s = (x - center) / (5 width), so the defaults give support [5, 15].
struct DataShape {
    double center = 10.0;
    double width = 1.0;
    Calibration calibration = Calibration::norm;
};

/// Analytic profile with exact derivatives, amplitude 1.
class Profile {
public:
    Profile(std::string family, const DataShape& shape);

    /// d^order/dx^order of the profile at x (order 0..4); zero outside support.
    double derivative(double x, int order) const;
    double support_lo() const noexcept { return lo_; }
    double support_hi() const noexcept { return hi_; }
    const std::string& family() const noexcept { return family_; }

private:
    std::string family_;
    double center_;
    double width_;
    double lo_;
    double hi_;
};

/// Sampled data on the grid; arrays are interleaved as [i * n + c].
struct InitialData {
    std::string family;
    double amplitude = 0.0;
    int n = 1;
    double dx = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    std::vector<double> u0;
    std::vector<double> u1;

    std::size_t npts() const { return n > 0 ? u0.size() / static_cast<std::size_t>(n) : 0; }
};

inline constexpr double kGaussianCutoff = 1e-16;

/// Builds `family` ("gaussian-bump" or "polynomial-bump") on the grid with all
/// n components equal. With norm calibration the amplitude is chosen so that
/// weighted_data_norm equals epsilon; with amplitude calibration a = epsilon.
/// Throws ConfigError on unknown family, negative epsilon, support touching
/// x = 0, or x_hi + 1.2 T_final > L.
InitialData make_initial_data(const std::string& family, double epsilon, const GridConfig& grid,
                              int n, double delta, const DataShape& shape = {});

struct CompatibilityReport {
    bool pass = true;
    double max_residual = 0.0;
    /// One entry per (field, order, component): "u0", "u0'", "u0''", "u1", ...
    std::vector<std::pair<std::string, double>> residuals;
};

/// One-sided values of u0, u1 and their first two derivatives at x = 0.
CompatibilityReport verify_compatibility(const InitialData& data, double tol);

/// sum_{l<=4} ||<x>^{3+3 delta} d^l u0|| + sum_{l<=3} ||<x>^{3+3 delta} d^l u1||
/// in L^2(0, L). Throws ResolutionError when the h / 2h comparison suggests
/// stencil error above 1% of the result.
double weighted_data_norm(const InitialData& data, double delta);

}  // namespace nullwave
