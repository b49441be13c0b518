#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace nullwave {

/// Japanese bracket (1 + x^2)^(1/2). Throws DomainError on non-finite input.
double bracket(double x);

struct WeightParams {
    double delta = 0.5;

    /// Throws ConfigError unless 0 < delta < 1.
    void validate() const;
};

/// phi(x) = <x>^(2+2 delta) and theta(x) = <x>^(6+6 delta).
std::pair<double, double> phi_theta(double x, const WeightParams& params);

/// Tabulated cumulative integral Psi(x) = int_{-inf}^x <rho>^{-(1+delta)} d rho.
///
/// Nodes are uniform (step 0.02) on [-20, 20] and geometric (ratio 1.01) out
/// to |x| = 1e4. Between nodes Psi is reconstructed by quintic Hermite
/// interpolation from the exact first and second derivatives; outside the
/// table a two-term power-law tail is used. Immutable after construction.
class PsiTable {
public:
    static constexpr double kXMax = 1.0e4;
    static constexpr double kQuadTol = 1.0e-10;

    explicit PsiTable(double delta);

    /// Shared table for this delta, built once per process.
    static std::shared_ptr<const PsiTable> cached(double delta);

    double delta() const noexcept { return delta_; }
    double total() const noexcept { return total_; }
    const std::vector<double>& abscissae() const noexcept { return x_; }
    const std::vector<double>& values() const noexcept { return cum_; }

    /// Psi(x) for any finite x.
    double cumulative(double x) const;

private:
    double tail(double x) const;  // int_x^inf <rho>^{-(1+delta)} for x >= kXMax
    double delta_;
    double total_ = 0.0;
    std::vector<double> x_;
    std::vector<double> cum_;
};

/// (psi(x), psi'(x)) with psi = exp(-Psi) and psi' = -psi <x>^{-(1+delta)}.
/// Throws ConfigError when the table was built for a different delta.
std::pair<double, double> eval_psi(double x, const PsiTable& table, const WeightParams& params);

/// Convenience bundle of the weight functions for one delta.
class Weights {
public:
    explicit Weights(WeightParams params);
    Weights(WeightParams params, std::shared_ptr<const PsiTable> table);

    double delta() const noexcept { return params_.delta; }
    const WeightParams& params() const noexcept { return params_; }
    const PsiTable& table() const noexcept { return *table_; }

    double phi(double x) const;
    double theta(double x) const;
    double dphi(double x) const;
    double dtheta(double x) const;
    double psi(double x) const { return eval_psi(x, *table_, params_).first; }
    std::pair<double, double> psi_pair(double x) const { return eval_psi(x, *table_, params_); }

    /// c = exp(I_total), the sharp constant with c^-1 <= psi <= c.
    double psi_bound() const;

private:
    WeightParams params_;
    std::shared_ptr<const PsiTable> table_;
};

}  // namespace nullwave
