#include "nullwave/weights.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "nullwave/errors.hpp"
#include "nullwave/quadrature.hpp"

namespace nullwave {

double bracket(double x) {
    if (!std::isfinite(x)) throw DomainError("bracket: non-finite argument");
    return std::hypot(1.0, x);
}

void WeightParams::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ConfigError("delta must satisfy 0<δ<1 (got " + std::to_string(delta) + ")");
    }
}

std::pair<double, double> phi_theta(double x, const WeightParams& params) {
    // <x>^2 = 1 + x^2 avoids the square root.
    const double b2 = 1.0 + x * x;
    if (!std::isfinite(b2)) throw DomainError("phi_theta: non-finite argument");
    const double phi = std::pow(b2, 1.0 + params.delta);
    return {phi, phi * phi * phi};
}

namespace {

double psi_integrand(double rho, double delta) { return std::pow(1.0 + rho * rho, -0.5 * (1.0 + delta)); }

double psi_integrand_d(double rho, double delta) {
    return -(1.0 + delta) * rho * std::pow(1.0 + rho * rho, -0.5 * (3.0 + delta));
}

}  // namespace

PsiTable::PsiTable(double delta) : delta_(delta) {
    WeightParams{delta}.validate();

    constexpr double kCore = 20.0;
    constexpr double kCoreStep = 0.02;
    constexpr double kRatio = 1.01;

    std::vector<double> outer;
    for (double g = kCore * kRatio; g < kXMax; g *= kRatio) outer.push_back(g);
    outer.push_back(kXMax);

    for (auto it = outer.rbegin(); it != outer.rend(); ++it) x_.push_back(-*it);
    const int core_n = static_cast<int>(std::lround(2.0 * kCore / kCoreStep));
    for (int i = 0; i <= core_n; ++i) x_.push_back(-kCore + kCoreStep * i);
    for (double g : outer) x_.push_back(g);

    const auto panels = static_cast<double>(x_.size() - 1);
    const double panel_tol = kQuadTol / panels;
    auto f = [delta](double r) { return psi_integrand(r, delta); };

    cum_.resize(x_.size());
    cum_[0] = tail(kXMax);
    for (std::size_t i = 1; i < x_.size(); ++i) {
        cum_[i] = cum_[i - 1] + adaptive_simpson(f, x_[i - 1], x_[i], panel_tol);
    }
    total_ = cum_.back() + tail(kXMax);
}

double PsiTable::tail(double x) const {
    const double d = delta_;
    const double c1 = -0.5 * (1.0 + d);
    const double c2 = (1.0 + d) * (3.0 + d) / 8.0;
    return std::pow(x, -d) / d + c1 * std::pow(x, -d - 2.0) / (d + 2.0) +
           c2 * std::pow(x, -d - 4.0) / (d + 4.0);
}

double PsiTable::cumulative(double x) const {
    if (!std::isfinite(x)) throw DomainError("PsiTable: non-finite argument");
    if (x <= -kXMax) return tail(-x);
    if (x >= kXMax) return total_ - tail(x);

    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) i = 1;
    if (i >= x_.size()) i = x_.size() - 1;
    const double x0 = x_[i - 1], x1 = x_[i];
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;

    const double h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const double h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const double h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    const double h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    const double h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const double h21 = 0.5 * (t3 - 2.0 * t4 + t5);

    const double d = delta_;
    return cum_[i - 1] * h00 + h * psi_integrand(x0, d) * h10 + h * h * psi_integrand_d(x0, d) * h20 +
           cum_[i] * h01 + h * psi_integrand(x1, d) * h11 + h * h * psi_integrand_d(x1, d) * h21;
}

std::shared_ptr<const PsiTable> PsiTable::cached(double delta) {
    static std::mutex mtx;
    static std::map<double, std::shared_ptr<const PsiTable>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(delta);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<const PsiTable>(delta);
    cache.emplace(delta, table);
    return table;
}

std::pair<double, double> eval_psi(double x, const PsiTable& table, const WeightParams& params) {
    if (table.delta() != params.delta) {
        throw ConfigError("psi table built for delta=" + std::to_string(table.delta()) +
                          " used with delta=" + std::to_string(params.delta));
    }
    const double psi = std::exp(-table.cumulative(x));
    return {psi, -psi * psi_integrand(x, params.delta)};
}

Weights::Weights(WeightParams params) : Weights(params, PsiTable::cached(params.delta)) {}

Weights::Weights(WeightParams params, std::shared_ptr<const PsiTable> table)
    : params_(params), table_(std::move(table)) {
    params_.validate();
    if (!table_) throw ConfigError("Weights: missing psi table");
    if (table_->delta() != params_.delta) {
        throw ConfigError("Weights: psi table delta does not match weight parameters");
    }
}

double Weights::phi(double x) const { return phi_theta(x, params_).first; }

double Weights::theta(double x) const { return phi_theta(x, params_).second; }

double Weights::dphi(double x) const {
    // d/dx (1+x^2)^(1+delta) = 2 (1+delta) x (1+x^2)^delta
    return 2.0 * (1.0 + params_.delta) * x * std::pow(1.0 + x * x, params_.delta);
}

double Weights::dtheta(double x) const {
    return 6.0 * (1.0 + params_.delta) * x * std::pow(1.0 + x * x, 2.0 + 3.0 * params_.delta);
}

double Weights::psi_bound() const { return std::exp(table_->total()); }

}  // namespace nullwave
