#pragma once

#include <array>
#include <deque>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nullwave/solver.hpp"
#include "nullwave/stencil.hpp"
#include "nullwave/weights.hpp"

namespace nullwave {

inline constexpr int kMaxOrder = 4;  // highest energy index k
inline constexpr std::size_t kWindowSize = 7;
inline constexpr int kWindowLag = 3;

/// Ring of consecutive states at uniform spacing. The evaluation time is the
/// middle entry, kWindowLag steps behind the newest state.
class TimeWindow {
public:
    /// Throws SequencingError unless s.t continues the uniform spacing.
    void push(const FieldState& s);
    bool full() const noexcept { return states_.size() == kWindowSize; }
    std::size_t size() const noexcept { return states_.size(); }
    void clear() { states_.clear(); }

    /// State at `offset` steps from the centre, offset in [-3, 3].
    const FieldState& at(int offset) const;
    double center_time() const;
    double spacing() const;

private:
    std::deque<FieldState> states_;
};

/// Derivatives of u at one time, component-interleaved over the grid.
struct DerivativeStack {
    double t = 0.0;
    int n = 1;
    std::size_t npts = 0;
    double dx = 0.0;
    /// mixed[a][b] = d_t^a d_x^b u for a + b <= 4.
    std::array<std::array<std::vector<double>, kMaxOrder + 1>, kMaxOrder + 1> mixed;
    /// z[i][j] = d_xi^i d_eta^j u for i + j <= 4 (z[0][0] = u).
    std::array<std::array<std::vector<double>, kMaxOrder + 1>, kMaxOrder + 1> z;
    /// dt_xi[l] = d_t^l u_xi, dt_eta[l] = d_t^l u_eta for l <= 3.
    std::array<std::vector<double>, kMaxOrder> dt_xi, dt_eta;

    double x(std::size_t i) const { return static_cast<double>(i) * dx; }
};

/// Fills z, dt_xi and dt_eta from `mixed` by binomial expansion of
/// (d_t + d_x)^i (d_t - d_x)^j.
void assemble_null_derivatives(DerivativeStack& stack);

/// Stack at the window centre: time derivatives of v by second-order
/// centered differences, spatial derivatives by the fourth-order stencils.
/// Throws StagingError if the window is not full.
DerivativeStack build_stack(const TimeWindow& window, const StencilSet& stencils);

/// Energies indexed by k = 1..4 (index 0 unused). bar and barbar are filled
/// for k >= 2, tilde for k >= 1.
struct EnergyFamily {
    std::array<double, kMaxOrder + 1> full{};
    std::array<double, kMaxOrder + 1> bar{};
    std::array<double, kMaxOrder + 1> barbar{};
    std::array<double, kMaxOrder + 1> tilde{};
};

struct EnergySnapshot {
    double t = 0.0;
    EnergyFamily E;         // weights <.>^{2+2 delta}
    EnergyFamily EE;        // weights <.>^{6+6 delta}
    EnergyFamily cal_rate;  // x-integral of the space-time density, E weights
    EnergyFamily scr_rate;  // same with EE weights
    double u_sup = 0.0;
    /// ||<xi>^{-1-delta}||_{L2} + ||<eta>^{-1-delta}||_{L2} over the grid.
    double bound_factor = 0.0;
    /// For k = 2..4: sum_{|a|<=k-2} sup <xi>^{1+d}|Z^a u_xi| + sup <eta>^{1+d}|Z^a u_eta|.
    std::array<double, kMaxOrder + 1> weighted_sup{};
};

EnergySnapshot energy_snapshot(const DerivativeStack& stack, const Weights& weights);

/// Running time integrals of the space-time rates (trapezoid rule) and sup
/// trackers. Snapshots must arrive in nondecreasing time.
class SpaceTimeAccumulator {
public:
    void add(const EnergySnapshot& snap);

    bool started() const noexcept { return started_; }
    double time() const noexcept { return t_; }
    const EnergyFamily& cal() const noexcept { return cal_; }
    const EnergyFamily& scr() const noexcept { return scr_; }
    const EnergyFamily& sup_E() const noexcept { return sup_E_; }
    const EnergyFamily& sup_EE() const noexcept { return sup_EE_; }

private:
    bool started_ = false;
    double t_ = 0.0;
    EnergySnapshot last_;
    EnergyFamily cal_, scr_, sup_E_, sup_EE_;
};

/// Observer that keeps the time window, builds a stack every `stride` steps
/// (and at the final step), accumulates, writes CSV rows and runs hooks.
class EnergyMonitor : public Observer {
public:
    using Hook = std::function<void(const EnergySnapshot&, const DerivativeStack&,
                                    const SpaceTimeAccumulator&)>;

    EnergyMonitor(const GridConfig& grid, const Weights& weights, long stride, long nsteps);

    int history_depth() const override { return kWindowLag; }
    int lookahead() const override { return kWindowLag; }
    void observe(const FieldState& s, long step) override;

    void add_hook(Hook hook) { hooks_.push_back(std::move(hook)); }
    /// Stream for the energy CSV (header written immediately).
    void set_csv(std::ostream* out);

    const SpaceTimeAccumulator& accumulator() const noexcept { return acc_; }
    const std::vector<EnergySnapshot>& snapshots() const noexcept { return snaps_; }

private:
    GridConfig grid_;
    const Weights& weights_;
    StencilSet stencils_;
    long stride_;
    long nsteps_;
    TimeWindow window_;
    SpaceTimeAccumulator acc_;
    std::vector<EnergySnapshot> snaps_;
    std::vector<Hook> hooks_;
    std::ostream* csv_ = nullptr;
};

/// CSV header shared by the energy writers.
const char* energy_csv_header();

}  // namespace nullwave
