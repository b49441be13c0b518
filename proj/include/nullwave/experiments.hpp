#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullwave/domain.hpp"
#include "nullwave/energetics.hpp"
#include "nullwave/models.hpp"
#include "nullwave/solver.hpp"
#include "nullwave/weights.hpp"

namespace nullwave {

/// Per-snapshot inequality checks along one run.
struct SnapshotReport {
    long snapshots = 0;
    double split_max_rel = 0.0;        // max |E_k - (bar + barbar)| / E_k over k, both families
    long mixed_bound_violations = 0;        // bar_k > 4^k (barbar_k + tilde_k), E and EE families
    double mixed_bound_max_ratio = 0.0;     // max bar_k / (4^k (barbar_k + tilde_k))
    long tilde_violations = 0;         // tilde_k > 4^k E_k
    long pointwise_violations = 0;     // ||u||_inf > bound_factor * E^{1/2}
    double pointwise_max_ratio = 0.0;  // ||u||_inf / (bound_factor * E^{1/2})
    double quadratic_ratio_max = 0.0;           // max barbar E_4 / E_4^2
    bool quadratic_ratio_finite = true;
    std::vector<double> quadratic_ratio_series;
    std::array<double, kMaxOrder + 1> weighted_sup_max{};  // max ratio per k (reported only)

    static constexpr double kSplitTol = 1e-10;
    bool split_ok() const { return split_max_rel <= kSplitTol; }
    bool pass() const {
        return split_ok() && mixed_bound_violations == 0 && tilde_violations == 0 && pointwise_violations == 0 &&
               quadratic_ratio_finite;
    }
    nlohmann::json to_json() const;
};

/// Hook for EnergyMonitor that fills a SnapshotReport.
EnergyMonitor::Hook snapshot_checker(SnapshotReport& report);

/// Check the pointwise bound of one snapshot (used by the checker and tests).
bool pointwise_bound_holds(const EnergySnapshot& snap);

enum class IdentityOrder { high, low };

/// Terms of the integrated multiplier identity at one sample time, with v = u
/// and G = F. Space integrals run over the grid.
struct IdentitySample {
    double t = 0.0;
    double energy = 0.0;    // int (e + e~) dx
    double boundary = 0.0;  // (p + p~)(t, 0)
    double q = 0.0;         // int q dx
    double q_tilde = 0.0;   // int q~ dx
    double source = 0.0;    // int of the F terms (and A2/A3 terms for the low order)
};

struct IdentityResidual {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

/// Evaluates the multiplier identity along a run. Samples every `stride`
/// steps; d_t A_i by centered differences between neighbouring steps and
/// d_x A_i by the stencil. Time integrals use composite Simpson.
class IdentityMonitor : public Observer {
public:
    IdentityMonitor(const SystemSpec& spec, const GridConfig& grid, const Weights& weights,
                    IdentityOrder order, long stride);

    int history_depth() const override { return 1; }
    int lookahead() const override { return 1; }
    void observe(const FieldState& s, long step) override;
    void finish(long last_step) override;

    const std::vector<IdentitySample>& samples() const noexcept { return samples_; }
    /// Residual at every sample time (available after finish).
    const std::vector<IdentityResidual>& residuals() const noexcept { return residuals_; }
    double final_residual() const { return residuals_.empty() ? 0.0 : residuals_.back().residual; }
    double max_residual() const;
    IdentityOrder order() const noexcept { return order_; }

private:
    struct Level {
        FieldState state;
        long step = 0;
        std::vector<Eigen::MatrixXd> a1, a2, a3;  // per grid point
        std::vector<Eigen::VectorXd> f;
    };
    Level make_level(const FieldState& s, long step) const;
    IdentitySample evaluate(const Level& prev, const Level& cur, const Level& next) const;

    SystemSpec spec_;
    GridConfig grid_;
    const Weights& weights_;
    IdentityOrder order_;
    long stride_;
    Solver solver_;
    std::deque<Level> levels_;
    std::vector<IdentitySample> samples_;
    std::vector<IdentityResidual> residuals_;
};

/// Boundary-flux report for the x = 0 row.
struct FluxReport {
    long samples = 0;
    long high_violations = 0;      // |p(s,0)| > 1e-12 max(1, |w|^2)
    double high_max_abs = 0.0;     // max |p(s,0)|
    double high_tilde_max_abs = 0.0;  // max |p~(s,0)| (reported)
    long low_violations = 0;       // p + p~ < -1e-10 (low-order pair)
    double low_min_sum = std::numeric_limits<double>::infinity();
    double low_min_margin = std::numeric_limits<double>::infinity();  // (p + p~) - psi theta |w|^2 / 4
    bool pass() const { return high_violations == 0 && low_violations == 0; }
    nlohmann::json to_json() const;
};

class FluxMonitor : public Observer {
public:
    FluxMonitor(const SystemSpec& spec, const Weights& weights);
    void observe(const FieldState& s, long step) override;
    const FluxReport& report() const noexcept { return report_; }

private:
    SystemSpec spec_;
    const Weights& weights_;
    FluxReport report_;
};

/// Diagnostics collected by run_diagnosed.
struct DiagnosedRun {
    RunSummary summary;
    InitialData data;
    std::vector<EnergySnapshot> snapshots;
    EnergyFamily cal, scr, sup_E, sup_EE;
    SnapshotReport checks;
    FluxReport flux;
    double Q() const;  // sup E_4 + calE_4(T) + sup EE_3 + scrE_3(T)
    double E4_initial() const { return snapshots.empty() ? 0.0 : snapshots.front().E.full[4]; }
};

struct DiagnosticOptions {
    long energy_stride = 10;
    std::ostream* energy_csv = nullptr;
    std::vector<Observer*> extra;  // appended after the built-in observers
    RunOptions run;
};

/// One run with the energy monitor, snapshot checks and the flux monitor.
DiagnosedRun run_diagnosed(const SystemSpec& spec, const InitialData& data, const GridConfig& grid,
                           const Weights& weights, const DiagnosticOptions& opts = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of log y against log x. Needs >= 2 positive pairs.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepOptions {
    std::string family = "gaussian-bump";
    DataShape shape;
    double delta = 0.5;
    long energy_stride = 10;
    unsigned threads = 0;  // 0: thread_limit()
    NullCheckOptions null_check;
    RunOptions run;
    std::filesystem::path energy_csv_dir;  // bootstrap only: energies_<i>.csv per ladder entry if set
};

struct SweepResult {
    std::vector<double> epsilons;
    std::vector<double> Q;
    std::vector<std::optional<double>> t_blowup;
    std::vector<double> amplitudes;
    std::vector<double> E4_initial;
    std::vector<double> sup_E4;
    std::vector<SnapshotReport> checks;
    std::vector<FluxReport> flux;
    double slope = 0.0;
    double intercept = 0.0;
    std::string verdict;  // "pass", "fail" or "inconclusive"
    std::vector<std::string> notes;
    nlohmann::json to_json() const;
};

/// epsilon-sweep of a null system; see SweepResult. Throws PreconditionError
/// when the null check fails and CounterexampleError on any blow-up.
SweepResult bootstrap_sweep(const SystemSpec& spec, const std::vector<double>& epsilons,
                            const GridConfig& grid, const SweepOptions& opts = {});

/// Blow-up times of a non-null system; PreconditionError if the null check passes.
SweepResult blowup_sweep(const SystemSpec& spec, const std::vector<double>& epsilons,
                         const GridConfig& grid, const SweepOptions& opts = {});

inline constexpr double kBootstrapSlope = 2.0;
inline constexpr double kBootstrapSlopeTol = 0.15;
inline constexpr double kBootstrapGrowthCap = 10.0;
inline constexpr double kBlowupSpread = 0.25;

}  // namespace nullwave
