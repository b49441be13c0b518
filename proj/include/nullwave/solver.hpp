#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nullwave/domain.hpp"
#include "nullwave/models.hpp"
#include "nullwave/stencil.hpp"

namespace nullwave {

/// One time level. Arrays hold npts * n values interleaved as [i * n + c];
/// v = u_t and w = u_x.
struct FieldState {
    double t = 0.0;
    int n = 1;
    std::vector<double> u, v, w;

    std::size_t npts() const { return u.size() / static_cast<std::size_t>(n); }
};

/// State at t = 0 from sampled data; w is u0' from the fourth-order stencil.
FieldState initial_state(const InitialData& data, const GridConfig& grid);

/// (p, q) = (v + w, v - w), i.e. (u_xi, u_eta).
std::pair<std::vector<double>, std::vector<double>> to_null_derivatives(const FieldState& s);

/// Spatial closure at the two pinned ends.
enum class BoundaryClosure {
    /// Odd images of u, v and even images of w across x = 0 and x = L; the
    /// centered stencil is used on every row. Stable under the RK4 step.
    reflect,
    /// One-sided stencils near the ends and w(0) recomputed from u after every
    /// stage. Kept for comparison: it develops a growing sawtooth mode on long
    /// runs at fine resolution.
    one_sided,
};

/// Method-of-lines integrator for M u_tt = N u_xx + 2 (A2 - A3) u_tx + F with
/// u = v = 0 pinned at both ends. Holds scratch buffers, so one instance must
/// not be shared between threads.
class Solver {
public:
    Solver(SystemSpec spec, GridConfig grid, BoundaryClosure closure = BoundaryClosure::reflect,
           double dissipation = 0.0);

    const SystemSpec& spec() const noexcept { return spec_; }
    const GridConfig& grid() const noexcept { return grid_; }
    const StencilSet& stencils() const noexcept { return stencils_; }

    /// Time derivatives (u_t, v_t, w_t) of `s`, written into `rate` (same
    /// layout). Throws DegeneracyError / NonFiniteError with time and location.
    void compute_rhs(const FieldState& s, FieldState& rate) const;

    /// One classical four-stage step of size dt (dt may be negative). Each
    /// stage adds the sixth-difference damping (sigma / 64h) D^6 to u, v, w.
    void step(FieldState& s, double dt) const;

    /// Re-applies the boundary rows: u = v = 0 at both ends and, for the
    /// one-sided closure, w(0) from u.
    void apply_boundary(FieldState& s) const;

private:
    // First derivative with the centered stencil on every row, using images of
    // parity `parity` (+1 even, -1 odd) beyond both ends.
    void reflected_d1(const std::vector<double>& f, int parity, std::vector<double>& out) const;
    // out += (sigma / 64h) D^6 f with the same images.
    void add_damping(const std::vector<double>& f, int parity, std::vector<double>& out) const;
    void damp(const FieldState& s, FieldState& rate) const;

    SystemSpec spec_;
    GridConfig grid_;
    BoundaryClosure closure_;
    double dissipation_;
    StencilSet stencils_;
    mutable std::vector<double> wx_, vx_;
    mutable FieldState k1_, k2_, k3_, k4_, stage_;
};

struct BlowupInfo {
    enum class Trigger { none, amplitude_threshold, non_finite, degeneracy };
    bool detected = false;
    double t_blowup = 0.0;
    Trigger trigger = Trigger::none;
    std::string detail;
};

std::string to_string(BlowupInfo::Trigger trigger);

/// Receives every state of a run in time order, including its own
/// `history_depth()` states before t = 0 (negative step indices, obtained by
/// stepping backward) and `lookahead()` states after T_final.
class Observer {
public:
    virtual ~Observer() = default;
    virtual int history_depth() const { return 0; }
    virtual int lookahead() const { return 0; }
    virtual void observe(const FieldState& s, long step) = 0;
    /// Called once with the index of the last physical step (<= nsteps).
    virtual void finish(long last_step) { (void)last_step; }
};

/// Default sixth-difference damping. It removes the parasitic grid-scale
/// modes of the centered stencil (group speed 5/3) at O(h^5) cost.
inline constexpr double kDefaultDissipation = 0.1;

struct RunOptions {
    double blowup_threshold = 1e6;
    BoundaryClosure closure = BoundaryClosure::reflect;
    double dissipation = kDefaultDissipation;
};

struct RunSummary {
    long nsteps = 0;      // planned steps to T_final
    long steps_taken = 0;
    double dt = 0.0;
    double t_end = 0.0;
    double max_pq = 0.0;  // max over the run of |p| + |q|
    double far_boundary_max = 0.0;
    BlowupInfo blowup;
    FieldState final_state;
};

/// Number of steps of size grid.dt() needed to reach T_final.
long step_count(const GridConfig& grid);

/// Evolves `data` to grid.t_final or until blow-up. dt = cfl * dx and the
/// step count is rounded up so that nsteps * dt >= T_final.
RunSummary run(const SystemSpec& spec, const InitialData& data, const GridConfig& grid,
               std::span<Observer* const> observers, const RunOptions& opts = {});

/// Writes `t,x,component,u,v,w` rows every `stride` steps (step >= 0).
class TrajectoryDump : public Observer {
public:
    TrajectoryDump(std::ostream& out, const GridConfig& grid, long stride);
    void observe(const FieldState& s, long step) override;

private:
    std::ostream& out_;
    GridConfig grid_;
    long stride_;
};

}  // namespace nullwave
