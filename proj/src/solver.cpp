#include "nullwave/solver.hpp"

#include <cmath>
#include <ostream>

#include "nullwave/errors.hpp"

namespace nullwave {

namespace {

FieldState zero_like(int n, std::size_t npts) {
    FieldState s;
    s.n = n;
    const std::size_t m = npts * static_cast<std::size_t>(n);
    s.u.assign(m, 0.0);
    s.v.assign(m, 0.0);
    s.w.assign(m, 0.0);
    return s;
}

// out = base + h * rate
void axpy_state(const FieldState& base, double h, const FieldState& rate, FieldState& out) {
    for (std::size_t i = 0; i < base.u.size(); ++i) {
        out.u[i] = base.u[i] + h * rate.u[i];
        out.v[i] = base.v[i] + h * rate.v[i];
        out.w[i] = base.w[i] + h * rate.w[i];
    }
}

}  // namespace

FieldState initial_state(const InitialData& data, const GridConfig& grid) {
    if (data.npts() != grid.npts()) throw ConfigError("initial data does not match the grid");
    FieldState s = zero_like(data.n, grid.npts());
    s.u = data.u0;
    s.v = data.u1;
    DerivativeOperator(1, grid.npts(), grid.dx()).apply(s.u, s.w, static_cast<std::size_t>(data.n));
    return s;
}

std::pair<std::vector<double>, std::vector<double>> to_null_derivatives(const FieldState& s) {
    std::vector<double> p(s.v.size()), q(s.v.size());
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        p[i] = s.v[i] + s.w[i];
        q[i] = s.v[i] - s.w[i];
    }
    return {std::move(p), std::move(q)};
}

Solver::Solver(SystemSpec spec, GridConfig grid, BoundaryClosure closure, double dissipation)
    : spec_(std::move(spec)),
      grid_(grid),
      closure_(closure),
      dissipation_(dissipation),
      stencils_(grid.npts(), grid.dx()) {
    grid_.validate();
    if (!(dissipation_ >= 0.0) || !std::isfinite(dissipation_)) throw ConfigError("dissipation must be >= 0");
    const std::size_t m = grid_.npts() * static_cast<std::size_t>(spec_.n);
    wx_.assign(m, 0.0);
    vx_.assign(m, 0.0);
    for (FieldState* s : {&k1_, &k2_, &k3_, &k4_, &stage_}) *s = zero_like(spec_.n, grid_.npts());
}

void Solver::compute_rhs(const FieldState& s, FieldState& rate) const {
    const int n = spec_.n;
    const auto nc = static_cast<std::size_t>(n);
    const std::size_t npts = grid_.npts();
    if (closure_ == BoundaryClosure::reflect) {
        reflected_d1(s.w, +1, wx_);
        reflected_d1(s.v, -1, vx_);
    } else {
        const auto& d1 = stencils_.d(1);
        d1.apply(s.w, wx_, nc);
        d1.apply(s.v, vx_, nc);
    }

    rate.t = s.t;
    rate.u = s.v;
    rate.w = vx_;

    if (spec_.is_linear) {
        rate.v = wx_;
    } else {
        CoefficientValues cv(n);
        Eigen::VectorXd u(n), p(n), q(n), rhs(n);
        Eigen::MatrixXd sum(n, n), m(n, n);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(n);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        for (std::size_t i = 0; i < npts; ++i) {
            const std::size_t o = i * nc;
            for (int c = 0; c < n; ++c) {
                u[c] = s.u[o + c];
                p[c] = s.v[o + c] + s.w[o + c];
                q[c] = s.v[o + c] - s.w[o + c];
            }
            try {
                evaluate_coefficients(spec_, u, p, q, cv);
            } catch (const EvaluationError& e) {
                throw NonFiniteError(e.what(), s.t, grid_.x(i));
            }
            const Eigen::Map<const Eigen::VectorXd> wx(&wx_[o], n), vx(&vx_[o], n);
            rhs = (id - cv.a1 + cv.a2 + cv.a3) * wx + 2.0 * (cv.a2 - cv.a3) * vx + cv.f;
            sum = cv.a1 + cv.a2 + cv.a3;
            Eigen::Map<Eigen::VectorXd> out(&rate.v[o], n);
            const double snorm = sum.norm();
            if (snorm == 0.0) {
                out = rhs;
                continue;
            }
            m = id - sum;
            // sigma_min(I - S) >= 1 - ||S||_2 >= 1 - ||S||_F
            if (!(snorm < 1.0 - kDegeneracyMargin)) {
                const double margin = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().minCoeff();
                if (!(margin >= kDegeneracyMargin)) {
                    throw DegeneracyError("M degenerate (margin " + std::to_string(margin) + ")", s.t,
                                          grid_.x(i));
                }
            }
            lu.compute(m);
            out = lu.solve(rhs);
        }
    }

    // Pinned rows carry no dynamics.
    for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t row : {std::size_t{0}, npts - 1}) {
            rate.u[row * nc + c] = 0.0;
            rate.v[row * nc + c] = 0.0;
        }
    }
    for (std::size_t i = 0; i < rate.v.size(); ++i) {
        if (!std::isfinite(rate.v[i]) || !std::isfinite(rate.w[i]) || !std::isfinite(rate.u[i])) {
            throw NonFiniteError("non-finite time derivative", s.t, grid_.x(i / nc));
        }
    }
}

void Solver::reflected_d1(const std::vector<double>& f, int parity, std::vector<double>& out) const {
    const auto nc = static_cast<std::size_t>(spec_.n);
    const auto last = static_cast<long>(grid_.npts()) - 1;
    const double inv_h = 1.0 / grid_.dx();
    const double sgn = parity;
    auto at = [&](long i, std::size_t c) {
        if (i < 0) return sgn * f[static_cast<std::size_t>(-i) * nc + c];
        if (i > last) return sgn * f[static_cast<std::size_t>(2 * last - i) * nc + c];
        return f[static_cast<std::size_t>(i) * nc + c];
    };
    auto row = [&](long i, std::size_t c) {
        return ((2.0 / 3.0) * (at(i + 1, c) - at(i - 1, c)) - (1.0 / 12.0) * (at(i + 2, c) - at(i - 2, c))) *
               inv_h;
    };
    for (long i = 0; i <= last; ++i) {
        const auto o = static_cast<std::size_t>(i) * nc;
        if (i >= 2 && i <= last - 2) {
            for (std::size_t c = 0; c < nc; ++c) {
                out[o + c] = ((2.0 / 3.0) * (f[o + nc + c] - f[o - nc + c]) -
                              (1.0 / 12.0) * (f[o + 2 * nc + c] - f[o - 2 * nc + c])) *
                             inv_h;
            }
        } else {
            for (std::size_t c = 0; c < nc; ++c) out[o + c] = row(i, c);
        }
    }
}

void Solver::add_damping(const std::vector<double>& f, int parity, std::vector<double>& out) const {
    static constexpr double kCoef[7] = {1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0};
    const auto nc = static_cast<std::size_t>(spec_.n);
    const auto last = static_cast<long>(grid_.npts()) - 1;
    const double scale = dissipation_ / (64.0 * grid_.dx());
    const double sgn = parity;
    auto at = [&](long i, std::size_t c) {
        if (i < 0) return sgn * f[static_cast<std::size_t>(-i) * nc + c];
        if (i > last) return sgn * f[static_cast<std::size_t>(2 * last - i) * nc + c];
        return f[static_cast<std::size_t>(i) * nc + c];
    };
    for (long i = 0; i <= last; ++i) {
        const auto o = static_cast<std::size_t>(i) * nc;
        for (std::size_t c = 0; c < nc; ++c) {
            double d6 = 0.0;
            if (i >= 3 && i <= last - 3) {
                for (int k = 0; k < 7; ++k) d6 += kCoef[k] * f[o + static_cast<std::size_t>(k) * nc - 3 * nc + c];
            } else {
                for (int k = 0; k < 7; ++k) d6 += kCoef[k] * at(i + k - 3, c);
            }
            out[o + c] += scale * d6;
        }
    }
}

void Solver::damp(const FieldState& s, FieldState& rate) const {
    if (dissipation_ == 0.0) return;
    add_damping(s.u, -1, rate.u);
    add_damping(s.v, -1, rate.v);
    add_damping(s.w, +1, rate.w);
}

void Solver::apply_boundary(FieldState& s) const {
    const auto nc = static_cast<std::size_t>(spec_.n);
    const std::size_t last = grid_.npts() - 1;
    for (std::size_t c = 0; c < nc; ++c) {
        s.u[c] = 0.0;
        s.v[c] = 0.0;
        s.u[last * nc + c] = 0.0;
        s.v[last * nc + c] = 0.0;
    }
    if (closure_ == BoundaryClosure::one_sided) {
        for (std::size_t c = 0; c < nc; ++c) s.w[c] = boundary_derivative(s.u, nc, c, 1, grid_.dx());
    }
}

void Solver::step(FieldState& s, double dt) const {
    const double t0 = s.t;
    compute_rhs(s, k1_);
    damp(s, k1_);
    axpy_state(s, 0.5 * dt, k1_, stage_);
    stage_.t = t0 + 0.5 * dt;
    apply_boundary(stage_);
    compute_rhs(stage_, k2_);
    damp(stage_, k2_);
    axpy_state(s, 0.5 * dt, k2_, stage_);
    apply_boundary(stage_);
    compute_rhs(stage_, k3_);
    damp(stage_, k3_);
    axpy_state(s, dt, k3_, stage_);
    stage_.t = t0 + dt;
    apply_boundary(stage_);
    compute_rhs(stage_, k4_);
    damp(stage_, k4_);
    const double h = dt / 6.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        s.u[i] += h * (k1_.u[i] + 2.0 * k2_.u[i] + 2.0 * k3_.u[i] + k4_.u[i]);
        s.v[i] += h * (k1_.v[i] + 2.0 * k2_.v[i] + 2.0 * k3_.v[i] + k4_.v[i]);
        s.w[i] += h * (k1_.w[i] + 2.0 * k2_.w[i] + 2.0 * k3_.w[i] + k4_.w[i]);
    }
    s.t = t0 + dt;
    apply_boundary(s);
}

std::string to_string(BlowupInfo::Trigger trigger) {
    switch (trigger) {
        case BlowupInfo::Trigger::none: return "none";
        case BlowupInfo::Trigger::amplitude_threshold: return "amplitude-threshold";
        case BlowupInfo::Trigger::non_finite: return "non-finite";
        case BlowupInfo::Trigger::degeneracy: return "degeneracy";
    }
    return "none";
}

namespace {

double max_pq(const FieldState& s) {
    const auto nc = static_cast<std::size_t>(s.n);
    double best = 0.0;
    for (std::size_t i = 0; i < s.npts(); ++i) {
        double p2 = 0.0, q2 = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            const double p = s.v[i * nc + c] + s.w[i * nc + c];
            const double q = s.v[i * nc + c] - s.w[i * nc + c];
            p2 += p * p;
            q2 += q * q;
        }
        const double val = std::sqrt(p2) + std::sqrt(q2);
        if (!std::isfinite(val)) return val;
        best = std::max(best, val);
    }
    return best;
}

double far_edge_max(const FieldState& s, const GridConfig& grid) {
    const auto nc = static_cast<std::size_t>(s.n);
    const std::size_t npts = grid.npts();
    double best = 0.0;
    for (std::size_t i = npts - 3; i < npts; ++i) {
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t k = i * nc + c;
            best = std::max({best, std::abs(s.u[k]), std::abs(s.v[k]), std::abs(s.w[k])});
        }
    }
    return best;
}

}  // namespace

long step_count(const GridConfig& grid) {
    return static_cast<long>(std::ceil(grid.t_final / grid.dt() - 1e-9));
}

RunSummary run(const SystemSpec& spec, const InitialData& data, const GridConfig& grid,
               std::span<Observer* const> observers, const RunOptions& opts) {
    grid.validate();
    if (data.n != spec.n) throw ConfigError("initial data dimension does not match the system");
    const Solver solver(spec, grid, opts.closure, opts.dissipation);
    const double dt = grid.dt();

    RunSummary sum;
    sum.dt = dt;
    sum.nsteps = step_count(grid);

    int pre = 0, post = 0;
    for (const Observer* o : observers) {
        pre = std::max(pre, o->history_depth());
        post = std::max(post, o->lookahead());
    }

    FieldState state = initial_state(data, grid);
    solver.apply_boundary(state);

    if (pre > 0) {
        std::vector<FieldState> history;
        FieldState back = state;
        for (int k = 1; k <= pre; ++k) {
            solver.step(back, -dt);
            back.t = -k * dt;
            history.push_back(back);
        }
        for (int k = pre; k >= 1; --k) {
            for (Observer* o : observers) {
                if (o->history_depth() >= k) o->observe(history[static_cast<std::size_t>(k - 1)], -k);
            }
        }
    }
    for (Observer* o : observers) o->observe(state, 0);
    sum.max_pq = max_pq(state);
    sum.far_boundary_max = far_edge_max(state, grid);

    long last = 0;
    sum.final_state = state;
    for (long k = 1; k <= sum.nsteps + post; ++k) {
        const bool physical = k <= sum.nsteps;
        BlowupInfo::Trigger trigger = BlowupInfo::Trigger::none;
        std::string detail;
        try {
            solver.step(state, dt);
            state.t = k * dt;
            const double amp = max_pq(state);
            if (!std::isfinite(amp)) {
                trigger = BlowupInfo::Trigger::non_finite;
                detail = "non-finite field values";
            } else if (amp > opts.blowup_threshold) {
                trigger = BlowupInfo::Trigger::amplitude_threshold;
                detail = "max(|p|+|q|) = " + std::to_string(amp);
            } else if (physical) {
                sum.max_pq = std::max(sum.max_pq, amp);
            }
        } catch (const DegeneracyError& e) {
            trigger = BlowupInfo::Trigger::degeneracy;
            detail = std::string(e.what()) + " at x=" + std::to_string(e.location());
        } catch (const NonFiniteError& e) {
            trigger = BlowupInfo::Trigger::non_finite;
            detail = std::string(e.what()) + " at x=" + std::to_string(e.location());
        }
        if (trigger != BlowupInfo::Trigger::none) {
            if (physical) {
                sum.blowup.detected = true;
                sum.blowup.t_blowup = k * dt;
                sum.blowup.trigger = trigger;
                sum.blowup.detail = detail;
            }
            break;
        }
        for (Observer* o : observers) {
            if (k <= sum.nsteps + o->lookahead()) o->observe(state, k);
        }
        if (physical) {
            last = k;
            sum.final_state = state;
            sum.far_boundary_max = std::max(sum.far_boundary_max, far_edge_max(state, grid));
        }
    }
    sum.steps_taken = last;
    sum.t_end = last * dt;
    for (Observer* o : observers) o->finish(last);
    return sum;
}

TrajectoryDump::TrajectoryDump(std::ostream& out, const GridConfig& grid, long stride)
    : out_(out), grid_(grid), stride_(stride) {
    if (stride_ < 1) throw ConfigError("dump stride must be positive");
    out_.precision(17);
    out_ << "t,x,component,u,v,w\n";
}

void TrajectoryDump::observe(const FieldState& s, long step) {
    if (step < 0 || step % stride_ != 0) return;
    const auto nc = static_cast<std::size_t>(s.n);
    for (std::size_t i = 0; i < s.npts(); ++i) {
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t k = i * nc + c;
            out_ << s.t << ',' << grid_.x(i) << ',' << c << ',' << s.u[k] << ',' << s.v[k] << ','
                 << s.w[k] << '\n';
        }
    }
}

}  // namespace nullwave
