#include "nullwave/experiments.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "nullwave/errors.hpp"
#include "nullwave/parallel.hpp"
#include "nullwave/quadrature.hpp"

namespace nullwave {

// ---------------------------------------------------------------- snapshot checks

bool pointwise_bound_holds(const EnergySnapshot& snap) {
    return snap.u_sup <= snap.bound_factor * std::sqrt(snap.E.full[1]);
}

EnergyMonitor::Hook snapshot_checker(SnapshotReport& report) {
    return [&report](const EnergySnapshot& snap, const DerivativeStack&, const SpaceTimeAccumulator&) {
        ++report.snapshots;
        for (const EnergyFamily* fam : {&snap.E, &snap.EE}) {
            double pow4 = 4.0;
            for (int k = 1; k <= kMaxOrder; ++k, pow4 *= 4.0) {
                if (fam->tilde[k] > pow4 * fam->full[k]) ++report.tilde_violations;
                if (k < 2) continue;
                if (fam->full[k] > 0.0) {
                    const double rel = std::abs(fam->full[k] - (fam->bar[k] + fam->barbar[k])) / fam->full[k];
                    report.split_max_rel = std::max(report.split_max_rel, rel);
                }
                const double cap = pow4 * (fam->barbar[k] + fam->tilde[k]);
                if (fam->bar[k] > cap) ++report.mixed_bound_violations;
                if (cap > 0.0) report.mixed_bound_max_ratio = std::max(report.mixed_bound_max_ratio, fam->bar[k] / cap);
            }
        }
        const double rhs = snap.bound_factor * std::sqrt(snap.E.full[1]);
        if (!pointwise_bound_holds(snap)) ++report.pointwise_violations;
        if (rhs > 0.0) report.pointwise_max_ratio = std::max(report.pointwise_max_ratio, snap.u_sup / rhs);

        const double e4 = snap.E.full[4];
        if (e4 > 0.0) {
            const double ratio = snap.E.barbar[4] / (e4 * e4);
            report.quadratic_ratio_series.push_back(ratio);
            if (!std::isfinite(ratio)) report.quadratic_ratio_finite = false;
            else report.quadratic_ratio_max = std::max(report.quadratic_ratio_max, ratio);
        }
        for (int k = 2; k <= kMaxOrder; ++k) {
            if (snap.E.full[k] > 0.0) {
                report.weighted_sup_max[k] =
                    std::max(report.weighted_sup_max[k], snap.weighted_sup[k] / std::sqrt(snap.E.full[k]));
            }
        }
    };
}

nlohmann::json SnapshotReport::to_json() const {
    return {{"snapshots", snapshots},
            {"split_max_rel", split_max_rel},
            {"split_pass", split_ok()},
            {"mixed_bound_violations", mixed_bound_violations},
            {"mixed_bound_max_ratio", mixed_bound_max_ratio},
            {"tilde_violations", tilde_violations},
            {"pointwise_violations", pointwise_violations},
            {"pointwise_max_ratio", pointwise_max_ratio},
            {"quadratic_ratio_max", quadratic_ratio_max},
            {"quadratic_ratio_finite", quadratic_ratio_finite},
            {"weighted_sup_max_ratio", {weighted_sup_max[2], weighted_sup_max[3], weighted_sup_max[4]}},
            {"pass", pass()}};
}

// ---------------------------------------------------------------- identity monitor

namespace {

double quad(const Eigen::VectorXd& x, const Eigen::MatrixXd& a, const Eigen::VectorXd& y) { return x.dot(a * y); }

}  // namespace

IdentityMonitor::IdentityMonitor(const SystemSpec& spec, const GridConfig& grid, const Weights& weights,
                                 IdentityOrder order, long stride)
    : spec_(spec), grid_(grid), weights_(weights), order_(order), stride_(stride), solver_(spec, grid) {
    if (stride_ < 1) throw ConfigError("identity stride must be positive");
    if (stride_ * grid_.dt() > 0.1 + 1e-12) {
        throw ResolutionError("identity sampling too coarse: stride*dt = " + std::to_string(stride_ * grid_.dt()) +
                              " > 0.1");
    }
}

IdentityMonitor::Level IdentityMonitor::make_level(const FieldState& s, long step) const {
    Level lv;
    lv.state = s;
    lv.step = step;
    const long r = ((step % stride_) + stride_) % stride_;
    const bool needed = r == 0 || r == 1 || r == stride_ - 1;
    if (spec_.is_linear || !needed) return lv;
    const int n = spec_.n;
    const auto nc = static_cast<std::size_t>(n);
    const std::size_t npts = s.npts();
    lv.a1.resize(npts);
    lv.a2.resize(npts);
    lv.a3.resize(npts);
    lv.f.resize(npts);
    CoefficientValues cv(n);
    Eigen::VectorXd u(n), p(n), q(n);
    for (std::size_t i = 0; i < npts; ++i) {
        for (std::size_t c = 0; c < nc; ++c) {
            u[c] = s.u[i * nc + c];
            p[c] = s.v[i * nc + c] + s.w[i * nc + c];
            q[c] = s.v[i * nc + c] - s.w[i * nc + c];
        }
        evaluate_coefficients(spec_, u, p, q, cv);
        lv.a1[i] = cv.a1;
        lv.a2[i] = cv.a2;
        lv.a3[i] = cv.a3;
        lv.f[i] = cv.f;
    }
    return lv;
}

IdentitySample IdentityMonitor::evaluate(const Level& prev, const Level& cur, const Level& next) const {
    const FieldState& s = cur.state;
    const int n = spec_.n;
    const auto nc = static_cast<std::size_t>(n);
    const std::size_t npts = s.npts();
    const double dx = grid_.dx();
    const bool high = order_ == IdentityOrder::high;
    const bool linear = spec_.is_linear;
    const double half = high ? 1.0 : 0.5;  // weight of the eta-multiplier

    // Matrix-valued derivatives: d_t by centered differences, d_x by the stencil.
    std::vector<Eigen::MatrixXd> dxi[3], deta[3];
    if (!linear) {
        const double h2 = next.state.t - prev.state.t;
        const StencilSet st(npts, dx);
        const std::vector<Eigen::MatrixXd>* cur_a[3] = {&cur.a1, &cur.a2, &cur.a3};
        const std::vector<Eigen::MatrixXd>* prev_a[3] = {&prev.a1, &prev.a2, &prev.a3};
        const std::vector<Eigen::MatrixXd>* next_a[3] = {&next.a1, &next.a2, &next.a3};
        const std::size_t nn = nc * nc;
        std::vector<double> flat(npts * nn), dflat(npts * nn);
        for (int m = 0; m < 3; ++m) {
            for (std::size_t i = 0; i < npts; ++i) {
                std::copy_n((*cur_a[m])[i].data(), nn, &flat[i * nn]);
            }
            st.d(1).apply(flat, dflat, nn);
            dxi[m].resize(npts);
            deta[m].resize(npts);
            for (std::size_t i = 0; i < npts; ++i) {
                const Eigen::MatrixXd at = ((*next_a[m])[i] - (*prev_a[m])[i]) / h2;
                const Eigen::Map<const Eigen::MatrixXd> ax(&dflat[i * nn], n, n);
                dxi[m][i] = at + ax;
                deta[m][i] = at - ax;
            }
        }
    }

    // Second null derivatives for the low-order source terms.
    std::vector<double> uxixi, uetaeta;
    if (!high && !linear) {
        FieldState rate = s;
        solver_.compute_rhs(s, rate);
        const StencilSet st(npts, dx);
        std::vector<double> vx(s.v.size()), wx(s.w.size());
        st.d(1).apply(s.v, vx, nc);
        st.d(1).apply(s.w, wx, nc);
        uxixi.resize(s.v.size());
        uetaeta.resize(s.v.size());
        for (std::size_t k = 0; k < s.v.size(); ++k) {
            uxixi[k] = rate.v[k] + 2.0 * vx[k] + wx[k];
            uetaeta[k] = rate.v[k] - 2.0 * vx[k] + wx[k];
        }
    }

    std::vector<double> fe(npts), fq(npts), fqt(npts), fg(npts);
    Eigen::VectorXd a(n), b(n), axx(n), bee(n);
    double boundary = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        const double x = grid_.x(i);
        const double xi = 0.5 * (s.t + x), eta = 0.5 * (s.t - x);
        const auto [psi_e, dpsi_e] = weights_.psi_pair(eta);
        const auto [psi_x, dpsi_x] = weights_.psi_pair(xi);
        const double W_x = high ? weights_.phi(xi) : weights_.theta(xi);
        const double W_e = high ? weights_.phi(eta) : weights_.theta(eta);
        const double dW_x = high ? weights_.dphi(xi) : weights_.dtheta(xi);
        const double dW_e = high ? weights_.dphi(eta) : weights_.dtheta(eta);
        const double ce = psi_e * W_x;        // psi(eta) W(xi)
        const double cx = half * psi_x * W_e;  // psi(xi) W(eta), halved for the low order
        const double dce = dpsi_e * W_x;
        const double dcx = half * dpsi_x * W_e;
        const double de = psi_e * dW_x;
        const double dxw = half * psi_x * dW_e;
        for (std::size_t c = 0; c < nc; ++c) {
            a[c] = s.v[i * nc + c] + s.w[i * nc + c];
            b[c] = s.v[i * nc + c] - s.w[i * nc + c];
        }
        const double aa = a.squaredNorm(), bb = b.squaredNorm();
        double e = ce * aa + cx * bb;
        double pb = ce * aa - cx * bb;
        double q = -dce * aa - dcx * bb;
        double qt = 0.0, g = 0.0;
        if (!linear) {
            const auto& A1 = cur.a1[i];
            const auto& A2 = cur.a2[i];
            const auto& A3 = cur.a3[i];
            const auto& F = cur.f[i];
            if (high) {
                e += -ce * quad(a, A1, a) - ce * quad(a, A2, a) - 2.0 * ce * quad(a, A3, b) + ce * quad(b, A3, b) -
                     cx * quad(b, A1, b) - 2.0 * cx * quad(b, A2, a) + cx * quad(a, A2, a) - cx * quad(b, A3, b);
                pb += -ce * quad(a, A1, a) + ce * quad(a, A2, a) - 2.0 * ce * quad(a, A3, b) - ce * quad(b, A3, b) +
                      cx * quad(b, A1, b) + 2.0 * cx * quad(b, A2, a) + cx * quad(a, A2, a) - cx * quad(b, A3, b);
                qt = -dce * quad(a, A1, a) - 2.0 * dce * quad(a, A3, b) - de * quad(a, A2, a) + de * quad(b, A3, b) -
                     ce * quad(a, deta[0][i], a) - ce * quad(a, dxi[1][i], a) - 2.0 * ce * quad(a, deta[2][i], b) +
                     ce * quad(b, dxi[2][i], b) - dcx * quad(b, A1, b) - 2.0 * dcx * quad(b, A2, a) +
                     dxw * quad(a, A2, a) - dxw * quad(b, A3, b) - cx * quad(b, dxi[0][i], b) -
                     2.0 * cx * quad(b, dxi[1][i], a) + cx * quad(a, deta[1][i], a) - cx * quad(b, deta[2][i], b);
                g = 2.0 * ce * a.dot(F) + 2.0 * cx * b.dot(F);
            } else {
                for (std::size_t c = 0; c < nc; ++c) {
                    axx[c] = uxixi[i * nc + c];
                    bee[c] = uetaeta[i * nc + c];
                }
                e += -ce * quad(a, A1, a) - ce * quad(a, A2, a) - cx * quad(b, A1, b) - cx * quad(b, A3, b);
                pb += -ce * quad(a, A1, a) + ce * quad(a, A2, a) + cx * quad(b, A1, b) - cx * quad(b, A3, b);
                qt = -dce * quad(a, A1, a) - de * quad(a, A2, a) - ce * quad(a, deta[0][i], a) -
                     ce * quad(a, dxi[1][i], a) - dcx * quad(b, A1, b) - dxw * quad(b, A3, b) -
                     cx * quad(b, dxi[0][i], b) - cx * quad(b, deta[2][i], b);
                g = 2.0 * ce * quad(a, A3, bee) + 2.0 * cx * quad(b, A2, axx) + 2.0 * ce * a.dot(F) +
                    2.0 * cx * b.dot(F);
            }
        }
        fe[i] = e;
        fq[i] = q;
        fqt[i] = qt;
        fg[i] = g;
        if (i == 0) boundary = pb;
    }

    IdentitySample out;
    out.t = s.t;
    out.energy = composite_simpson(fe, dx);
    out.boundary = boundary;
    out.q = composite_simpson(fq, dx);
    out.q_tilde = composite_simpson(fqt, dx);
    out.source = composite_simpson(fg, dx);
    return out;
}

void IdentityMonitor::observe(const FieldState& s, long step) {
    levels_.push_back(make_level(s, step));
    if (levels_.size() > 3) levels_.pop_front();
    if (levels_.size() < 3) return;
    const Level& cur = levels_[1];
    if (cur.step < 0 || cur.step % stride_ != 0) return;
    samples_.push_back(evaluate(levels_[0], cur, levels_[2]));
}

void IdentityMonitor::finish(long) {
    residuals_.clear();
    if (samples_.empty()) return;
    const double h = stride_ * grid_.dt();
    std::vector<double> pb, qi, qt, gi;
    const IdentitySample& first = samples_.front();
    for (const auto& smp : samples_) {
        pb.push_back(smp.boundary);
        qi.push_back(smp.q);
        qt.push_back(smp.q_tilde);
        gi.push_back(smp.source);
        auto integral = [&](const std::vector<double>& f) {
            return f.size() < 2 ? 0.0 : composite_simpson(f, h);
        };
        IdentityResidual r;
        r.t = smp.t;
        r.lhs = smp.energy + integral(pb) + integral(qi);
        r.rhs = first.energy + integral(qt) + integral(gi);
        const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
        r.residual = scale > 0.0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
        residuals_.push_back(r);
    }
}

double IdentityMonitor::max_residual() const {
    double m = 0.0;
    for (const auto& r : residuals_) m = std::max(m, r.residual);
    return m;
}

// ---------------------------------------------------------------- flux monitor

FluxMonitor::FluxMonitor(const SystemSpec& spec, const Weights& weights) : spec_(spec), weights_(weights) {}

void FluxMonitor::observe(const FieldState& s, long step) {
    if (step < 0) return;
    const int n = spec_.n;
    Eigen::VectorXd u(n), a(n), b(n), w(n);
    for (int c = 0; c < n; ++c) {
        u[c] = s.u[static_cast<std::size_t>(c)];
        w[c] = s.w[static_cast<std::size_t>(c)];
        a[c] = s.v[static_cast<std::size_t>(c)] + s.w[static_cast<std::size_t>(c)];
        b[c] = s.v[static_cast<std::size_t>(c)] - s.w[static_cast<std::size_t>(c)];
    }
    const double xi = 0.5 * s.t, eta = 0.5 * s.t;
    const double psi_e = weights_.psi(eta), psi_x = weights_.psi(xi);
    const double ph_x = weights_.phi(xi), ph_e = weights_.phi(eta);
    const double th_x = weights_.theta(xi), th_e = weights_.theta(eta);
    const double aa = a.squaredNorm(), bb = b.squaredNorm(), ww = w.squaredNorm();

    CoefficientValues cv(n);
    evaluate_coefficients(spec_, u, a, b, cv);
    const double ce = psi_e * ph_x, cx = psi_x * ph_e;
    const double p = ce * aa - cx * bb;
    const double pt = -ce * quad(a, cv.a1, a) + ce * quad(a, cv.a2, a) - 2.0 * ce * quad(a, cv.a3, b) -
                      ce * quad(b, cv.a3, b) + cx * quad(b, cv.a1, b) + 2.0 * cx * quad(b, cv.a2, a) +
                      cx * quad(a, cv.a2, a) - cx * quad(b, cv.a3, b);

    const double le = psi_e * th_x, lx = 0.5 * psi_x * th_e;
    const double p_low = le * aa - lx * bb;
    const double pt_low =
        -le * quad(a, cv.a1, a) + le * quad(a, cv.a2, a) + lx * quad(b, cv.a1, b) - lx * quad(b, cv.a3, b);

    ++report_.samples;
    report_.high_max_abs = std::max(report_.high_max_abs, std::abs(p));
    report_.high_tilde_max_abs = std::max(report_.high_tilde_max_abs, std::abs(pt));
    if (!(std::abs(p) <= 1e-12 * std::max(1.0, ww))) ++report_.high_violations;
    const double sum = p_low + pt_low;
    report_.low_min_sum = std::min(report_.low_min_sum, sum);
    report_.low_min_margin = std::min(report_.low_min_margin, sum - 0.25 * psi_e * th_x * ww);
    if (!(sum >= -1e-10)) ++report_.low_violations;
}

nlohmann::json FluxReport::to_json() const {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"samples", samples},
            {"high_violations", high_violations},
            {"high_max_abs", high_max_abs},
            {"high_tilde_max_abs", high_tilde_max_abs},
            {"low_violations", low_violations},
            {"low_min_sum", finite_or_null(low_min_sum)},
            {"low_min_margin", finite_or_null(low_min_margin)},
            {"pass", pass()}};
}

// ---------------------------------------------------------------- diagnosed runs

double DiagnosedRun::Q() const { return sup_E.full[4] + cal.full[4] + sup_EE.full[3] + scr.full[3]; }

DiagnosedRun run_diagnosed(const SystemSpec& spec, const InitialData& data, const GridConfig& grid,
                           const Weights& weights, const DiagnosticOptions& opts) {
    DiagnosedRun out;
    out.data = data;
    EnergyMonitor energy(grid, weights, opts.energy_stride, step_count(grid));
    energy.add_hook(snapshot_checker(out.checks));
    if (opts.energy_csv) energy.set_csv(opts.energy_csv);
    FluxMonitor flux(spec, weights);
    std::vector<Observer*> observers{&energy, &flux};
    observers.insert(observers.end(), opts.extra.begin(), opts.extra.end());
    out.summary = run(spec, data, grid, observers, opts.run);
    out.snapshots = energy.snapshots();
    out.cal = energy.accumulator().cal();
    out.scr = energy.accumulator().scr();
    out.sup_E = energy.accumulator().sup_E();
    out.sup_EE = energy.accumulator().sup_EE();
    out.flux = flux.report();
    return out;
}

// ---------------------------------------------------------------- sweeps

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("fit_loglog: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw ConfigError("fit_loglog: need at least two positive points");
    const double den = m * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) throw ConfigError("fit_loglog: abscissae must differ");
    LinearFit f;
    f.slope = (m * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / m;
    return f;
}

namespace {

void require_decreasing(const std::vector<double>& eps, std::size_t min_points) {
    if (eps.size() < min_points) {
        throw ConfigError("epsilon ladder needs at least " + std::to_string(min_points) + " values");
    }
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw ConfigError("epsilon values must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("epsilon ladder must be strictly decreasing");
    }
}

unsigned sweep_threads(const SweepOptions& opts) { return opts.threads ? opts.threads : thread_limit(); }

}  // namespace

nlohmann::json SweepResult::to_json() const {
    nlohmann::json tb = nlohmann::json::array();
    for (const auto& t : t_blowup) tb.push_back(t ? nlohmann::json(*t) : nlohmann::json(nullptr));
    nlohmann::json chk = nlohmann::json::array(), fl = nlohmann::json::array();
    for (const auto& c : checks) chk.push_back(c.to_json());
    for (const auto& f : flux) fl.push_back(f.to_json());
    return {{"epsilons", epsilons}, {"Q", Q},           {"t_blowup", tb},     {"slope", slope},
            {"intercept", intercept}, {"verdict", verdict}, {"amplitudes", amplitudes},
            {"E4_initial", E4_initial}, {"sup_E4", sup_E4}, {"checks", chk},  {"flux", fl},
            {"notes", notes}};
}

SweepResult bootstrap_sweep(const SystemSpec& spec, const std::vector<double>& epsilons, const GridConfig& grid,
                            const SweepOptions& opts) {
    if (!check_null_conditions(spec, opts.null_check).all_pass()) {
        throw PreconditionError("model '" + spec.name + "' fails the null check; bootstrap sweep needs a null system");
    }
    require_decreasing(epsilons, 4);
    if (epsilons.front() > 0.02 + 1e-15) throw ConfigError("bootstrap ladder must have max epsilon <= 0.02");
    for (std::size_t i = 1; i < epsilons.size(); ++i) {
        if (std::abs(epsilons[i - 1] / epsilons[i] - 2.0) > 1e-9) {
            throw ConfigError("bootstrap ladder must be geometric with ratio 2");
        }
    }
    const Weights weights(WeightParams{opts.delta});
    const std::size_t m = epsilons.size();
    std::vector<DiagnosedRun> runs(m);
    parallel_for(
        m,
        [&](std::size_t i) {
            const InitialData data = make_initial_data(opts.family, epsilons[i], grid, spec.n, opts.delta, opts.shape);
            DiagnosticOptions dopts;
            dopts.energy_stride = opts.energy_stride;
            dopts.run = opts.run;
            std::ofstream csv;
            if (!opts.energy_csv_dir.empty()) {
                csv.open(opts.energy_csv_dir / ("energies_" + std::to_string(i) + ".csv"));
                if (!csv) throw ConfigError("cannot write energy CSV in " + opts.energy_csv_dir.string());
                dopts.energy_csv = &csv;
            }
            runs[i] = run_diagnosed(spec, data, grid, weights, dopts);
            if (runs[i].summary.blowup.detected) {
                throw CounterexampleError("null-certified model '" + spec.name + "' blew up at epsilon=" +
                                          std::to_string(epsilons[i]) +
                                          ", t=" + std::to_string(runs[i].summary.blowup.t_blowup) + " (" +
                                          runs[i].summary.blowup.detail + ")");
            }
        },
        sweep_threads(opts));

    SweepResult res;
    res.epsilons = epsilons;
    bool bounded = true;
    for (std::size_t i = 0; i < m; ++i) {
        const DiagnosedRun& r = runs[i];
        res.Q.push_back(r.Q());
        res.t_blowup.emplace_back(std::nullopt);
        res.amplitudes.push_back(r.data.amplitude);
        res.E4_initial.push_back(r.E4_initial());
        res.sup_E4.push_back(r.sup_E.full[4]);
        res.checks.push_back(r.checks);
        res.flux.push_back(r.flux);
        if (!(r.sup_E.full[4] <= kBootstrapGrowthCap * r.E4_initial())) {
            bounded = false;
            res.notes.push_back("sup E4 exceeds 10 E4(0) at epsilon=" + std::to_string(epsilons[i]));
        }
    }
    const LinearFit fit = fit_loglog(res.epsilons, res.Q);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    const bool slope_ok = std::abs(fit.slope - kBootstrapSlope) <= kBootstrapSlopeTol;
    if (!slope_ok) res.notes.push_back("slope outside 2 +/- 0.15");
    res.verdict = slope_ok && bounded ? "pass" : "fail";
    return res;
}

SweepResult blowup_sweep(const SystemSpec& spec, const std::vector<double>& epsilons, const GridConfig& grid,
                         const SweepOptions& opts) {
    if (check_null_conditions(spec, opts.null_check).all_pass()) {
        throw PreconditionError("model '" + spec.name + "' passes the null check; blow-up sweep needs a non-null system");
    }
    require_decreasing(epsilons, 3);
    const Weights weights(WeightParams{opts.delta});
    const std::size_t m = epsilons.size();
    std::vector<RunSummary> runs(m);
    std::vector<FluxReport> flux(m);
    std::vector<double> amps(m);
    parallel_for(
        m,
        [&](std::size_t i) {
            const InitialData data = make_initial_data(opts.family, epsilons[i], grid, spec.n, opts.delta, opts.shape);
            amps[i] = data.amplitude;
            FluxMonitor fm(spec, weights);
            Observer* obs[] = {&fm};
            runs[i] = run(spec, data, grid, obs, opts.run);
            flux[i] = fm.report();
        },
        sweep_threads(opts));

    SweepResult res;
    res.epsilons = epsilons;
    res.amplitudes = amps;
    res.flux = flux;
    std::vector<double> times;
    for (std::size_t i = 0; i < m; ++i) {
        if (runs[i].blowup.detected) {
            res.t_blowup.emplace_back(runs[i].blowup.t_blowup);
            times.push_back(runs[i].blowup.t_blowup);
        } else {
            res.t_blowup.emplace_back(std::nullopt);
            res.notes.push_back("no blow-up before T_final at epsilon=" + std::to_string(epsilons[i]));
        }
    }
    if (times.size() < m) {
        res.verdict = "inconclusive";
        return res;
    }
    const LinearFit fit = fit_loglog(epsilons, times);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += times[i] * epsilons[i];
    mean /= static_cast<double>(m);
    double spread = 0.0;
    for (std::size_t i = 0; i < m; ++i) spread = std::max(spread, std::abs(times[i] * epsilons[i] / mean - 1.0));
    res.notes.push_back("max relative deviation of t_blowup*epsilon from its mean: " + std::to_string(spread));
    res.verdict = spread <= kBlowupSpread ? "pass" : "fail";
    return res;
}

}  // namespace nullwave
