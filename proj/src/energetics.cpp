#include "nullwave/energetics.hpp"

#include <cmath>
#include <ostream>

#include "nullwave/errors.hpp"
#include "nullwave/quadrature.hpp"

namespace nullwave {

void TimeWindow::push(const FieldState& s) {
    if (!states_.empty()) {
        const double prev = states_.back().t;
        if (!(s.t > prev)) throw SequencingError("time window: states must have increasing times");
        if (states_.size() >= 2) {
            const double h = prev - states_[states_.size() - 2].t;
            if (std::abs((s.t - prev) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
                throw SequencingError("time window: nonuniform spacing");
            }
        }
        if (states_.front().n != s.n || states_.front().u.size() != s.u.size()) {
            throw SequencingError("time window: state layout changed");
        }
    }
    states_.push_back(s);
    if (states_.size() > kWindowSize) states_.pop_front();
}

const FieldState& TimeWindow::at(int offset) const {
    if (!full()) throw StagingError("time window incomplete");
    if (offset < -kWindowLag || offset > kWindowLag) throw StagingError("window offset out of range");
    return states_[static_cast<std::size_t>(kWindowLag + offset)];
}

double TimeWindow::center_time() const { return at(0).t; }

double TimeWindow::spacing() const {
    if (!full()) throw StagingError("time window incomplete");
    return (states_.back().t - states_.front().t) / static_cast<double>(kWindowSize - 1);
}

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

void assemble_null_derivatives(DerivativeStack& st) {
    const std::size_t m = st.npts * static_cast<std::size_t>(st.n);
    for (int i = 0; i <= kMaxOrder; ++i) {
        for (int j = 0; i + j <= kMaxOrder; ++j) {
            auto& out = st.z[i][j];
            out.assign(m, 0.0);
            // (T + X)^i (T - X)^j: X^r from the first factor, X^s from the second.
            for (int r = 0; r <= i; ++r) {
                for (int s = 0; s <= j; ++s) {
                    const double c = binom(i, r) * binom(j, s) * (s % 2 ? -1.0 : 1.0);
                    const auto& src = st.mixed[i + j - r - s][r + s];
                    for (std::size_t k = 0; k < m; ++k) out[k] += c * src[k];
                }
            }
        }
    }
    for (int l = 0; l < kMaxOrder; ++l) {
        st.dt_xi[l].assign(m, 0.0);
        st.dt_eta[l].assign(m, 0.0);
        const auto& a = st.mixed[l + 1][0];
        const auto& b = st.mixed[l][1];
        for (std::size_t k = 0; k < m; ++k) {
            st.dt_xi[l][k] = a[k] + b[k];
            st.dt_eta[l][k] = a[k] - b[k];
        }
    }
}

DerivativeStack build_stack(const TimeWindow& window, const StencilSet& stencils) {
    if (!window.full()) throw StagingError("derivative stack needs a full 7-level window");
    const FieldState& c = window.at(0);
    const double h = window.spacing();
    const std::size_t m = c.u.size();
    const auto nc = static_cast<std::size_t>(c.n);

    DerivativeStack st;
    st.t = c.t;
    st.n = c.n;
    st.npts = c.npts();
    st.dx = stencils.spacing();
    if (stencils.size() != st.npts) throw ConfigError("stencil set does not match the state grid");

    // d_t^l v at the centre, l = 0..3.
    std::array<std::vector<double>, kMaxOrder> vt;
    const auto& vm2 = window.at(-2).v;
    const auto& vm1 = window.at(-1).v;
    const auto& v0 = c.v;
    const auto& vp1 = window.at(1).v;
    const auto& vp2 = window.at(2).v;
    vt[0] = v0;
    for (auto* arr : {&vt[1], &vt[2], &vt[3]}) arr->resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        vt[1][k] = (vp1[k] - vm1[k]) / (2.0 * h);
        vt[2][k] = (vp1[k] - 2.0 * v0[k] + vm1[k]) / (h * h);
        vt[3][k] = (vp2[k] - 2.0 * vp1[k] + 2.0 * vm1[k] - vm2[k]) / (2.0 * h * h * h);
    }

    auto spatial = [&](const std::vector<double>& f, int order) {
        if (order == 0) return f;
        std::vector<double> out(m);
        stencils.d(order).apply(f, out, nc);
        return out;
    };
    st.mixed[0][0] = c.u;
    for (int b = 1; b <= kMaxOrder; ++b) st.mixed[0][b] = spatial(c.w, b - 1);
    for (int a = 1; a <= kMaxOrder; ++a) {
        for (int b = 0; a + b <= kMaxOrder; ++b) st.mixed[a][b] = spatial(vt[a - 1], b);
    }
    assemble_null_derivatives(st);
    return st;
}

namespace {

enum WeightKind { kPhiXi, kPhiEta, kThetaXi, kThetaEta, kCalXi, kCalEta, kScrXi, kScrEta, kNumWeights };

EnergyFamily assemble_family(
    const std::array<std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1>, kNumWeights>& I,
    const std::array<std::array<double, kMaxOrder>, kNumWeights>& T, int wx, int we) {
    EnergyFamily f;
    for (int k = 1; k <= kMaxOrder; ++k) {
        double full = 0.0;
        for (int a1 = 0; a1 <= k - 1; ++a1) {
            for (int a2 = 0; a1 + a2 <= k - 1; ++a2) full += I[wx][a1 + 1][a2] + I[we][a1][a2 + 1];
        }
        f.full[k] = full;
        double tilde = 0.0;
        for (int l = 0; l <= k - 1; ++l) tilde += T[wx][l] + T[we][l];
        f.tilde[k] = tilde;
        if (k >= 2) {
            double bar = 0.0, barbar = 0.0;
            for (int l = 0; l <= k - 1; ++l) bar += I[wx][l + 1][0] + I[we][0][l + 1];
            for (int b1 = 0; b1 <= k - 2; ++b1) {
                for (int b2 = 0; b1 + b2 <= k - 2; ++b2) {
                    barbar += I[wx][b1 + 1][b2 + 1] + I[we][b1 + 1][b2 + 1];
                }
            }
            f.bar[k] = bar;
            f.barbar[k] = barbar;
        }
    }
    return f;
}

}  // namespace

EnergySnapshot energy_snapshot(const DerivativeStack& st, const Weights& weights) {
    const std::size_t npts = st.npts;
    const auto nc = static_cast<std::size_t>(st.n);
    const double delta = weights.delta();

    std::array<std::vector<double>, kNumWeights> wt;
    for (auto& v : wt) v.resize(npts);
    std::vector<double> inv_xi(npts), inv_eta(npts), bxi(npts), beta(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const double x = st.x(i);
        const double xi = 0.5 * (st.t + x), eta = 0.5 * (st.t - x);
        const double b2x = 1.0 + xi * xi, b2e = 1.0 + eta * eta;
        const double phx = std::pow(b2x, 1.0 + delta), phe = std::pow(b2e, 1.0 + delta);
        const double crx = std::pow(b2x, -0.5 * (1.0 + delta)), cre = std::pow(b2e, -0.5 * (1.0 + delta));
        wt[kPhiXi][i] = phx;
        wt[kPhiEta][i] = phe;
        wt[kThetaXi][i] = phx * phx * phx;
        wt[kThetaEta][i] = phe * phe * phe;
        wt[kCalXi][i] = cre * phx;
        wt[kCalEta][i] = crx * phe;
        wt[kScrXi][i] = cre * phx * phx * phx;
        wt[kScrEta][i] = crx * phe * phe * phe;
        inv_xi[i] = crx * crx;  // <xi>^{-2-2 delta}
        inv_eta[i] = cre * cre;
        bxi[i] = std::sqrt(phx);  // <xi>^{1+delta}
        beta[i] = std::sqrt(phe);
    }

    std::vector<double> sq(npts), integrand(npts);
    auto squared = [&](const std::vector<double>& f) {
        for (std::size_t i = 0; i < npts; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < nc; ++c) s += f[i * nc + c] * f[i * nc + c];
            sq[i] = s;
        }
    };
    auto integrate = [&](int w) {
        for (std::size_t i = 0; i < npts; ++i) integrand[i] = wt[w][i] * sq[i];
        return composite_simpson(integrand, st.dx);
    };

    std::array<std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1>, kNumWeights> I{};
    std::array<std::array<double, kMaxOrder>, kNumWeights> T{};
    for (int i = 0; i <= kMaxOrder; ++i) {
        for (int j = 0; i + j <= kMaxOrder; ++j) {
            if (i + j == 0) continue;
            squared(st.z[i][j]);
            for (int w = 0; w < kNumWeights; ++w) I[w][i][j] = integrate(w);
        }
    }
    for (int l = 0; l < kMaxOrder; ++l) {
        squared(st.dt_xi[l]);
        for (int w : {kPhiXi, kThetaXi, kCalXi, kScrXi}) T[w][l] = integrate(w);
        squared(st.dt_eta[l]);
        for (int w : {kPhiEta, kThetaEta, kCalEta, kScrEta}) T[w][l] = integrate(w);
    }

    EnergySnapshot snap;
    snap.t = st.t;
    snap.E = assemble_family(I, T, kPhiXi, kPhiEta);
    snap.EE = assemble_family(I, T, kThetaXi, kThetaEta);
    snap.cal_rate = assemble_family(I, T, kCalXi, kCalEta);
    snap.scr_rate = assemble_family(I, T, kScrXi, kScrEta);

    for (double val : st.z[0][0]) snap.u_sup = std::max(snap.u_sup, std::abs(val));
    snap.bound_factor = std::sqrt(composite_simpson(inv_xi, st.dx)) + std::sqrt(composite_simpson(inv_eta, st.dx));

    // Weighted sup norms of Z^a u_xi, Z^a u_eta for |a| <= k - 2.
    auto sup_weighted = [&](const std::vector<double>& f, const std::vector<double>& w) {
        double best = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < nc; ++c) s += f[i * nc + c] * f[i * nc + c];
            best = std::max(best, w[i] * std::sqrt(s));
        }
        return best;
    };
    for (int k = 2; k <= kMaxOrder; ++k) {
        double total = 0.0;
        for (int a1 = 0; a1 <= k - 2; ++a1) {
            for (int a2 = 0; a1 + a2 <= k - 2; ++a2) {
                total += sup_weighted(st.z[a1 + 1][a2], bxi) + sup_weighted(st.z[a1][a2 + 1], beta);
            }
        }
        snap.weighted_sup[k] = total;
    }
    return snap;
}

namespace {

void add_scaled(EnergyFamily& acc, const EnergyFamily& a, const EnergyFamily& b, double h) {
    for (int k = 0; k <= kMaxOrder; ++k) {
        acc.full[k] += 0.5 * h * (a.full[k] + b.full[k]);
        acc.bar[k] += 0.5 * h * (a.bar[k] + b.bar[k]);
        acc.barbar[k] += 0.5 * h * (a.barbar[k] + b.barbar[k]);
        acc.tilde[k] += 0.5 * h * (a.tilde[k] + b.tilde[k]);
    }
}

void max_into(EnergyFamily& acc, const EnergyFamily& a) {
    for (int k = 0; k <= kMaxOrder; ++k) {
        acc.full[k] = std::max(acc.full[k], a.full[k]);
        acc.bar[k] = std::max(acc.bar[k], a.bar[k]);
        acc.barbar[k] = std::max(acc.barbar[k], a.barbar[k]);
        acc.tilde[k] = std::max(acc.tilde[k], a.tilde[k]);
    }
}

}  // namespace

void SpaceTimeAccumulator::add(const EnergySnapshot& snap) {
    if (started_) {
        if (snap.t < t_) throw SequencingError("accumulator: snapshot earlier than the previous one");
        const double h = snap.t - t_;
        if (h > 0.0) {
            add_scaled(cal_, last_.cal_rate, snap.cal_rate, h);
            add_scaled(scr_, last_.scr_rate, snap.scr_rate, h);
        }
    }
    max_into(sup_E_, snap.E);
    max_into(sup_EE_, snap.EE);
    last_ = snap;
    t_ = snap.t;
    started_ = true;
}

const char* energy_csv_header() {
    return "t,E1,E2,E3,E4,EE1,EE2,EE3,calE4,scrE3,supE4,supEE3,EE4,calE1,calE2,calE3,scrE1,scrE2,"
           "barE4,barbarE4,tildeE4,barEE3,barbarEE3,tildeEE3,u_sup,bound_factor,quadratic_ratio,"
           "wsup_ratio2,wsup_ratio3,wsup_ratio4";
}

EnergyMonitor::EnergyMonitor(const GridConfig& grid, const Weights& weights, long stride, long nsteps)
    : grid_(grid), weights_(weights), stencils_(grid.npts(), grid.dx()), stride_(stride), nsteps_(nsteps) {
    if (stride_ < 1) throw ConfigError("energy stride must be positive");
}

void EnergyMonitor::set_csv(std::ostream* out) {
    csv_ = out;
    if (csv_) {
        csv_->precision(17);
        *csv_ << energy_csv_header() << '\n';
    }
}

void EnergyMonitor::observe(const FieldState& s, long step) {
    window_.push(s);
    if (!window_.full()) return;
    const long center = step - kWindowLag;
    if (center < 0 || center > nsteps_) return;
    if (center % stride_ != 0 && center != nsteps_) return;

    const DerivativeStack stack = build_stack(window_, stencils_);
    const EnergySnapshot snap = energy_snapshot(stack, weights_);
    acc_.add(snap);
    snaps_.push_back(snap);
    for (auto& hook : hooks_) hook(snap, stack, acc_);

    if (csv_) {
        auto& o = *csv_;
        const double e4 = snap.E.full[4];
        auto ratio = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
        o << snap.t;
        for (int k = 1; k <= 4; ++k) o << ',' << snap.E.full[k];
        for (int k = 1; k <= 3; ++k) o << ',' << snap.EE.full[k];
        o << ',' << acc_.cal().full[4] << ',' << acc_.scr().full[3] << ',' << acc_.sup_E().full[4] << ','
          << acc_.sup_EE().full[3] << ',' << snap.EE.full[4];
        for (int k = 1; k <= 3; ++k) o << ',' << acc_.cal().full[k];
        for (int k = 1; k <= 2; ++k) o << ',' << acc_.scr().full[k];
        o << ',' << snap.E.bar[4] << ',' << snap.E.barbar[4] << ',' << snap.E.tilde[4] << ',' << snap.EE.bar[3]
          << ',' << snap.EE.barbar[3] << ',' << snap.EE.tilde[3] << ',' << snap.u_sup << ','
          << snap.bound_factor << ',' << ratio(snap.E.barbar[4], e4 * e4);
        for (int k = 2; k <= 4; ++k) o << ',' << ratio(snap.weighted_sup[k], std::sqrt(snap.E.full[k]));
        o << '\n';
    }
}

}  // namespace nullwave
