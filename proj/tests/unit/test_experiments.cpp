#include <doctest.h>

#include <cmath>

#include "nullwave/errors.hpp"
#include "nullwave/experiments.hpp"
#include "oracles.hpp"

using namespace nullwave;

TEST_CASE("log-log fit recovers an exact power law") {
    const std::vector<double> eps{0.02, 0.01, 0.005, 0.0025};
    std::vector<double> q;
    for (double e : eps) q.push_back(3.0 * e * e);
    const LinearFit f = fit_loglog(eps, q);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(fit_loglog({1.0, 1.0}, {1.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0}), ConfigError);
}

namespace {

const Weights& weights() {
    static const Weights w(WeightParams{0.5});
    return w;
}

double identity_residual(const std::string& model, double eps, int nx, double T, IdentityOrder order) {
    const GridConfig g{60, nx, 0.4, T};
    const SystemSpec spec = catalog_get(model);
    const InitialData d = make_initial_data("gaussian-bump", eps, g, spec.n, 0.5,
                                            DataShape{10.0, 1.0, Calibration::amplitude});
    IdentityMonitor mon(spec, g, weights(), order, 1);
    Observer* obs[] = {&mon};
    run(spec, d, g, obs);
    return mon.max_residual();
}

}  // namespace

TEST_CASE("the identity balances trivially for zero data") {
    CHECK(identity_residual("quasilinear-null", 0.0, 256, 2, IdentityOrder::high) == 0.0);
    CHECK(identity_residual("quasilinear-null", 0.0, 256, 2, IdentityOrder::low) == 0.0);
}

TEST_CASE("identity residuals shrink under refinement for every order and model") {
    for (auto order : {IdentityOrder::high, IdentityOrder::low}) {
        for (const char* model : {"linear", "semilinear-null", "quasilinear-null"}) {
            const double eps = std::string(model) == "quasilinear-null" ? 0.1 : 0.5;
            const double r1 = identity_residual(model, eps, 256, 6, order);
            const double r2 = identity_residual(model, eps, 512, 6, order);
            INFO(model << " " << (order == IdentityOrder::high ? "high" : "low") << ": " << r1 << " " << r2);
            CHECK(std::log2(r1 / r2) > 1.8);
            CHECK(r2 < 1e-2);
        }
    }
}

TEST_CASE("the low-order identity still converges after the pulses separate") {
    const double r1 = identity_residual("semilinear-null", 0.5, 256, 30, IdentityOrder::low);
    const double r2 = identity_residual("semilinear-null", 0.5, 512, 30, IdentityOrder::low);
    INFO(r1 << " " << r2);
    CHECK(std::log2(r1 / r2) > 3.0);
    CHECK(r2 < 1e-2);
}

TEST_CASE("identity sampling must be fine enough") {
    const GridConfig g{60, 256, 0.4, 5};
    CHECK_THROWS_AS(IdentityMonitor(catalog_get("linear"), g, weights(), IdentityOrder::high, 20), ResolutionError);
    CHECK_THROWS_AS(IdentityMonitor(catalog_get("linear"), g, weights(), IdentityOrder::high, 0), ConfigError);
}

TEST_CASE("boundary flux vanishes for the high order and is non-negative for the low order") {
    const GridConfig g{60, 512, 0.4, 20};
    for (const char* model : {"linear", "quasilinear-null", "wavemap-like"}) {
        const SystemSpec spec = catalog_get(model);
        const InitialData d =
            make_initial_data("gaussian-bump", 0.05, g, spec.n, 0.5, DataShape{8.0, 1.0, Calibration::amplitude});
        FluxMonitor fm(spec, weights());
        Observer* obs[] = {&fm};
        run(spec, d, g, obs);
        const FluxReport& r = fm.report();
        INFO(model << " " << r.to_json().dump());
        CHECK(r.pass());
        CHECK(r.samples == step_count(g) + 1);
        CHECK(r.high_max_abs == 0.0);
        CHECK(r.low_min_margin >= -1e-12);
    }
}

TEST_CASE("pointwise bound holds for a static gaussian and fails when the field is inflated") {
    const GridConfig g{60, 512, 0.4, 10};
    const InitialData d = make_initial_data("gaussian-bump", 1.0, g, 2, 0.5, DataShape{10.0, 1.0, Calibration::amplitude});
    EnergyMonitor mon(g, weights(), 1000, step_count(g));
    Observer* obs[] = {&mon};
    run(catalog_get("linear"), d, g, obs);
    REQUIRE_FALSE(mon.snapshots().empty());
    EnergySnapshot snap = mon.snapshots().front();
    CHECK(snap.t == 0.0);
    CHECK(pointwise_bound_holds(snap));
    CHECK(snap.u_sup < snap.bound_factor * std::sqrt(snap.E.full[1]));
    snap.u_sup *= 1e6;
    CHECK_FALSE(pointwise_bound_holds(snap));
    EnergySnapshot zero;
    CHECK(pointwise_bound_holds(zero));
}

TEST_CASE("diagnosed null runs pass every snapshot check") {
    const GridConfig g{60, 512, 0.4, 30};
    const SystemSpec spec = catalog_get("semilinear-null");
    const InitialData d = make_initial_data("gaussian-bump", 0.01, g, spec.n, 0.5);
    const DiagnosedRun r = run_diagnosed(spec, d, g, weights());
    INFO(r.checks.to_json().dump());
    CHECK(r.checks.pass());
    CHECK(r.checks.snapshots == static_cast<long>(r.snapshots.size()));
    CHECK(r.checks.split_max_rel <= SnapshotReport::kSplitTol);
    CHECK(r.checks.quadratic_ratio_finite);
    CHECK(r.flux.pass());
    CHECK(r.Q() > 0.0);
    CHECK(r.E4_initial() > 0.0);
    CHECK(r.snapshots.back().t == doctest::Approx(r.summary.t_end));
}

TEST_CASE("sweeps refuse the wrong class of system and malformed ladders") {
    const GridConfig g{140, 256, 0.4, 5};
    CHECK_THROWS_AS(bootstrap_sweep(catalog_get("nonnull-riccati"), {0.02, 0.01, 0.005, 0.0025}, g), PreconditionError);
    CHECK_THROWS_AS(blowup_sweep(catalog_get("semilinear-null"), {0.4, 0.2, 0.1}, g), PreconditionError);
    const SystemSpec null_spec = catalog_get("semilinear-null");
    CHECK_THROWS_AS(bootstrap_sweep(null_spec, {0.02, 0.01, 0.005}, g), ConfigError);
    CHECK_THROWS_AS(bootstrap_sweep(null_spec, {0.04, 0.02, 0.01, 0.005}, g), ConfigError);
    CHECK_THROWS_AS(bootstrap_sweep(null_spec, {0.02, 0.005, 0.00125, 0.0003125}, g), ConfigError);
    CHECK_THROWS_AS(bootstrap_sweep(null_spec, {0.0025, 0.005, 0.01, 0.02}, g), ConfigError);
    CHECK_THROWS_AS(blowup_sweep(catalog_get("nonnull-riccati"), {0.4, 0.2}, g), ConfigError);
}

TEST_CASE("a short bootstrap sweep scales like epsilon squared") {
    const GridConfig g{140, 512, 0.4, 10};
    const SweepResult r = bootstrap_sweep(catalog_get("quasilinear-null"), {0.02, 0.01, 0.005, 0.0025}, g);
    CHECK(r.verdict == "pass");
    CHECK(r.slope == doctest::Approx(2.0).epsilon(0.01));
    CHECK(r.Q.size() == 4);
    for (std::size_t i = 1; i < r.Q.size(); ++i) CHECK(r.Q[i] < r.Q[i - 1]);
    const auto j = r.to_json();
    for (const char* key : {"epsilons", "Q", "t_blowup", "slope", "intercept", "verdict"}) CHECK(j.contains(key));
    CHECK(j["t_blowup"][0].is_null());
}

TEST_CASE("Riccati blow-up times follow the characteristic oracle") {
    const GridConfig g{60, 1024, 0.4, 20};
    SweepOptions opts;
    opts.shape = DataShape{20.0, 1.0, Calibration::amplitude};
    const SweepResult r = blowup_sweep(catalog_get("nonnull-riccati"), {0.4, 0.2, 0.1}, g, opts);
    CHECK(r.verdict == "pass");
    CHECK(r.slope == doctest::Approx(-1.0).epsilon(0.05));
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(r.t_blowup[i].has_value());
        const double tb = oracle::riccati_blowup_time(r.epsilons[i], 1.0);
        CHECK(std::abs(*r.t_blowup[i] - tb) < 0.1 * tb);
    }
}

TEST_CASE("a blow-up sweep that stops too early is inconclusive") {
    const GridConfig g{60, 256, 0.4, 1.0};
    SweepOptions opts;
    opts.shape = DataShape{20.0, 1.0, Calibration::amplitude};
    const SweepResult r = blowup_sweep(catalog_get("nonnull-riccati"), {0.4, 0.2, 0.1}, g, opts);
    CHECK(r.verdict == "inconclusive");
    CHECK_FALSE(r.notes.empty());
}

TEST_CASE("a blow-up in a null-certified sweep is a counterexample") {
    const GridConfig g{140, 512, 0.4, 2};
    SweepOptions opts;
    opts.run.blowup_threshold = 1e-12;  // any nonzero data trips the detector
    CHECK_THROWS_AS(bootstrap_sweep(catalog_get("semilinear-null"), {0.02, 0.01, 0.005, 0.0025}, g, opts),
                    CounterexampleError);
}
