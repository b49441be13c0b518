#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "nullwave/errors.hpp"
#include "nullwave/solver.hpp"
#include "oracles.hpp"

using namespace nullwave;

namespace {

const DataShape kShape{20.0, 2.0, Calibration::amplitude};

oracle::HalfLineWave gaussian_wave() {
    return {[](double x, int l) { return oracle::gaussian_derivative(x, 20.0, 2.0, l); }};
}

// Max error of u against the reflected d'Alembert solution at T.
double linear_error(int nx, double T) {
    const GridConfig g{60, nx, 0.4, T};
    const SystemSpec spec = catalog_get("linear");
    const InitialData d = make_initial_data("gaussian-bump", 1.0, g, 2, 0.5, kShape);
    const RunSummary r = run(spec, d, g, {});
    const auto wave = gaussian_wave();
    double err = 0.0;
    for (std::size_t i = 0; i < g.npts(); ++i) {
        for (std::size_t c = 0; c < 2; ++c) {
            err = std::max(err, std::abs(r.final_state.u[i * 2 + c] - wave.u(r.t_end, g.x(i))));
        }
    }
    return err;
}

// Records every observed step index and time.
struct Recorder : Observer {
    int depth = 0, ahead = 0;
    std::vector<long> steps;
    std::vector<double> times;
    long finished = -99;
    int history_depth() const override { return depth; }
    int lookahead() const override { return ahead; }
    void observe(const FieldState& s, long step) override {
        steps.push_back(step);
        times.push_back(s.t);
    }
    void finish(long last) override { finished = last; }
};

}  // namespace

TEST_CASE("linear evolution converges to the reflected d'Alembert solution") {
    const double e1 = linear_error(256, 16), e2 = linear_error(512, 16), e3 = linear_error(1024, 16);
    INFO(e1 << " " << e2 << " " << e3);
    CHECK(std::log2(e1 / e2) > 3.5);
    CHECK(std::log2(e2 / e3) > 3.5);
    CHECK(e3 < 1e-4);
}

TEST_CASE("initial state and null derivatives") {
    const GridConfig g{60, 512, 0.4, 10};
    const InitialData d = make_initial_data("gaussian-bump", 1.0, g, 2, 0.5, kShape);
    const FieldState s = initial_state(d, g);
    CHECK(s.t == 0.0);
    CHECK(s.npts() == g.npts());
    const std::size_t i = 300;
    CHECK(s.w[2 * i] == doctest::Approx(oracle::gaussian_derivative(g.x(i), 20.0, 2.0, 1)).epsilon(1e-6));
    const auto [p, q] = to_null_derivatives(s);
    CHECK(p[2 * i] == doctest::Approx(s.v[2 * i] + s.w[2 * i]));
    CHECK(q[2 * i] == doctest::Approx(s.v[2 * i] - s.w[2 * i]));
}

TEST_CASE("a forward step undone by a backward step returns the state") {
    const GridConfig g{60, 512, 0.4, 10};
    const SystemSpec spec = catalog_get("quasilinear-null");
    const InitialData d = make_initial_data("gaussian-bump", 0.05, g, 2, 0.5, kShape);
    FieldState s = initial_state(d, g);
    const FieldState s0 = s;
    const Solver solver(spec, g);
    for (int k = 0; k < 5; ++k) solver.step(s, g.dt());
    for (int k = 0; k < 5; ++k) solver.step(s, -g.dt());
    double err = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) err = std::max(err, std::abs(s.u[i] - s0.u[i]));
    CHECK(err < 1e-9);
    CHECK(s.t == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("linear energy is conserved and the ends stay pinned") {
    const GridConfig g{60, 512, 0.4, 20};
    const InitialData d = make_initial_data("gaussian-bump", 1.0, g, 2, 0.5, kShape);
    auto energy = [&](const FieldState& s) {
        double e = 0.0;
        for (std::size_t i = 0; i < s.u.size(); ++i) e += s.v[i] * s.v[i] + s.w[i] * s.w[i];
        return e * g.dx();
    };
    const double e0 = energy(initial_state(d, g));
    const RunSummary r = run(catalog_get("linear"), d, g, {});
    CHECK(energy(r.final_state) == doctest::Approx(e0).epsilon(1e-4));
    CHECK(r.final_state.u[0] == 0.0);
    CHECK(r.final_state.v[0] == 0.0);
    CHECK(r.far_boundary_max < 1e-12);
    CHECK_FALSE(r.blowup.detected);
    CHECK(r.t_end == doctest::Approx(r.nsteps * r.dt));
    CHECK(r.t_end >= 20.0);
}

TEST_CASE("zero data stays zero") {
    const GridConfig g{60, 256, 0.4, 5};
    const InitialData d = make_initial_data("gaussian-bump", 0.0, g, 2, 0.5, kShape);
    const RunSummary r = run(catalog_get("quasilinear-null"), d, g, {});
    for (double v : r.final_state.u) CHECK(v == 0.0);
    CHECK(r.max_pq == 0.0);
}

TEST_CASE("damping removes the sawtooth mode the centered stencil cannot see") {
    const GridConfig g{60, 256, 0.4, 5};
    FieldState s;
    s.n = 1;
    s.u.assign(g.npts(), 0.0);
    s.v.assign(g.npts(), 0.0);
    s.w.assign(g.npts(), 0.0);
    for (std::size_t i = 0; i < g.npts(); ++i) s.w[i] = (i % 2 ? -1e-3 : 1e-3);
    SystemSpec spec = catalog_get("linear");
    spec.n = 1;
    FieldState kept = s, damped = s;
    const Solver plain(spec, g, BoundaryClosure::reflect, 0.0);
    const Solver damping(spec, g, BoundaryClosure::reflect, kDefaultDissipation);
    for (int k = 0; k < 100; ++k) {
        plain.step(kept, g.dt());
        damping.step(damped, g.dt());
    }
    CHECK(std::abs(kept.w[g.npts() / 2]) == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(std::abs(damped.w[g.npts() / 2]) < 1e-3 * std::exp(-3.0));
    CHECK_THROWS_AS(Solver(spec, g, BoundaryClosure::reflect, -1.0), ConfigError);
}

TEST_CASE("nothing outruns the semilinear pulse") {
    const GridConfig g{90, 660, 0.4, 50};
    const DataShape shape{10.0, 1.0, Calibration::amplitude};
    const InitialData d = make_initial_data("gaussian-bump", 0.02, g, 2, 0.5, shape);
    const RunSummary r = run(catalog_get("semilinear-null"), d, g, {});
    double ahead = 0.0;
    for (std::size_t i = 0; i < g.npts(); ++i) {
        if (g.x(i) < r.t_end + 20.0) continue;
        for (std::size_t c = 0; c < 2; ++c) ahead = std::max(ahead, std::abs(r.final_state.u[i * 2 + c]));
    }
    CHECK(ahead < 1e-14);
}

TEST_CASE("observers see history, the run and the lookahead in order") {
    const GridConfig g{60, 256, 0.4, 1.0};
    const InitialData d = make_initial_data("gaussian-bump", 0.1, g, 2, 0.5, kShape);
    Recorder rec;
    rec.depth = 2;
    rec.ahead = 3;
    Observer* obs[] = {&rec};
    const RunSummary r = run(catalog_get("linear"), d, g, obs);
    REQUIRE(rec.steps.size() == static_cast<std::size_t>(r.nsteps + 6));
    Recorder plain;
    Observer* both[] = {&rec, &plain};
    rec.steps.clear();
    rec.times.clear();
    run(catalog_get("linear"), d, g, both);
    CHECK(plain.steps.front() == 0);
    CHECK(plain.steps.back() == r.nsteps);
    CHECK(rec.steps.size() == static_cast<std::size_t>(r.nsteps + 6));
    for (std::size_t k = 0; k < rec.steps.size(); ++k) {
        CHECK(rec.steps[k] == static_cast<long>(k) - 2);
        CHECK(rec.times[k] == doctest::Approx(rec.steps[k] * g.dt()).epsilon(1e-12));
    }
    CHECK(rec.finished == r.nsteps);
    CHECK(step_count(g) == r.nsteps);
}

TEST_CASE("a Riccati system blows up near the characteristic time") {
    const GridConfig g{60, 1024, 0.4, 10};
    const DataShape shape{20.0, 1.0, Calibration::amplitude};
    const InitialData d = make_initial_data("gaussian-bump", 0.4, g, 1, 0.5, shape);
    Recorder rec;
    rec.ahead = 2;
    Observer* obs[] = {&rec};
    const RunSummary r = run(catalog_get("nonnull-riccati"), d, g, obs);
    REQUIRE(r.blowup.detected);
    const double tb = oracle::riccati_blowup_time(0.4, 1.0);
    CHECK(std::abs(r.blowup.t_blowup - tb) < 0.05 * tb);
    CHECK(to_string(r.blowup.trigger) != "none");
    CHECK(rec.finished < r.nsteps);
}

TEST_CASE("a non-null A2 system leaves the hyperbolic regime") {
    const GridConfig g{60, 1024, 0.4, 25};
    const DataShape shape{20.0, 1.0, Calibration::amplitude};
    const InitialData d = make_initial_data("gaussian-bump", 3.0, g, 2, 0.5, shape);
    const RunSummary r = run(catalog_get("nonnull-a2"), d, g, {});
    CHECK(r.blowup.detected);
}

TEST_CASE("trajectory dump writes the header and the sampled rows") {
    const GridConfig g{60, 64, 0.4, 3};
    const InitialData d = make_initial_data("gaussian-bump", 0.1, g, 2, 0.5, DataShape{25.0, 2.0, Calibration::amplitude});
    std::ostringstream os;
    TrajectoryDump dump(os, g, 4);
    Observer* obs[] = {&dump};
    const RunSummary r = run(catalog_get("linear"), d, g, obs);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,component,u,v,w");
    long rows = 0;
    while (std::getline(in, line)) ++rows;
    const long samples = r.nsteps / 4 + 1;
    CHECK(rows == samples * static_cast<long>(g.npts()) * 2);
}
