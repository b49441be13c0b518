#include "nullwave/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "nullwave/errors.hpp"
#include "nullwave/models.hpp"
#include "nullwave/parallel.hpp"
#include "nullwave/weights.hpp"

namespace nullwave {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, int line) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ParseError("malformed number '" + text + "'", line);
    }
    return v;
}

long long parse_integer(const std::string& text, int line) {
    long long v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed integer '" + text + "'", line);
    return v;
}

std::vector<double> parse_list(const std::string& text, int line) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(trim(item), line));
    if (out.empty()) throw ParseError("empty list", line);
    return out;
}

void require(bool ok, const std::string& what, int line) {
    if (!ok) throw ParseError(what, line);
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"model",
         [](RunConfig& c, const std::string& v, int line) {
             try {
                 catalog_get(v);
             } catch (const LookupError& e) {
                 throw ParseError(e.what(), line);
             }
             c.model = v;
         }},
        {"delta",
         [](RunConfig& c, const std::string& v, int line) {
             const double d = parse_real(v, line);
             require(d > 0.0 && d < 1.0, "delta must satisfy 0<δ<1 (got " + v + ")", line);
             c.delta = d;
         }},
        {"epsilon",
         [](RunConfig& c, const std::string& v, int line) {
             auto eps = parse_list(v, line);
             for (double e : eps) require(e > 0.0, "epsilon values must be positive", line);
             c.epsilon = std::move(eps);
             c.epsilon_given = true;
         }},
        {"L",
         [](RunConfig& c, const std::string& v, int line) {
             const double l = parse_real(v, line);
             require(l > 0.0, "L must be positive", line);
             c.grid.L = l;
         }},
        {"Nx",
         [](RunConfig& c, const std::string& v, int line) {
             const long long n = parse_integer(v, line);
             require(n >= 64 && n <= (1LL << 24), "Nx must lie in [64, 2^24]", line);
             c.grid.nx = static_cast<int>(n);
         }},
        {"cfl",
         [](RunConfig& c, const std::string& v, int line) {
             const double r = parse_real(v, line);
             require(r > 0.0 && r <= 0.5, "cfl must lie in (0, 0.5]", line);
             c.grid.cfl = r;
         }},
        {"T_final",
         [](RunConfig& c, const std::string& v, int line) {
             const double t = parse_real(v, line);
             require(t > 0.0, "T_final must be positive", line);
             c.grid.t_final = t;
         }},
        {"stride",
         [](RunConfig& c, const std::string& v, int line) {
             const long long s = parse_integer(v, line);
             require(s >= 1, "stride must be at least 1", line);
             c.stride = static_cast<long>(s);
         }},
        {"out",
         [](RunConfig& c, const std::string& v, int) { c.out = v; }},
        {"seed",
         [](RunConfig& c, const std::string& v, int line) {
             std::uint64_t s = 0;
             const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
             require(ec == std::errc() && ptr == v.data() + v.size(), "malformed seed '" + v + "'", line);
             c.seed = s;
         }},
        {"family",
         [](RunConfig& c, const std::string& v, int line) {
             require(v == "gaussian-bump" || v == "polynomial-bump",
                     "family must be gaussian-bump or polynomial-bump", line);
             c.family = v;
         }},
        {"center",
         [](RunConfig& c, const std::string& v, int line) {
             const double x = parse_real(v, line);
             require(x > 0.0, "center must be positive", line);
             c.shape.center = x;
         }},
        {"width",
         [](RunConfig& c, const std::string& v, int line) {
             const double w = parse_real(v, line);
             require(w > 0.0, "width must be positive", line);
             c.shape.width = w;
         }},
        {"calibration",
         [](RunConfig& c, const std::string& v, int line) {
             require(v == "norm" || v == "amplitude", "calibration must be norm or amplitude", line);
             c.shape.calibration = v == "norm" ? Calibration::norm : Calibration::amplitude;
         }},
        {"order",
         [](RunConfig& c, const std::string& v, int line) {
             require(v == "high" || v == "low", "order must be high or low", line);
             c.order = v == "high" ? IdentityOrder::high : IdentityOrder::low;
         }},
        {"identity_stride",
         [](RunConfig& c, const std::string& v, int line) {
             const long long s = parse_integer(v, line);
             require(s >= 1, "identity_stride must be at least 1", line);
             c.identity_stride = static_cast<long>(s);
         }},
        {"identity_tol",
         [](RunConfig& c, const std::string& v, int line) {
             const double t = parse_real(v, line);
             require(t > 0.0, "identity_tol must be positive", line);
             c.identity_tol = t;
         }},
        {"dump_stride",
         [](RunConfig& c, const std::string& v, int line) {
             const long long s = parse_integer(v, line);
             require(s >= 0, "dump_stride must be non-negative", line);
             c.dump_stride = static_cast<long>(s);
         }},
        {"blowup_threshold",
         [](RunConfig& c, const std::string& v, int line) {
             const double b = parse_real(v, line);
             require(b > 0.0, "blowup_threshold must be positive", line);
             c.blowup_threshold = b;
         }},
        {"closure",
         [](RunConfig& c, const std::string& v, int line) {
             require(v == "reflect" || v == "one-sided", "closure must be reflect or one-sided", line);
             c.closure = v == "reflect" ? BoundaryClosure::reflect : BoundaryClosure::one_sided;
         }},
        {"dissipation",
         [](RunConfig& c, const std::string& v, int line) {
             const double s = parse_real(v, line);
             require(s >= 0.0 && s <= 1.0, "dissipation must lie in [0, 1]", line);
             c.dissipation = s;
         }},
    };
    return table;
}

const char* order_name(IdentityOrder o) { return o == IdentityOrder::high ? "high" : "low"; }

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.precision(17);
    return out;
}

nlohmann::json blowup_json(const BlowupInfo& b) {
    return {{"detected", b.detected},
            {"t_blowup", b.detected ? nlohmann::json(b.t_blowup) : nlohmann::json(nullptr)},
            {"trigger", to_string(b.trigger)},
            {"detail", b.detail}};
}

nlohmann::json summary_json(const RunSummary& s) {
    return {{"nsteps", s.nsteps},   {"steps_taken", s.steps_taken},         {"dt", s.dt},
            {"t_end", s.t_end},     {"max_pq", s.max_pq},                   {"far_boundary_max", s.far_boundary_max},
            {"blowup", blowup_json(s.blowup)}};
}

RunOptions run_options(const RunConfig& c) {
    RunOptions o;
    o.blowup_threshold = c.blowup_threshold;
    o.closure = c.closure;
    o.dissipation = c.dissipation;
    return o;
}

SweepOptions sweep_options(const RunConfig& c) {
    SweepOptions o;
    o.family = c.family;
    o.shape = c.shape;
    o.delta = c.delta;
    o.energy_stride = c.stride;
    o.null_check.seed = c.seed;
    o.run = run_options(c);
    return o;
}

struct Context {
    const RunConfig& cfg;
    const std::filesystem::path& out;
    std::ostream& log;
    SystemSpec spec;
    Weights weights;

    InitialData data() const {
        return make_initial_data(cfg.family, cfg.epsilon.front(), cfg.grid, spec.n, cfg.delta, cfg.shape);
    }
};

int cmd_check_null(Context& c) {
    NullCheckOptions opts;
    opts.seed = c.cfg.seed;
    const NullVerdict v = check_null_conditions(c.spec, opts);
    const bool holds = v.all_pass();
    write_json(c.out / "verdict.json", {{"model", c.spec.name},
                                        {"declared_null", c.spec.declared_null},
                                        {"null_conditions_hold", holds},
                                        {"conditions", v.to_json()}});
    c.log << "check-null " << c.spec.name << ": null conditions " << (holds ? "hold" : "fail") << " (declared "
          << (c.spec.declared_null ? "null" : "non-null") << ")\n";
    return holds == c.spec.declared_null ? kExitPass : kExitFail;
}

int cmd_solve(Context& c) {
    const InitialData data = c.data();
    const CompatibilityReport compat = verify_compatibility(data, 1e-12);
    std::ofstream dump;
    std::unique_ptr<TrajectoryDump> dumper;
    std::vector<Observer*> observers;
    if (c.cfg.dump_stride > 0) {
        dump = open_csv(c.out / "trajectory.csv");
        dumper = std::make_unique<TrajectoryDump>(dump, c.cfg.grid, c.cfg.dump_stride);
        observers.push_back(dumper.get());
    }
    const RunSummary s = run(c.spec, data, c.cfg.grid, observers, run_options(c.cfg));
    nlohmann::json j = summary_json(s);
    j["model"] = c.spec.name;
    j["epsilon"] = c.cfg.epsilon.front();
    j["amplitude"] = data.amplitude;
    j["compatibility"] = {{"pass", compat.pass}, {"max_residual", compat.max_residual}};
    write_json(c.out / "summary.json", j);
    c.log << "solve " << c.spec.name << ": t_end=" << s.t_end
          << (s.blowup.detected ? " blow-up at t=" + std::to_string(s.blowup.t_blowup) : std::string(" no blow-up"))
          << '\n';
    return compat.pass ? kExitPass : kExitFail;
}

int cmd_energies(Context& c) {
    const InitialData data = c.data();
    std::ofstream csv = open_csv(c.out / "energies.csv");
    DiagnosticOptions opts;
    opts.energy_stride = c.cfg.stride;
    opts.energy_csv = &csv;
    opts.run = run_options(c.cfg);
    const DiagnosedRun r = run_diagnosed(c.spec, data, c.cfg.grid, c.weights, opts);
    const bool pass = r.checks.pass() && r.flux.pass();
    write_json(c.out / "energies.json", {{"model", c.spec.name},
                                         {"epsilon", c.cfg.epsilon.front()},
                                         {"amplitude", data.amplitude},
                                         {"Q", r.Q()},
                                         {"E4_initial", r.E4_initial()},
                                         {"sup_E4", r.sup_E.full[4]},
                                         {"calE4", r.cal.full[4]},
                                         {"sup_EE3", r.sup_EE.full[3]},
                                         {"scrE3", r.scr.full[3]},
                                         {"checks", r.checks.to_json()},
                                         {"flux", r.flux.to_json()},
                                         {"run", summary_json(r.summary)},
                                         {"pass", pass}});
    c.log << "energies " << c.spec.name << ": " << r.checks.snapshots << " snapshots, checks "
          << (pass ? "pass" : "FAIL") << '\n';
    return pass ? kExitPass : kExitFail;
}

int cmd_verify_identity(Context& c) {
    const InitialData data = c.data();
    IdentityMonitor ident(c.spec, c.cfg.grid, c.weights, c.cfg.order, c.cfg.identity_stride);
    FluxMonitor flux(c.spec, c.weights);
    Observer* observers[] = {&ident, &flux};
    const RunSummary s = run(c.spec, data, c.cfg.grid, observers, run_options(c.cfg));

    std::ofstream csv = open_csv(c.out / "identity.csv");
    csv << "t,energy,boundary,q,q_tilde,source,lhs,rhs,residual\n";
    const auto& samples = ident.samples();
    const auto& res = ident.residuals();
    for (std::size_t i = 0; i < res.size() && i < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& r = res[i];
        csv << a.t << ',' << a.energy << ',' << a.boundary << ',' << a.q << ',' << a.q_tilde << ',' << a.source << ','
            << r.lhs << ',' << r.rhs << ',' << r.residual << '\n';
    }
    const double worst = ident.max_residual();
    const bool pass = !s.blowup.detected && worst <= c.cfg.identity_tol && flux.report().pass();
    write_json(c.out / "identity.json", {{"model", c.spec.name},
                                         {"order", order_name(c.cfg.order)},
                                         {"final_residual", ident.final_residual()},
                                         {"max_residual", worst},
                                         {"tolerance", c.cfg.identity_tol},
                                         {"flux", flux.report().to_json()},
                                         {"run", summary_json(s)},
                                         {"pass", pass}});
    c.log << "verify-identity " << c.spec.name << " (" << order_name(c.cfg.order) << "): max residual " << worst
          << (pass ? " pass" : " FAIL") << '\n';
    return pass ? kExitPass : kExitFail;
}

int cmd_flux_check(Context& c) {
    const InitialData data = c.data();
    FluxMonitor flux(c.spec, c.weights);
    Observer* observers[] = {&flux};
    const RunSummary s = run(c.spec, data, c.cfg.grid, observers, run_options(c.cfg));
    const FluxReport& r = flux.report();
    nlohmann::json j = r.to_json();
    j["model"] = c.spec.name;
    j["run"] = summary_json(s);
    write_json(c.out / "flux.json", j);
    c.log << "flux-check " << c.spec.name << ": " << r.samples << " samples, "
          << r.high_violations + r.low_violations << " violations\n";
    return r.pass() ? kExitPass : kExitFail;
}

int cmd_sweep_bootstrap(Context& c) {
    const std::vector<double> ladder =
        c.cfg.epsilon_given ? c.cfg.epsilon : std::vector<double>{0.02, 0.01, 0.005, 0.0025};
    SweepOptions opts = sweep_options(c.cfg);
    opts.energy_csv_dir = c.out;
    try {
        SweepResult r = bootstrap_sweep(c.spec, ladder, c.cfg.grid, opts);
        nlohmann::json j = r.to_json();
        j["model"] = c.spec.name;
        write_json(c.out / "sweep.json", j);
        c.log << "sweep-bootstrap " << c.spec.name << ": slope " << r.slope << ", verdict " << r.verdict << '\n';
        return r.verdict == "pass" ? kExitPass : kExitFail;
    } catch (const CounterexampleError& e) {
        write_json(c.out / "sweep.json", {{"model", c.spec.name},
                                          {"epsilons", ladder},
                                          {"verdict", "counterexample"},
                                          {"notes", {e.what()}}});
        throw;
    }
}

int cmd_sweep_blowup(Context& c) {
    const std::vector<double> ladder = c.cfg.epsilon_given ? c.cfg.epsilon : std::vector<double>{0.4, 0.2, 0.1};
    SweepResult r = blowup_sweep(c.spec, ladder, c.cfg.grid, sweep_options(c.cfg));
    nlohmann::json j = r.to_json();
    j["model"] = c.spec.name;
    write_json(c.out / "sweep.json", j);
    c.log << "sweep-blowup " << c.spec.name << ": verdict " << r.verdict << '\n';
    return r.verdict == "fail" ? kExitFail : kExitPass;
}

using Command = int (*)(Context&);

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table{
        {"check-null", cmd_check_null},           {"solve", cmd_solve},
        {"energies", cmd_energies},               {"verify-identity", cmd_verify_identity},
        {"flux-check", cmd_flux_check},           {"sweep-bootstrap", cmd_sweep_bootstrap},
        {"sweep-blowup", cmd_sweep_blowup},
    };
    return table;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    return {{"model", model},
            {"delta", delta},
            {"epsilon", epsilon},
            {"L", grid.L},
            {"Nx", grid.nx},
            {"cfl", grid.cfl},
            {"T_final", grid.t_final},
            {"stride", stride},
            {"out", out},
            {"seed", seed},
            {"family", family},
            {"center", shape.center},
            {"width", shape.width},
            {"calibration", shape.calibration == Calibration::norm ? "norm" : "amplitude"},
            {"order", order_name(order)},
            {"identity_stride", identity_stride},
            {"identity_tol", identity_tol},
            {"dump_stride", dump_stride},
            {"blowup_threshold", blowup_threshold},
            {"closure", closure == BoundaryClosure::reflect ? "reflect" : "one-sided"},
            {"dissipation", dissipation}};
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ParseError("unknown key '" + key + "'", line);
        if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line);
        if (value.empty()) throw ParseError("missing value for '" + key + "'", line);
        it->second(cfg, value, line);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"check-null",      "solve",           "energies",    "verify-identity",
                                                "flux-check",      "sweep-bootstrap", "sweep-blowup"};
    return names;
}

int dispatch(const std::string& subcommand, const RunConfig& config, const std::filesystem::path& out_dir,
             std::ostream& log) {
    const auto it = commands().find(subcommand);
    if (it == commands().end()) {
        log << "error: unknown subcommand '" << subcommand << "'\n";
        return kExitConfig;
    }

    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    int status = kExitPass;
    std::string error;
    try {
        std::filesystem::create_directories(out_dir);
        write_json(out_dir / "config.json", config.to_json());
        Context ctx{config, out_dir, log, catalog_get(config.model), Weights(WeightParams{config.delta})};
        status = it->second(ctx);
    } catch (const ConfigError& e) {
        status = kExitConfig;
        error = e.what();
    } catch (const LookupError& e) {
        status = kExitConfig;
        error = e.what();
    } catch (const ResolutionError& e) {
        status = kExitConfig;
        error = e.what();
    } catch (const std::filesystem::filesystem_error& e) {
        status = kExitConfig;
        error = e.what();
    } catch (const std::exception& e) {
        status = kExitFail;
        error = e.what();
    }
    if (!error.empty()) log << "error: " << error << '\n';

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        write_json(out_dir / "metadata.json", {{"subcommand", subcommand},
                                               {"started_utc", started},
                                               {"finished_utc", utc_now()},
                                               {"elapsed_seconds", elapsed},
                                               {"threads", thread_limit()},
                                               {"exit_status", status},
                                               {"error", error.empty() ? nlohmann::json(nullptr) : nlohmann::json(error)}});
    } catch (const std::exception&) {
        // the output directory itself is unusable; the status already says so
    }
    return status;
}

}  // namespace nullwave
