#include "nullwave/models.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "nullwave/errors.hpp"
#include "nullwave/parallel.hpp"

namespace nullwave {

namespace {

MatrixField zero_matrix() {
    return [](ConstVecRef, ConstVecRef, ConstVecRef, MatOut out) { out.setZero(); };
}

VectorField zero_vector() {
    return [](ConstVecRef, ConstVecRef, ConstVecRef, VecOut out) { out.setZero(); };
}

// Symmetric 2x2 matrices of spectral norm 1/2.
Eigen::Matrix2d quasilinear_b() {
    Eigen::Matrix2d b;
    b << 0.5, 0.0, 0.0, -0.25;
    return b;
}

Eigen::Matrix2d quasilinear_c() {
    Eigen::Matrix2d c;
    c << 0.25, 0.25, 0.25, 0.25;
    return c;
}

// Constant interaction coefficients: gamma[i](j, k) multiplies p_j q_k in F_i.
std::array<Eigen::Matrix2d, 2> wavemap_gamma() {
    Eigen::Matrix2d g0, g1;
    g0 << 0.0, 0.5, 0.5, 0.0;
    g1 << -0.5, 0.0, 0.0, 0.5;
    return {g0, g1};
}

std::string format_point(ConstVecRef u, ConstVecRef p, ConstVecRef q) {
    std::ostringstream os;
    os.precision(17);
    auto dump = [&](const char* name, ConstVecRef v) {
        os << name << "=(";
        for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << ")";
    };
    dump("u", u);
    os << " ";
    dump("p", p);
    os << " ";
    dump("q", q);
    return os.str();
}

}  // namespace

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"linear",       "semilinear-null", "quasilinear-null",
                                                "wavemap-like", "nonnull-riccati", "nonnull-a2"};
    return names;
}

SystemSpec catalog_get(const std::string& name) {
    SystemSpec s;
    s.name = name;
    s.a1 = zero_matrix();
    s.a2 = zero_matrix();
    s.a3 = zero_matrix();
    s.f = zero_vector();

    if (name == "linear") {
        s.n = 2;
        s.is_linear = true;
    } else if (name == "semilinear-null") {
        s.n = 2;
        s.f = [](ConstVecRef, ConstVecRef p, ConstVecRef q, VecOut out) { out = p.cwiseProduct(q); };
    } else if (name == "quasilinear-null") {
        s.n = 2;
        s.a1 = [](ConstVecRef u, ConstVecRef, ConstVecRef, MatOut out) {
            out.setIdentity();
            out *= u[0];
        };
        s.a2 = [b = quasilinear_b()](ConstVecRef, ConstVecRef, ConstVecRef q, MatOut out) {
            out = q[0] * b;
        };
        s.a3 = [c = quasilinear_c()](ConstVecRef, ConstVecRef p, ConstVecRef, MatOut out) {
            out = p[0] * c;
        };
    } else if (name == "wavemap-like") {
        s.n = 2;
        s.f = [g = wavemap_gamma()](ConstVecRef, ConstVecRef p, ConstVecRef q, VecOut out) {
            for (int i = 0; i < 2; ++i) out[i] = p.dot(g[static_cast<std::size_t>(i)] * q);
        };
    } else if (name == "nonnull-riccati") {
        s.n = 1;
        s.declared_null = false;
        s.f = [](ConstVecRef, ConstVecRef p, ConstVecRef, VecOut out) { out[0] = p[0] * p[0]; };
    } else if (name == "nonnull-a2") {
        s.n = 2;
        s.declared_null = false;
        s.a2 = [](ConstVecRef, ConstVecRef p, ConstVecRef, MatOut out) {
            out.setIdentity();
            out *= p[0];
        };
    } else {
        throw LookupError("unknown model '" + name + "'");
    }
    return s;
}

CoefficientValues::CoefficientValues(int n)
    : a1(Eigen::MatrixXd::Zero(n, n)),
      a2(Eigen::MatrixXd::Zero(n, n)),
      a3(Eigen::MatrixXd::Zero(n, n)),
      f(Eigen::VectorXd::Zero(n)) {}

void evaluate_coefficients(const SystemSpec& spec, ConstVecRef u, ConstVecRef p, ConstVecRef q,
                           CoefficientValues& out) {
    spec.a1(u, p, q, out.a1);
    spec.a2(u, p, q, out.a2);
    spec.a3(u, p, q, out.a3);
    spec.f(u, p, q, out.f);
    if (!out.a1.allFinite() || !out.a2.allFinite() || !out.a3.allFinite() || !out.f.allFinite()) {
        throw EvaluationError("model '" + spec.name + "' produced a non-finite coefficient at " +
                              format_point(u, p, q));
    }
}

bool NullVerdict::all_pass() const {
    return a1_vanishing.pass && a2_null.pass && a3_null.pass && f_null.pass && symmetry.pass;
}

nlohmann::json NullVerdict::to_json() const {
    auto one = [](const ConditionResult& c) {
        nlohmann::json j;
        j["pass"] = c.pass;
        j["max_residual"] = c.max_residual;
        if (c.witness) {
            j["witness"] = {{"u", c.witness->u},
                            {"p", c.witness->p},
                            {"q", c.witness->q},
                            {"residual", c.witness->residual}};
        } else {
            j["witness"] = nullptr;
        }
        return j;
    };
    return nlohmann::json{{"a1_vanishing", one(a1_vanishing)},
                          {"a2_null", one(a2_null)},
                          {"a3_null", one(a3_null)},
                          {"f_null", one(f_null)},
                          {"symmetry", one(symmetry)}};
}

namespace {

struct SampleOutcome {
    // residuals per condition, and the point each was measured at
    double res[5] = {0, 0, 0, 0, 0};
    Eigen::VectorXd pt[5][3];
};

void record(ConditionResult& c, double residual, double tol, const Eigen::VectorXd (&pt)[3],
            bool fail) {
    if (residual > c.max_residual || (fail && !c.witness)) {
        c.max_residual = std::max(c.max_residual, residual);
        if (fail) {
            Witness w;
            w.u.assign(pt[0].data(), pt[0].data() + pt[0].size());
            w.p.assign(pt[1].data(), pt[1].data() + pt[1].size());
            w.q.assign(pt[2].data(), pt[2].data() + pt[2].size());
            w.residual = residual;
            c.witness = w;
        }
    }
    (void)tol;
    if (fail) c.pass = false;
}

double slope_deficit(const double (&norms)[3], const double (&radii)[3], double tol) {
    if (norms[0] <= tol && norms[1] <= tol && norms[2] <= tol) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < 3; ++i) {
        if (norms[i] <= 0.0) continue;
        const double lx = std::log(radii[i]);
        const double ly = std::log(norms[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) return 0.0;
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return 1.0 - slope;
}

}  // namespace

NullVerdict check_null_conditions(const SystemSpec& spec, const NullCheckOptions& opts) {
    if (!(opts.tol > 0.0)) throw ConfigError("check_null_conditions: tol must be positive");
    if (opts.n_samples < 100) throw ConfigError("check_null_conditions: need at least 100 samples");
    const int n = spec.n;
    const auto count = static_cast<std::size_t>(opts.n_samples);

    // Points drawn up front so the verdict does not depend on scheduling.
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Eigen::VectorXd> points(count, Eigen::VectorXd(3 * n));
    for (auto& z : points) {
        for (int i = 0; i < 3 * n; ++i) z[i] = gauss(rng);
        const double r = opts.radius * std::pow(unif(rng), 1.0 / (3.0 * n));
        z *= r / z.norm();
    }

    constexpr double kRadii[3] = {1e-2, 1e-4, 1e-6};
    constexpr double kSlopeSlack = 1e-3;
    std::vector<SampleOutcome> outcomes(count);

    parallel_for(count, [&](std::size_t s) {
        const Eigen::VectorXd& z = points[s];
        const Eigen::VectorXd u = z.segment(0, n), p = z.segment(n, n), q = z.segment(2 * n, n);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
        CoefficientValues cv(n);
        SampleOutcome& out = outcomes[s];

        evaluate_coefficients(spec, u, p, q, cv);
        out.res[4] = std::max({(cv.a1 - cv.a1.transpose()).norm(), (cv.a2 - cv.a2.transpose()).norm(),
                               (cv.a3 - cv.a3.transpose()).norm()});
        out.pt[4][0] = u;
        out.pt[4][1] = p;
        out.pt[4][2] = q;

        evaluate_coefficients(spec, u, p, zero, cv);
        out.res[1] = cv.a2.norm();
        const double f_on_p = cv.f.norm();
        out.pt[1][0] = u;
        out.pt[1][1] = p;
        out.pt[1][2] = zero;

        evaluate_coefficients(spec, u, zero, q, cv);
        out.res[2] = cv.a3.norm();
        const double f_on_q = cv.f.norm();
        out.pt[2][0] = u;
        out.pt[2][1] = zero;
        out.pt[2][2] = q;

        out.res[3] = std::max(f_on_p, f_on_q);
        out.pt[3][0] = u;
        out.pt[3][1] = f_on_p >= f_on_q ? p : zero;
        out.pt[3][2] = f_on_p >= f_on_q ? zero : q;

        double norms[3];
        for (int k = 0; k < 3; ++k) {
            evaluate_coefficients(spec, kRadii[k] * u, kRadii[k] * p, kRadii[k] * q, cv);
            norms[k] = cv.a1.norm();
        }
        out.res[0] = std::max(0.0, slope_deficit(norms, kRadii, opts.tol));
        out.pt[0][0] = u;
        out.pt[0][1] = p;
        out.pt[0][2] = q;
    });

    NullVerdict v;
    ConditionResult* slots[5] = {&v.a1_vanishing, &v.a2_null, &v.a3_null, &v.f_null, &v.symmetry};
    for (const auto& o : outcomes) {
        for (int c = 0; c < 5; ++c) {
            const bool fail = c == 0 ? o.res[0] > kSlopeSlack : o.res[c] > opts.tol;
            record(*slots[c], o.res[c], opts.tol, o.pt[c], fail);
        }
    }
    return v;
}

QuasilinearMatrices quasilinear_matrices(const SystemSpec& spec, ConstVecRef u, ConstVecRef p,
                                         ConstVecRef q) {
    CoefficientValues cv(spec.n);
    evaluate_coefficients(spec, u, p, q, cv);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(spec.n, spec.n);
    QuasilinearMatrices out;
    out.m = id - cv.a1 - cv.a2 - cv.a3;
    out.n = id - cv.a1 + cv.a2 + cv.a3;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.m);
    out.margin = svd.singularValues().minCoeff();
    if (!(out.margin >= kDegeneracyMargin)) {
        throw DegeneracyError("quasilinear_matrices: M is degenerate (margin " +
                                  std::to_string(out.margin) + ") at " + format_point(u, p, q),
                              std::nan(""), std::nan(""));
    }
    return out;
}

}  // namespace nullwave
