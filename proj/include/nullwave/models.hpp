#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace nullwave {

using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;
using MatOut = Eigen::Ref<Eigen::MatrixXd>;
using VecOut = Eigen::Ref<Eigen::VectorXd>;

/// Coefficient evaluators take (u, p, q) = (u, u_xi, u_eta) and write into a
/// preallocated output.
using MatrixField = std::function<void(ConstVecRef u, ConstVecRef p, ConstVecRef q, MatOut out)>;
using VectorField = std::function<void(ConstVecRef u, ConstVecRef p, ConstVecRef q, VecOut out)>;

/// A quasilinear system u_{xi eta} = A1 u_{xi eta} + A2 u_{xi xi} + A3 u_{eta eta} + F.
struct SystemSpec {
    std::string name;
    int n = 1;
    MatrixField a1;
    MatrixField a2;
    MatrixField a3;
    VectorField f;
    bool declared_null = true;
    /// All coefficients vanish identically; lets the solver skip evaluations.
    bool is_linear = false;
};

/// Names accepted by catalog_get, in catalog order.
const std::vector<std::string>& catalog_names();

/// Built-in systems. Throws LookupError for unknown names.
SystemSpec catalog_get(const std::string& name);

/// Scratch buffers for one coefficient evaluation.
struct CoefficientValues {
    explicit CoefficientValues(int n);
    Eigen::MatrixXd a1, a2, a3;
    Eigen::VectorXd f;
};

/// Evaluate every coefficient at one point; throws EvaluationError on
/// non-finite output.
void evaluate_coefficients(const SystemSpec& spec, ConstVecRef u, ConstVecRef p, ConstVecRef q,
                           CoefficientValues& out);

struct Witness {
    std::vector<double> u, p, q;
    double residual = 0.0;
};

struct ConditionResult {
    bool pass = true;
    double max_residual = 0.0;
    std::optional<Witness> witness;
};

/// Per-condition outcome of the structural check.
struct NullVerdict {
    ConditionResult a1_vanishing;  // A1 = O(|u| + |u_xi| + |u_eta|)
    ConditionResult a2_null;       // A2 = O(|u_eta|)
    ConditionResult a3_null;       // A3 = O(|u_xi|)
    ConditionResult f_null;        // F = O(|u_xi||u_eta|)
    ConditionResult symmetry;

    bool all_pass() const;
    bool null_conditions_hold() const { return all_pass(); }
    nlohmann::json to_json() const;
};

struct NullCheckOptions {
    double tol = 1e-12;
    int n_samples = 1000;
    std::uint64_t seed = 42;
    double radius = 0.1;
};

/// Sample-based structural check of the null conditions and symmetry.
/// Deterministic for fixed options.
NullVerdict check_null_conditions(const SystemSpec& spec, const NullCheckOptions& opts = {});

struct QuasilinearMatrices {
    Eigen::MatrixXd m;  // I - A1 - A2 - A3   (multiplies u_tt)
    Eigen::MatrixXd n;  // I - A1 + A2 + A3   (multiplies u_xx)
    double margin = 1.0;  // smallest singular value of m
};

inline constexpr double kDegeneracyMargin = 1e-6;

/// M, N of the (t, x) form M u_tt = N u_xx + 2 (A2 - A3) u_tx + F.
/// Throws DegeneracyError when the margin drops below kDegeneracyMargin.
QuasilinearMatrices quasilinear_matrices(const SystemSpec& spec, ConstVecRef u, ConstVecRef p,
                                         ConstVecRef q);

}  // namespace nullwave
