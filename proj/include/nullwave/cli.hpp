#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullwave/domain.hpp"
#include "nullwave/experiments.hpp"
#include "nullwave/solver.hpp"

namespace nullwave {

/// Everything a subcommand needs; filled from `key = value` lines.
struct RunConfig {
    std::string model = "semilinear-null";
    double delta = 0.5;
    std::vector<double> epsilon{0.01};
    bool epsilon_given = false;  // sweeps fall back to their default ladders otherwise
    GridConfig grid;
    long stride = 10;
    std::string out = "out";
    std::uint64_t seed = 42;
    std::string family = "gaussian-bump";
    DataShape shape;
    IdentityOrder order = IdentityOrder::high;
    long identity_stride = 1;
    double identity_tol = 1e-6;
    long dump_stride = 0;  // 0 disables the trajectory dump
    double blowup_threshold = 1e6;
    BoundaryClosure closure = BoundaryClosure::reflect;
    double dissipation = kDefaultDissipation;

    nlohmann::json to_json() const;
};

/// Parses key = value lines with '#' comments. Unknown keys, malformed
/// values and range violations raise ParseError with the line number.
RunConfig parse_config(const std::string& text);

/// Reads and parses a config file; a missing file is a ConfigError.
RunConfig load_config(const std::filesystem::path& path);

const std::vector<std::string>& subcommand_names();

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Runs one subcommand, writing artifacts into `out_dir` (created if needed)
/// and a one-line summary to `log`. Returns 0 on pass, 1 on a failed check,
/// 2 on a configuration error.
int dispatch(const std::string& subcommand, const RunConfig& config, const std::filesystem::path& out_dir,
             std::ostream& log);

}  // namespace nullwave
