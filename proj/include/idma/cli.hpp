#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "idma/analytic.hpp"
#include "idma/kernel.hpp"
#include "idma/levy.hpp"

namespace idma::cli {

enum class Format { Csv, Json };

/// Exit codes of the idma tool.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kNonConvergence = 3,
    kDivergentMoment = 4,
};

/// Parsed and validated run configuration. Unknown keys are rejected.
struct RunConfig {
    std::optional<LevyMeasure> measure;
    std::optional<ProductKernel> kernel;
    std::size_t d = 1;
    double T = 1.0;
    std::vector<double> T_grid;        // empty: per-subcommand default
    std::vector<Point> l_points;       // empty: the origin
    std::vector<double> z;             // base frequency per l-point; empty: all ones
    std::vector<double> z_grid;        // default [-5, 5] step 0.25
    std::vector<Point> t_grid;         // lags for `cov`; default 0, 1, 2 along every axis
    double epsilon = 1e-3;
    std::optional<double> window_pad;
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    double quad_tol = 1e-9;
    std::size_t conditions_budget = 1'000'000;
    double threshold = 1e-3;
    unsigned threads = 1;
    std::filesystem::path output = ".";
    Format format = Format::Csv;

    /// Digest of the result-relevant settings (excludes seed, threads,
    /// output location and format).
    std::string digest;

    const LevyMeasure& require_measure() const;
    const ProductKernel& require_kernel() const;
    std::vector<Point> points() const;
    std::vector<double> base_frequencies() const;
};

/// Parses a JSON config document. Relative kernel table paths resolve against base_dir.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);

/// Reads and parses a config file; throws ConfigError when missing or invalid.
RunConfig load_config(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace idma::cli
