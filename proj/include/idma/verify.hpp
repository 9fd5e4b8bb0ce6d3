#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idma/analytic.hpp"
#include "idma/simulate.hpp"

namespace idma {

enum class Winner { Claimed, BoundaryAugmented, Inconclusive };
std::string to_string(Winner w);
std::string to_string(LimitVariant v);

struct ConvergenceEntry {
    double T;
    double dist_claimed;
    double dist_boundary;
    bool converged; // quadrature succeeded for every z
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    std::vector<double> z_grid;
    double threshold;
    bool claimed_monotone;  // decreasing over the last three T values
    bool boundary_monotone;
    Winner winner;
};

struct ConvergenceOptions {
    double threshold = 1e-3;
    unsigned threads = 1;
    AnalyticOptions analytic{};
};

/// Default frequency grid: [-5, 5] in steps of 0.25.
std::vector<double> default_z_grid();

/// Sup over the z-grid of |phi_{S_T}(z) - phi_candidate(z)| for every T, for
/// both limit candidates. Frequencies are the grid values times base.zs; the
/// base spec's T is ignored. A candidate wins when its distance at the
/// largest T is at most the threshold and strictly decreasing over the last
/// three T values, and the other candidate does not also qualify.
ConvergenceReport cf_convergence(const ProductKernel& k, const LevyMeasure& nu, const FddSpec& base,
                                 std::span<const double> T_grid, std::span<const double> z_grid,
                                 const ConvergenceOptions& opts = {});

struct PointConsistency {
    std::size_t l_index;
    double mean;
    double mean_se;
    double var_empirical;
    double var_se;
    double var_analytic;
    double max_cf_deviation;
    bool cf_pass;
    bool mean_pass;
    bool var_pass;
};

struct ConsistencyReport {
    std::size_t replicates;
    double band; // band_constant / sqrt(N)
    std::vector<double> z_grid;
    std::vector<PointConsistency> points;
    bool pass;
};

struct ConsistencyOptions {
    double band_constant = 5.0;
    double se_multiplier = 4.0;
    unsigned threads = 1;
    AnalyticOptions analytic{};
};

/// Simulates cfg and compares, per l-point, the empirical CF against
/// exp(log_cf_window) within the band, and the empirical mean and variance
/// against 0 and variance_window within se_multiplier standard errors.
ConsistencyReport mc_consistency(const SimConfig& cfg, std::span<const double> z_grid,
                                 const ConsistencyOptions& opts = {});

struct KsResult {
    double statistic;
    double critical_1pct;
    bool reject;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic 1% critical
/// value 1.628 sqrt((n + m) / (n m)). Both samples need at least 100 values.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

enum class HyperClass { Hyperuniform, Persistent };
std::string to_string(HyperClass c);

struct HyperReport {
    std::vector<double> T_grid;
    std::vector<double> var_analytic;
    std::vector<double> var_empirical; // empty when no replicates were requested
    std::vector<double> var_se;
    std::vector<double> control_var_analytic;
    std::vector<double> control_var_empirical;
    std::vector<double> control_var_se;
    double control_slope;
    HyperClass classification;
};

struct HyperOptions {
    std::uint64_t seed = 0;
    double epsilon = 1e-3;
    unsigned threads = 1;
    AnalyticOptions analytic{};
};

/// Window-integral variance curves for k and for the persistent control
/// kernel under the same measure. Classified hyperuniform when the curve
/// for k is bounded (last value within 10% of the previous) while the
/// control's least-squares slope of Var against T is positive. Needs at
/// least three T values; N = 0 skips the Monte Carlo curves.
HyperReport hyperuniformity(const ProductKernel& k, const LevyMeasure& nu, std::span<const double> T_grid,
                            std::size_t N, const HyperOptions& opts = {});

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Independent samples of -sum y g(-s) and +sum y g(s) from two streams,
/// the two sides of the reflection identity for symmetric measures.
struct ReflectionSamples {
    std::vector<double> reflected; // -int g(-s) Lambda(ds)
    std::vector<double> direct;    // +int g(s) Lambda(ds)
};

ReflectionSamples reflection_samples(const Kernel1D& k, const LevyMeasure& nu, std::size_t N, std::uint64_t seed,
                                     double epsilon = 1e-3, unsigned threads = 1);

struct SampleMoments {
    double mean;
    double variance; // unbiased
    double mean_se;
    double variance_se;
};

SampleMoments sample_moments(std::span<const double> xs);

} // namespace idma
