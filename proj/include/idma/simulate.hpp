#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "idma/analytic.hpp"
#include "idma/kernel.hpp"
#include "idma/levy.hpp"
#include "idma/random.hpp"

namespace idma {

struct SimConfig {
    ProductKernel kernel;
    LevyMeasure measure;
    double T = 1.0;
    std::vector<Point> ls;
    double epsilon = 1e-3;
    /// Defaults to the kernel's decay_radius(1e-8) per coordinate.
    std::optional<double> window_pad;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;

    std::size_t dimension() const { return kernel.dimension(); }
    /// Throws ConfigError on inconsistent settings.
    void validate() const;
    /// W = prod_k [min l_k - pad_k, T + max l_k + pad_k].
    std::vector<Domain> window() const;
};

/// A realisation of the Poisson point process restricted to a window and to
/// jumps with |y| >= epsilon. Locations are stored row-major (n x d).
struct JumpSet {
    std::size_t d = 1;
    std::vector<double> locations;
    std::vector<double> sizes;
    std::vector<Domain> window;
    double epsilon = 0.0;

    std::size_t size() const { return sizes.size(); }
    std::span<const double> location(std::size_t i) const { return {locations.data() + i * d, d}; }
    void add(std::span<const double> s, double y);
};

/// Poisson(|W| * tail_mass(nu, eps)) points, uniform locations in W, sizes
/// from the truncated measure.
JumpSet sample_jumps(const SimConfig& cfg, RandomStream& stream);

/// Same, on an explicit window.
JumpSet sample_jumps(const LevyMeasure& nu, std::span<const Domain> window, double epsilon, RandomStream& stream);

/// X(t) = sum_i y_i f(t - s_i) - a.
double eval_field(const JumpSet& jumps, const ProductKernel& kernel, double a, std::span<const double> t);

/// S_{T,l} = sum_i y_i prod_k (g_k(T + l_k - s_ik) - g_k(l_k - s_ik)) - a T^d.
/// Kernels without an antiderivative fall back to per-jump adaptive
/// quadrature of f over the shifted window.
double window_integral(const JumpSet& jumps, const ProductKernel& kernel, double T, std::span<const double> l,
                       double a = 0.0, const QuadOptions& opts = {});

/// Y_l = (-1)^d sum_i y_i prod_k g_k(l_k - s_ik).
double limit_value(const JumpSet& jumps, const ProductKernel& kernel, std::span<const double> l);

/// Y_l for every configured l from one jump realisation.
std::vector<double> sample_limit(const SimConfig& cfg, RandomStream& stream);

/// Replicates x l-points, row-major by replicate.
struct ReplicateMatrix {
    std::size_t replicates = 0;
    std::size_t points = 0;
    std::vector<double> window_integrals; // S_{T,l_j}^{(r)}
    std::vector<double> limit_values;     // Y_{l_j}^{(r)}

    double S(std::size_t r, std::size_t j) const { return window_integrals[r * points + j]; }
    double Y(std::size_t r, std::size_t j) const { return limit_values[r * points + j]; }
    std::vector<double> column_S(std::size_t j) const;
    std::vector<double> column_Y(std::size_t j) const;
};

/// N independent replicates; replicate r draws from RandomStream(seed, r) and
/// writes only its own row, so the result is identical for any thread count.
/// Y values are NaN for kernels without an antiderivative.
ReplicateMatrix monte_carlo(const SimConfig& cfg, unsigned threads = 1);

/// Runs fn(r) for r in [0, n) across the given number of workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

struct CfEvaluation {
    std::vector<double> zs;
    std::vector<std::complex<double>> values;
    /// Radius of the per-point confidence band c / sqrt(N); zero for analytic values.
    double band = 0.0;
    std::vector<double> error_estimates;
};

/// phi_hat(z) = N^-1 sum_r exp(i z S_r). Requires N >= 100.
CfEvaluation empirical_cf(std::span<const double> samples, std::span<const double> zs, double band_constant = 3.0);

} // namespace idma
