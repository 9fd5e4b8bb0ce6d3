#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "idma/kernel.hpp"
#include "idma/levy.hpp"
#include "idma/quadrature.hpp"

namespace idma {

using Point = std::vector<double>;
using Complex = std::complex<double>;

/// Joint law of (S_{T,l_1}, ..., S_{T,l_m}) probed at frequencies (z_1..z_m).
struct FddSpec {
    std::size_t d = 1;
    std::vector<Point> ls;
    std::vector<double> zs;
    double T = 0.0;

    /// m = 1 convenience: a single window at l with frequency z.
    static FddSpec single(std::size_t d, Point l, double z, double T) { return {d, {std::move(l)}, {z}, T}; }

    /// Throws ConfigError on an empty or inconsistent spec.
    void validate() const;
    /// Same spec with every frequency multiplied by s.
    FddSpec scaled(double s) const;
};

enum class LimitVariant { Claimed, BoundaryAugmented };

struct ConditionsReport {
    std::array<double, 3> values{};
    std::array<bool, 3> pass{};
    std::array<double, 3> error_estimates{};
};

struct AnalyticOptions {
    QuadOptions quad{};
};

/// a = int f * int_{-1}^{1} y nu(dy); zero for derivative kernels.
double shift_constant(const ProductKernel& k, const LevyMeasure& nu, const AnalyticOptions& opts = {});

/// log E exp(i z X(0)) = -i z a + int int (exp(i z y f(-s)) - 1) ds nu(dy).
QuadResult<Complex> log_cf_stationary(const ProductKernel& k, const LevyMeasure& nu, double z,
                                      const AnalyticOptions& opts = {});

/// J_T(s) = sum_j z_j prod_k (g_k(T + l_jk - s_k) - g_k(l_jk - s_k)), exact.
double j_t(const ProductKernel& k, const FddSpec& spec, std::span<const double> s);

/// Joint log-CF of the window integrals: int int (exp(i y J_T(s)) - 1) ds nu(dy).
QuadResult<Complex> log_cf_window(const ProductKernel& k, const LevyMeasure& nu, const FddSpec& spec,
                                  const AnalyticOptions& opts = {});

/// Log-CF of a candidate T -> infinity limit of the window integrals.
///
/// Claimed: the moving average with kernel (-1)^d prod_k g_k(l_k - s_k).
/// BoundaryAugmented: sum over the 2^d corners of the window of independent
/// moving averages; corner A (the set of coordinates sitting at the far end
/// T + l) contributes kernel (-1)^(d - |A|) prod_k g_k(l_k - u_k). For d = 1
/// this is the claimed term plus the far-end term with +g(l - u).
QuadResult<Complex> log_cf_limit(const ProductKernel& k, const LevyMeasure& nu, const FddSpec& spec,
                                 LimitVariant variant, const AnalyticOptions& opts = {});

/// C(t) = int y^2 nu(dy) * prod_k rho_k(t_k).
double covariance(const ProductKernel& k, const LevyMeasure& nu, std::span<const double> t,
                  const AnalyticOptions& opts = {});

struct CovarianceIntegral {
    double exact;      // second_moment * (int f)^2
    double quadrature; // int C(t) dt over [-R, R]^d, R = 2 * decay_radius(1e-8)
};

CovarianceIntegral covariance_integral(const ProductKernel& k, const LevyMeasure& nu,
                                       const AnalyticOptions& opts = {});

/// Var(S_{T,0}). Derivative kernels: second_moment * prod_k int (g_k(T - s) - g_k(-s))^2 ds.
/// Other kernels: second_moment * prod_k 2 int_0^T (T - tau) rho_k(tau) dtau.
double variance_window(const ProductKernel& k, const LevyMeasure& nu, double T, const AnalyticOptions& opts = {});

/// Var(S_{T,0}) by the covariance route for any kernel; used as a cross-check.
double variance_window_from_covariance(const ProductKernel& k, const LevyMeasure& nu, double T,
                                       const AnalyticOptions& opts = {});

/// Integrability conditions (i)-(iii) for f against nu. Each value is an
/// outer quadrature over s of closed-form shell moments of nu; a pass flag is
/// false when its quadrature exceeds the evaluation budget or the value is
/// not finite.
ConditionsReport check_conditions(const ProductKernel& k, const LevyMeasure& nu, std::size_t budget,
                                  const AnalyticOptions& opts = {});

/// Half-width of the s-box outside which J contributes less than the
/// quadrature tolerance: decay_radius(tol / (abs_moment * m * max|z|)).
double s_truncation_radius(const Kernel1D& k, const LevyMeasure& nu, double tol, std::size_t m, double max_abs_z);

} // namespace idma
