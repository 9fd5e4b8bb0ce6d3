#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idma/quadrature.hpp"

namespace idma {

enum class KernelKind { SignedOU, GaussDeriv, PersistentControl, UserTable };

struct KernelNorms {
    double l1_f;
    double l2sq_f;
    // Absent for kernels without an antiderivative that vanishes at infinity.
    std::optional<double> l1_g;
    std::optional<double> l2sq_g;
};

/// A one-dimensional kernel f together with its antiderivative g (f = g').
///
/// Built-ins:
///   SignedOU           g(x) = exp(-|x|),  f(x) = -sgn(x) exp(-|x|)
///   GaussDeriv         g(x) = exp(-x^2),  f(x) = -2x exp(-x^2)
///   PersistentControl  f(x) = exp(-|x|)/2, no g (int f = 1)
///   UserTable          g piecewise linear on a grid, zero outside it
///
/// f = g' everywhere, including at infinity, so window integrals of f are
/// exact differences of g. The library uses this sign convention throughout.
class Kernel1D {
public:
    static Kernel1D signed_ou();
    static Kernel1D gauss_deriv();
    static Kernel1D persistent_control();
    /// g tabulated at strictly increasing xs; g must vanish at both ends.
    static Kernel1D user_table(std::vector<double> xs, std::vector<double> gs);
    /// CSV with header "x,g".
    static Kernel1D user_table_from_csv(const std::string& path);

    KernelKind kind() const noexcept { return kind_; }
    std::string name() const;
    bool has_antiderivative() const noexcept { return kind_ != KernelKind::PersistentControl; }

    double f(double x) const;
    /// Throws NotAvailable for kernels without an antiderivative.
    double g(double x) const;

    /// R with |g(x)| <= tol and |f(x)| <= tol whenever |x| > R.
    double decay_radius(double tol) const;

    /// Points where f is not smooth (quadrature cuts, excluded from
    /// finite-difference checks).
    std::span<const double> breakpoints() const noexcept;

    /// This kernel with its argument shifted: x -> k(x - shift).
    Kernel1D shifted(double shift) const;

private:
    struct Table {
        std::vector<double> xs;
        std::vector<double> gs;
    };

    explicit Kernel1D(KernelKind kind) : kind_(kind) {}

    KernelKind kind_;
    double shift_ = 0.0;
    std::vector<double> breakpoints_;
    std::shared_ptr<const Table> table_;
};

/// int_a^b f(x) dx = g(b) - g(a); a and b may be infinite.
/// Throws NotAvailable when the kernel has no antiderivative.
double window_increment(const Kernel1D& k, double a, double b);

/// int_a^b f, via g when available and adaptive quadrature otherwise.
double integrate_f(const Kernel1D& k, double a, double b, const QuadOptions& opts = {});

KernelNorms norms(const Kernel1D& k);

/// int f over the whole line: zero for derivative kernels.
double integral_f(const Kernel1D& k, const QuadOptions& opts = {});

/// Largest |(g(x+h) - g(x-h)) / 2h - f(x)| over the grid, skipping points
/// within h of a breakpoint.
double check_derivative(const Kernel1D& k, std::span<const double> grid, double h);

/// Autocorrelation rho(t) = int f(u) f(u + t) du.
double autocorrelation(const Kernel1D& k, double t, const QuadOptions& opts = {});

/// Tensor product f(x) = prod_j f_j(x_j), g likewise.
class ProductKernel {
public:
    ProductKernel(Kernel1D k) : components_{std::move(k)} {} // NOLINT: implicit 1-d promotion
    explicit ProductKernel(std::vector<Kernel1D> components);

    std::size_t dimension() const noexcept { return components_.size(); }
    const Kernel1D& operator[](std::size_t j) const { return components_[j]; }
    std::span<const Kernel1D> components() const noexcept { return components_; }
    bool has_antiderivative() const noexcept;

    double f(std::span<const double> x) const;
    double g(std::span<const double> x) const;

    /// prod_j window_increment(k_j, lo_j, hi_j)
    double window_increment(std::span<const double> lo, std::span<const double> hi) const;

    /// prod_j int f_j
    double integral_f(const QuadOptions& opts = {}) const;

private:
    std::vector<Kernel1D> components_;
};

} // namespace idma
