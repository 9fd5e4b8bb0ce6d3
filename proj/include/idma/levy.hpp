#pragma once

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "idma/random.hpp"

namespace idma {

// Lévy measures on the real line. Every constructible measure has a finite
// first absolute moment, so the moving average built on it is integrable and
// the shot-noise representation needs no compensation beyond the constant a.

/// nu(dy) = y^-1 dy on (0, 1).
struct Dickman {};

/// Symmetric density C |y|^(-1-beta) on 0 < |y| <= 1, beta in (0, 1).
struct TruncatedStable {
    double beta;
    double scale;
};

/// Two atoms (lambda/2) at -1 and +1.
struct TwoPoint {
    double lambda;
};

/// Symmetric density c |y|^(-1-alpha) on |y| >= delta, alpha in (1, 2).
/// The inner cut delta > 0 is what keeps the first absolute moment finite.
struct InnerTruncatedStable {
    double alpha;
    double scale;
    double delta;
};

enum class LevyKind { Dickman, TruncatedStable, TwoPoint, InnerTruncatedStable };

struct Atom {
    double location;
    double mass;
};

/// Density scale * y^(-1-index) on the magnitude range [low, high]
/// (mirrored onto the negative half-line for symmetric measures).
struct PowerLaw {
    double scale;
    double index;
    double low;
    double high;
};

/// Which part of a magnitude range [lo, hi] counts for atoms sitting exactly
/// on an endpoint. Density measures are indifferent.
enum class Endpoints { Closed, OpenLow, OpenHigh, Open };

class LevyMeasure {
public:
    using Parameters = std::variant<Dickman, TruncatedStable, TwoPoint, InnerTruncatedStable>;

    /// Validates parameters; throws ConfigError when they leave the allowed ranges.
    explicit LevyMeasure(Parameters params);

    static LevyMeasure dickman() { return LevyMeasure(Dickman{}); }
    static LevyMeasure truncated_stable(double beta, double scale) {
        return LevyMeasure(TruncatedStable{beta, scale});
    }
    static LevyMeasure two_point(double lambda) { return LevyMeasure(TwoPoint{lambda}); }
    static LevyMeasure inner_truncated_stable(double alpha, double scale, double delta) {
        return LevyMeasure(InnerTruncatedStable{alpha, scale, delta});
    }

    LevyKind kind() const noexcept;
    const Parameters& parameters() const noexcept { return params_; }
    std::string name() const;

    /// Smallest b with nu(|y| > b) = 0; +inf for unbounded support.
    double support_bound() const noexcept;
    bool is_atomic() const noexcept { return std::holds_alternative<TwoPoint>(params_); }
    bool is_symmetric() const noexcept { return !std::holds_alternative<Dickman>(params_); }

    /// Atoms of an atomic measure; empty for density measures.
    std::span<const Atom> atoms() const noexcept { return atoms_; }

    /// Lebesgue density psi(y); zero for atomic measures.
    double density(double y) const noexcept;

    /// Power-law form of the density; scale is zero for atomic measures.
    PowerLaw power_law() const noexcept;

private:
    Parameters params_;
    std::vector<Atom> atoms_;
};

/// Integral of y^order (order 1: signed y, unless absolute is set) over the
/// magnitude shell lo <= |y| <= hi. Closed form for every built-in measure;
/// returns +inf when the integral diverges.
double shell_moment(const LevyMeasure& nu, int order, bool absolute, double lo, double hi,
                    Endpoints endpoints = Endpoints::Closed);

/// int |y| nu(dy)
double abs_moment(const LevyMeasure& nu);

/// int y^2 nu(dy); throws DivergentMoment when infinite.
double second_moment(const LevyMeasure& nu);

/// nu({|y| >= eps})
double tail_mass(const LevyMeasure& nu, double eps);

/// int_{|y| < eps} y^2 nu(dy): variance carried by the jumps a truncated
/// simulation discards, per unit of kernel L2 mass.
double small_jump_variance(const LevyMeasure& nu, double eps);

/// int_{-1}^{1} y nu(dy)
double compensator_integral(const LevyMeasure& nu);

/// Inverse-CDF sampler for nu restricted to {|y| >= eps}, normalised.
/// Construction throws EmptyTruncation when that region carries no mass.
class JumpSizeSampler {
public:
    JumpSizeSampler(const LevyMeasure& nu, double eps);

    /// Quantile at u in [0, 1]; symmetric measures put u < 1/2 on the negative half.
    double quantile(double u) const;
    double operator()(RandomStream& rng) const { return quantile(rng.uniform()); }

private:
    std::vector<Atom> atoms_;  // retained atoms with normalised cumulative mass
    bool symmetric_ = false;
    double index_ = 0.0;
    double low_ = 0.0;
    double high_ = 0.0;
    double low_tail_ = 0.0;   // low^-index
    double high_tail_ = 0.0;  // high^-index
};

/// Quantile function of nu restricted to {|y| >= eps} and normalised.
/// Symmetric measures put u < 1/2 on the negative half.
double jump_size_quantile(const LevyMeasure& nu, double eps, double u);

/// n i.i.d. draws from the normalised truncation of nu to {|y| >= eps}.
/// Throws EmptyTruncation when that region carries no mass.
std::vector<double> sample_jump_sizes(const LevyMeasure& nu, double eps, std::size_t n,
                                      RandomStream& rng);

} // namespace idma
