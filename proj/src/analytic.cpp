#include "idma/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "idma/error.hpp"

namespace idma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SFunction = std::function<double(std::span<const double>)>;

/// int (exp(i y v) - 1) nu(dy); the inner integral of every log-CF.
// int_U^inf cos(u) u^-p du and int_U^inf sin(u) u^-p du for U a multiple of 2 pi,
// by repeated integration by parts.
double cos_tail(double U, double p, int depth);
double sin_tail(double U, double p, int depth) {
    if (depth == 0) return std::pow(U, -p);
    return std::pow(U, -p) - p * cos_tail(U, p + 1.0, depth - 1);
}
double cos_tail(double U, double p, int depth) {
    if (depth == 0) return 0.0;
    return p * sin_tail(U, p + 1.0, depth - 1);
}

/// Symmetric power law c |y|^(-1-index) on |y| >= low, unbounded above:
/// -2 c w^index int_{w low}^inf (1 - cos u) u^(-1-index) du with w = |v|.
/// Quadrature in log u up to a whole number of periods past 40, closed-form tail.
Complex heavy_tail_exponent(const PowerLaw& law, double v, const QuadOptions& inner) {
    const double w = std::abs(v);
    const double x = w * law.low;
    const double U = 2.0 * M_PI * std::ceil(std::max(x, 40.0) / (2.0 * M_PI));
    const double p = 1.0 + law.index;
    const double weight = 2.0 * law.scale * std::pow(w, law.index);
    QuadOptions opts = inner;
    opts.abs_tol = inner.abs_tol / weight;
    auto h = [&](double t) {
        const double u = std::exp(t);
        const double s = std::sin(0.5 * u);
        return 2.0 * s * s * std::pow(u, -law.index);
    };
    const double body = x < U ? integrate_line(h, Domain::finite(std::log(x), std::log(U)), opts).value : 0.0;
    const double tail = std::pow(U, -law.index) / law.index - cos_tail(U, p, 12);
    return {-weight * (body + tail), 0.0};
}

Complex levy_exponent(const LevyMeasure& nu, double v, const QuadOptions& inner) {
    if (v == 0.0) return {0.0, 0.0};
    if (nu.is_atomic()) {
        Complex sum{0.0, 0.0};
        for (const Atom& a : nu.atoms()) {
            const double phase = a.location * v;
            sum += a.mass * Complex(std::cos(phase) - 1.0, std::sin(phase));
        }
        return sum;
    }
    if (std::isinf(nu.power_law().high)) return heavy_tail_exponent(nu.power_law(), v, inner);
    // cos(x) - 1 is evaluated as -2 sin^2(x/2) to keep relative accuracy for small x.
    auto h = [v](double y) {
        const double phase = y * v;
        const double s = std::sin(0.5 * phase);
        return Complex(-2.0 * s * s, std::sin(phase));
    };
    return integrate_levy(h, nu, inner).value;
}

struct SBox {
    std::vector<Domain> domains;
    std::vector<std::vector<double>> cuts;

    double volume() const {
        double v = 1.0;
        for (const Domain& d : domains) v *= d.width();
        return v;
    }
};

/// int over the s-box of int (exp(i y J(s)) - 1) nu(dy).
QuadResult<Complex> shot_noise_log_cf(const LevyMeasure& nu, const SFunction& jfun, const SBox& box,
                                      const QuadOptions& opts) {
    QuadOptions inner = opts;
    inner.abs_tol = 0.1 * opts.abs_tol / std::max(box.volume(), 1.0);
    if (box.domains.size() == 1) {
        double s_buf[1];
        auto integrand = [&](double s) {
            s_buf[0] = s;
            return levy_exponent(nu, jfun(std::span<const double>(s_buf, 1)), inner);
        };
        return integrate_line(integrand, box.domains[0], opts, box.cuts[0]);
    }
    std::function<Complex(std::span<const double>)> integrand = [&](std::span<const double> s) {
        return levy_exponent(nu, jfun(s), inner);
    };
    return integrate_box<Complex>(integrand, box.domains, box.cuts, opts);
}

double max_abs(std::span<const double> zs) {
    double m = 0.0;
    for (double z : zs) m = std::max(m, std::abs(z));
    return m;
}

void require_antiderivative(const ProductKernel& k, const char* what) {
    if (!k.has_antiderivative())
        throw NotAvailable(std::string(what) + " needs a kernel with an antiderivative vanishing at infinity");
}

/// Box around the points where g_k(offset + l_jk - s_k) is non-negligible,
/// for every offset in `offsets` (0 and/or T).
SBox window_box(const ProductKernel& k, const LevyMeasure& nu, const FddSpec& spec,
                std::span<const double> offsets, double tol) {
    SBox box;
    const double zmax = max_abs(spec.zs);
    for (std::size_t dim = 0; dim < spec.d; ++dim) {
        const Kernel1D& kern = k[dim];
        const double r = s_truncation_radius(kern, nu, tol, spec.ls.size(), zmax);
        double lo = kInf;
        double hi = -kInf;
        std::vector<double> cuts;
        for (const Point& l : spec.ls) {
            for (double off : offsets) {
                lo = std::min(lo, off + l[dim] - r);
                hi = std::max(hi, off + l[dim] + r);
                for (double b : kern.breakpoints()) cuts.push_back(off + l[dim] - b);
            }
        }
        box.domains.push_back(Domain::finite(lo, hi));
        box.cuts.push_back(std::move(cuts));
    }
    return box;
}

} // namespace

void FddSpec::validate() const {
    if (d == 0) throw ConfigError("dimension must be at least 1");
    if (ls.empty()) throw ConfigError("need at least one l-point");
    if (ls.size() != zs.size()) throw ConfigError("number of l-points and frequencies differ");
    if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("window side T must be finite and >= 0");
    for (const Point& l : ls) {
        if (l.size() != d) throw ConfigError("l-point dimension does not match d");
        for (double x : l)
            if (!std::isfinite(x)) throw ConfigError("l-point entries must be finite");
    }
    for (double z : zs)
        if (!std::isfinite(z)) throw ConfigError("frequencies must be finite");
}

FddSpec FddSpec::scaled(double s) const {
    FddSpec out = *this;
    for (double& z : out.zs) z *= s;
    return out;
}

double s_truncation_radius(const Kernel1D& k, const LevyMeasure& nu, double tol, std::size_t m,
                           double max_abs_z) {
    const double scale = abs_moment(nu) * static_cast<double>(std::max<std::size_t>(m, 1)) * max_abs_z;
    if (!(scale > 0.0)) return k.decay_radius(tol);
    return k.decay_radius(std::min(tol, tol / scale));
}

double shift_constant(const ProductKernel& k, const LevyMeasure& nu, const AnalyticOptions& opts) {
    if (k.has_antiderivative()) return 0.0;
    return k.integral_f(opts.quad) * compensator_integral(nu);
}

QuadResult<Complex> log_cf_stationary(const ProductKernel& k, const LevyMeasure& nu, double z,
                                      const AnalyticOptions& opts) {
    if (z == 0.0) return {};
    const double tol = opts.quad.abs_tol;
    SBox box;
    for (const Kernel1D& kern : k.components()) {
        const double r = s_truncation_radius(kern, nu, tol, 1, std::abs(z));
        box.domains.push_back(Domain::full_line(r));
        std::vector<double> cuts;
        for (double b : kern.breakpoints()) cuts.push_back(-b);
        box.cuts.push_back(std::move(cuts));
    }
    const SFunction jfun = [&](std::span<const double> s) {
        double v = z;
        for (std::size_t j = 0; j < k.dimension(); ++j) v *= k[j].f(-s[j]);
        return v;
    };
    auto r = shot_noise_log_cf(nu, jfun, box, opts.quad);
    r.value -= Complex(0.0, z * shift_constant(k, nu, opts));
    return r;
}

double j_t(const ProductKernel& k, const FddSpec& spec, std::span<const double> s) {
    require_antiderivative(k, "J_T");
    double total = 0.0;
    for (std::size_t j = 0; j < spec.ls.size(); ++j) {
        double prod = spec.zs[j];
        for (std::size_t dim = 0; dim < spec.d && prod != 0.0; ++dim) {
            const double l = spec.ls[j][dim];
            prod *= window_increment(k[dim], l - s[dim], spec.T + l - s[dim]);
        }
        total += prod;
    }
    return total;
}

QuadResult<Complex> log_cf_window(const ProductKernel& k, const LevyMeasure& nu, const FddSpec& spec,
                                  const AnalyticOptions& opts) {
    spec.validate();
    require_antiderivative(k, "log_cf_window");
    if (k.dimension() != spec.d) throw ConfigError("kernel dimension does not match the FDD spec");
    if (max_abs(spec.zs) == 0.0 || spec.T == 0.0) return {};
    const double offsets[] = {0.0, spec.T};
    const SBox box = window_box(k, nu, spec, offsets, opts.quad.abs_tol);
    const SFunction jfun = [&](std::span<const double> s) { return j_t(k, spec, s); };
    return shot_noise_log_cf(nu, jfun, box, opts.quad);
}

QuadResult<Complex> log_cf_limit(const ProductKernel& k, const LevyMeasure& nu, const FddSpec& spec,
                                 LimitVariant variant, const AnalyticOptions& opts) {
    spec.validate();
    require_antiderivative(k, "log_cf_limit");
    if (k.dimension() != spec.d) throw ConfigError("kernel dimension does not match the FDD spec");
    if (max_abs(spec.zs) == 0.0) return {};
    const double offsets[] = {0.0};
    const SBox box = window_box(k, nu, spec, offsets, opts.quad.abs_tol);
    auto corner_term = [&](double sign) {
        const SFunction jfun = [&, sign](std::span<const double> s) {
            double total = 0.0;
            for (std::size_t j = 0; j < spec.ls.size(); ++j) {
                double prod = spec.zs[j];
                for (std::size_t dim = 0; dim < spec.d; ++dim) prod *= k[dim].g(spec.ls[j][dim] - s[dim]);
                total += prod;
            }
            return sign * total;
        };
        return shot_noise_log_cf(nu, jfun, box, opts.quad);
    };
    const double claimed_sign = (spec.d % 2 == 0) ? 1.0 : -1.0;
    if (variant == LimitVariant::Claimed) return corner_term(claimed_sign);

    // Corners with the same number of far-end coordinates share a sign and
    // hence a log-CF; weight each sign by its binomial multiplicity.
    QuadResult<Complex> total;
    double multiplicity = 1.0;
    for (std::size_t far = 0; far <= spec.d; ++far) {
        const double sign = ((spec.d - far) % 2 == 0) ? 1.0 : -1.0;
        auto term = corner_term(sign);
        total.value += multiplicity * term.value;
        total.error_estimate += multiplicity * term.error_estimate;
        total.evaluations += term.evaluations;
        multiplicity = multiplicity * static_cast<double>(spec.d - far) / static_cast<double>(far + 1);
    }
    return total;
}

double covariance(const ProductKernel& k, const LevyMeasure& nu, std::span<const double> t,
                  const AnalyticOptions& opts) {
    if (t.size() != k.dimension()) throw ConfigError("lag dimension does not match the kernel");
    double v = second_moment(nu);
    for (std::size_t j = 0; j < k.dimension(); ++j) v *= autocorrelation(k[j], t[j], opts.quad);
    return v;
}

namespace {

std::vector<double> autocorrelation_cuts(const Kernel1D& k) {
    std::vector<double> cuts{0.0};
    const auto bp = k.breakpoints();
    if (k.kind() == KernelKind::UserTable)
        for (double a : bp)
            for (double b : bp) cuts.push_back(a - b);
    return cuts;
}

} // namespace

CovarianceIntegral covariance_integral(const ProductKernel& k, const LevyMeasure& nu, const AnalyticOptions& opts) {
    const double m2 = second_moment(nu);
    const double int_f = k.integral_f(opts.quad);
    CovarianceIntegral out{m2 * int_f * int_f, m2};
    for (const Kernel1D& kern : k.components()) {
        const double r = 2.0 * kern.decay_radius(1e-8);
        const auto cuts = autocorrelation_cuts(kern);
        out.quadrature *= integrate_line([&](double t) { return autocorrelation(kern, t, opts.quad); },
                                         Domain::full_line(r), opts.quad, cuts)
                              .value;
    }
    return out;
}

double variance_window_from_covariance(const ProductKernel& k, const LevyMeasure& nu, double T,
                                       const AnalyticOptions& opts) {
    if (!(T >= 0.0)) throw ConfigError("window side T must be >= 0");
    double v = second_moment(nu);
    if (T == 0.0) return 0.0;
    for (const Kernel1D& kern : k.components()) {
        const auto cuts = autocorrelation_cuts(kern);
        v *= 2.0 * integrate_line([&](double tau) { return (T - tau) * autocorrelation(kern, tau, opts.quad); },
                                  Domain::finite(0.0, T), opts.quad, cuts)
                       .value;
    }
    return v;
}

double variance_window(const ProductKernel& k, const LevyMeasure& nu, double T, const AnalyticOptions& opts) {
    if (!k.has_antiderivative()) return variance_window_from_covariance(k, nu, T, opts);
    if (!(T >= 0.0)) throw ConfigError("window side T must be >= 0");
    double v = second_moment(nu);
    if (T == 0.0) return 0.0;
    for (const Kernel1D& kern : k.components()) {
        const double r = kern.decay_radius(opts.quad.abs_tol);
        std::vector<double> cuts;
        for (double b : kern.breakpoints()) {
            cuts.push_back(-b);
            cuts.push_back(T - b);
        }
        v *= integrate_line(
                 [&](double s) {
                     const double inc = window_increment(kern, -s, T - s);
                     return inc * inc;
                 },
                 Domain::finite(-r, T + r), opts.quad, cuts)
                 .value;
    }
    return v;
}

ConditionsReport check_conditions(const ProductKernel& k, const LevyMeasure& nu, std::size_t budget,
                                  const AnalyticOptions& opts) {
    QuadOptions quad = opts.quad;
    quad.max_evaluations = budget;

    using Integrand = std::function<double(double)>;
    const std::array<Integrand, 3> conditions = {
        // (i) |f| * | int_{1<=|x|<=1/|f|} x nu - int_{1/|f|<=|x|<=1} x nu |
        [&nu](double af) {
            if (af == 0.0) return 0.0;
            const double inv = 1.0 / af;
            const double upper = shell_moment(nu, 1, false, 1.0, inv);
            const double lower = shell_moment(nu, 1, false, inv, 1.0);
            return af * std::abs(upper - lower);
        },
        // (ii) nu(|x| >= 1/|f|)
        [&nu](double af) {
            if (af == 0.0) return 0.0;
            return shell_moment(nu, 0, true, 1.0 / af, kInf, Endpoints::Closed);
        },
        // (iii) |f|^2 int_{|x| < 1/|f|} x^2 nu
        [&nu](double af) {
            if (af == 0.0) return 0.0;
            return af * af * shell_moment(nu, 2, true, 0.0, 1.0 / af, Endpoints::OpenHigh);
        },
    };

    SBox box;
    for (const Kernel1D& kern : k.components()) {
        box.domains.push_back(Domain::full_line(kern.decay_radius(1e-3 * quad.abs_tol)));
        box.cuts.emplace_back(kern.breakpoints().begin(), kern.breakpoints().end());
    }

    ConditionsReport report;
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        const Integrand& inner = conditions[c];
        try {
            if (k.dimension() == 1) {
                auto r = integrate_adaptive([&](double s) { return inner(std::abs(k[0].f(s))); }, box.domains[0],
                                            quad, box.cuts[0]);
                report.values[c] = r.value;
                report.error_estimates[c] = r.error_estimate;
                report.pass[c] = r.converged && std::isfinite(r.value);
            } else {
                std::function<double(std::span<const double>)> h = [&](std::span<const double> s) {
                    return inner(std::abs(k.f(s)));
                };
                auto r = integrate_box<double>(h, box.domains, box.cuts, quad);
                report.values[c] = r.value;
                report.error_estimates[c] = r.error_estimate;
                report.pass[c] = std::isfinite(r.value);
            }
        } catch (const NonConvergence&) {
            report.values[c] = std::numeric_limits<double>::quiet_NaN();
            report.error_estimates[c] = std::numeric_limits<double>::infinity();
            report.pass[c] = false;
        }
    }
    return report;
}

} // namespace idma
