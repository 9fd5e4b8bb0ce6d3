#include "idma/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "idma/error.hpp"

namespace idma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool strictly_decreasing_tail(const std::vector<double>& v) {
    if (v.size() < 3) return false;
    const std::size_t n = v.size();
    return v[n - 3] > v[n - 2] && v[n - 2] > v[n - 1];
}

} // namespace

std::string to_string(Winner w) {
    switch (w) {
    case Winner::Claimed: return "claimed";
    case Winner::BoundaryAugmented: return "boundary_augmented";
    case Winner::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string to_string(LimitVariant v) {
    return v == LimitVariant::Claimed ? "claimed" : "boundary_augmented";
}

std::string to_string(HyperClass c) { return c == HyperClass::Hyperuniform ? "hyperuniform" : "persistent"; }

std::vector<double> default_z_grid() {
    std::vector<double> z;
    for (int i = -20; i <= 20; ++i) z.push_back(0.25 * i);
    return z;
}

ConvergenceReport cf_convergence(const ProductKernel& k, const LevyMeasure& nu, const FddSpec& base,
                                 std::span<const double> T_grid, std::span<const double> z_grid,
                                 const ConvergenceOptions& opts) {
    base.validate();
    if (!k.has_antiderivative()) throw NotAvailable("cf_convergence needs a derivative kernel");
    for (std::size_t i = 1; i < T_grid.size(); ++i)
        if (!(T_grid[i] > T_grid[i - 1])) throw ConfigError("T-grid must be strictly increasing");

    const std::size_t nz = z_grid.size();
    std::vector<Complex> claimed(nz);
    std::vector<Complex> boundary(nz);
    parallel_for(nz, opts.threads, [&](std::size_t i) {
        const FddSpec spec = base.scaled(z_grid[i]);
        claimed[i] = std::exp(log_cf_limit(k, nu, spec, LimitVariant::Claimed, opts.analytic).value);
        boundary[i] = std::exp(log_cf_limit(k, nu, spec, LimitVariant::BoundaryAugmented, opts.analytic).value);
    });

    ConvergenceReport report;
    report.z_grid.assign(z_grid.begin(), z_grid.end());
    report.threshold = opts.threshold;
    report.entries.resize(T_grid.size());
    parallel_for(T_grid.size(), opts.threads, [&](std::size_t t) {
        ConvergenceEntry e{T_grid[t], 0.0, 0.0, true};
        try {
            for (std::size_t i = 0; i < nz; ++i) {
                FddSpec spec = base.scaled(z_grid[i]);
                spec.T = T_grid[t];
                const Complex phi = std::exp(log_cf_window(k, nu, spec, opts.analytic).value);
                e.dist_claimed = std::max(e.dist_claimed, std::abs(phi - claimed[i]));
                e.dist_boundary = std::max(e.dist_boundary, std::abs(phi - boundary[i]));
            }
        } catch (const NonConvergence&) {
            e.converged = false;
            e.dist_claimed = kInf;
            e.dist_boundary = kInf;
        }
        report.entries[t] = e;
    });

    std::vector<double> dc;
    std::vector<double> db;
    bool all_converged = true;
    for (const auto& e : report.entries) {
        dc.push_back(e.dist_claimed);
        db.push_back(e.dist_boundary);
        all_converged = all_converged && e.converged;
    }
    report.claimed_monotone = strictly_decreasing_tail(dc);
    report.boundary_monotone = strictly_decreasing_tail(db);
    const bool claimed_ok = all_converged && !dc.empty() && report.claimed_monotone && dc.back() <= opts.threshold;
    const bool boundary_ok =
        all_converged && !db.empty() && report.boundary_monotone && db.back() <= opts.threshold;
    if (claimed_ok && !boundary_ok)
        report.winner = Winner::Claimed;
    else if (boundary_ok && !claimed_ok)
        report.winner = Winner::BoundaryAugmented;
    else
        report.winner = Winner::Inconclusive;
    return report;
}

SampleMoments sample_moments(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    if (xs.size() < 2) throw ConfigError("need at least two samples for moments");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : xs) {
        const double c = x - mean;
        const double c2 = c * c;
        m2 += c2;
        m4 += c2 * c2;
    }
    m2 /= n;
    m4 /= n;
    const double var = m2 * n / (n - 1.0);
    return {mean, var, std::sqrt(var / n), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

ConsistencyReport mc_consistency(const SimConfig& cfg, std::span<const double> z_grid,
                                 const ConsistencyOptions& opts) {
    cfg.validate();
    if (cfg.replicates < 10'000) throw ConfigError("mc_consistency needs at least 10^4 replicates");
    if (!cfg.kernel.has_antiderivative()) throw NotAvailable("mc_consistency needs a derivative kernel");

    const ReplicateMatrix sims = monte_carlo(cfg, opts.threads);
    ConsistencyReport report;
    report.replicates = cfg.replicates;
    report.band = opts.band_constant / std::sqrt(static_cast<double>(cfg.replicates));
    report.z_grid.assign(z_grid.begin(), z_grid.end());
    report.pass = true;

    double var_analytic = std::numeric_limits<double>::quiet_NaN();
    try {
        var_analytic = variance_window(cfg.kernel, cfg.measure, cfg.T, opts.analytic);
    } catch (const DivergentMoment&) {
    }

    for (std::size_t j = 0; j < sims.points; ++j) {
        const auto samples = sims.column_S(j);
        const auto cf = empirical_cf(samples, z_grid, opts.band_constant);
        PointConsistency p{};
        p.l_index = j;
        for (std::size_t i = 0; i < z_grid.size(); ++i) {
            const FddSpec spec = FddSpec::single(cfg.dimension(), cfg.ls[j], z_grid[i], cfg.T);
            const Complex analytic = std::exp(log_cf_window(cfg.kernel, cfg.measure, spec, opts.analytic).value);
            p.max_cf_deviation = std::max(p.max_cf_deviation, std::abs(cf.values[i] - analytic));
        }
        const SampleMoments m = sample_moments(samples);
        p.mean = m.mean;
        p.mean_se = m.mean_se;
        p.var_empirical = m.variance;
        p.var_se = m.variance_se;
        p.var_analytic = var_analytic;
        p.cf_pass = p.max_cf_deviation <= report.band;
        p.mean_pass = std::abs(m.mean) <= opts.se_multiplier * m.mean_se;
        p.var_pass = std::isnan(var_analytic) || std::abs(m.variance - var_analytic) <= opts.se_multiplier * m.variance_se;
        report.pass = report.pass && p.cf_pass && p.mean_pass && p.var_pass;
        report.points.push_back(p);
    }
    return report;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 100 || b.size() < 100) throw ConfigError("ks_two_sample needs at least 100 values per sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    const double crit = 1.628 * std::sqrt((n + m) / (n * m));
    return {d, crit, d > crit};
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

HyperReport hyperuniformity(const ProductKernel& k, const LevyMeasure& nu, std::span<const double> T_grid,
                            std::size_t N, const HyperOptions& opts) {
    if (T_grid.size() < 3) throw ConfigError("hyperuniformity classification needs at least three T values");
    second_moment(nu); // DivergentMoment surfaces here

    const ProductKernel control(std::vector<Kernel1D>(k.dimension(), Kernel1D::persistent_control()));
    HyperReport report;
    report.T_grid.assign(T_grid.begin(), T_grid.end());
    for (double T : T_grid) {
        report.var_analytic.push_back(variance_window(k, nu, T, opts.analytic));
        report.control_var_analytic.push_back(variance_window(control, nu, T, opts.analytic));
    }

    if (N > 0) {
        auto simulate_curve = [&](const ProductKernel& kernel, std::vector<double>& var, std::vector<double>& se) {
            for (double T : T_grid) {
                SimConfig cfg{kernel, nu, T, {Point(kernel.dimension(), 0.0)}, opts.epsilon, std::nullopt, N,
                              opts.seed};
                const auto sims = monte_carlo(cfg, opts.threads);
                const SampleMoments m = sample_moments(sims.window_integrals);
                var.push_back(m.variance);
                se.push_back(m.variance_se);
            }
        };
        simulate_curve(k, report.var_empirical, report.var_se);
        simulate_curve(control, report.control_var_empirical, report.control_var_se);
    }

    report.control_slope = least_squares_slope(report.T_grid, report.control_var_analytic);
    const std::size_t n = report.var_analytic.size();
    const double last = report.var_analytic[n - 1];
    const double prev = report.var_analytic[n - 2];
    const bool bounded = std::abs(last - prev) <= 0.1 * std::abs(prev);
    report.classification = (bounded && report.control_slope > 0.0) ? HyperClass::Hyperuniform : HyperClass::Persistent;
    return report;
}

ReflectionSamples reflection_samples(const Kernel1D& k, const LevyMeasure& nu, std::size_t N, std::uint64_t seed,
                                     double epsilon, unsigned threads) {
    if (!k.has_antiderivative()) throw NotAvailable("reflection identity needs a derivative kernel");
    const double r = k.decay_radius(1e-8);
    const Domain window[] = {Domain::full_line(r)};
    ReflectionSamples out;
    out.reflected.resize(N);
    out.direct.resize(N);
    parallel_for(N, threads, [&](std::size_t i) {
        RandomStream first(seed, 2 * i);
        RandomStream second(seed, 2 * i + 1);
        const JumpSet a = sample_jumps(nu, window, epsilon, first);
        const JumpSet b = sample_jumps(nu, window, epsilon, second);
        double reflected = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) reflected -= a.sizes[j] * k.g(-a.locations[j]);
        double direct = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) direct += b.sizes[j] * k.g(b.locations[j]);
        out.reflected[i] = reflected;
        out.direct[i] = direct;
    });
    return out;
}

} // namespace idma
