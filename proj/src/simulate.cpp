#include "idma/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "idma/error.hpp"

namespace idma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

JumpSet draw_jumps(const JumpSizeSampler& sampler, double mass, std::span<const Domain> window, double epsilon,
                   RandomStream& stream) {
    JumpSet jumps;
    jumps.d = window.size();
    jumps.window.assign(window.begin(), window.end());
    jumps.epsilon = epsilon;
    double volume = 1.0;
    for (const Domain& dom : window) volume *= std::max(dom.width(), 0.0);
    const std::uint64_t n = stream.poisson(volume * mass);
    jumps.locations.resize(n * jumps.d);
    jumps.sizes.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < jumps.d; ++k)
            jumps.locations[i * jumps.d + k] = window[k].lo + window[k].width() * stream.uniform();
        jumps.sizes[i] = sampler(stream);
    }
    return jumps;
}

/// Shift subtracted from simulated fields: a minus the mean of the jumps the
/// truncation discards, so the truncated field keeps the exact mean.
double simulation_shift(const SimConfig& cfg) {
    if (cfg.kernel.has_antiderivative()) return 0.0;
    const double int_f = cfg.kernel.integral_f();
    const double small_mean = shell_moment(cfg.measure, 1, false, 0.0, cfg.epsilon, Endpoints::OpenHigh);
    return shift_constant(cfg.kernel, cfg.measure) - int_f * small_mean;
}

} // namespace

void SimConfig::validate() const {
    const std::size_t d = dimension();
    if (ls.empty()) throw ConfigError("simulation needs at least one l-point");
    for (const Point& l : ls) {
        if (l.size() != d) throw ConfigError("l-point dimension does not match the kernel dimension");
        for (double x : l)
            if (!std::isfinite(x)) throw ConfigError("l-point entries must be finite");
    }
    if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("window side T must be finite and >= 0");
    if (!(epsilon > 0.0)) throw ConfigError("jump truncation epsilon must be positive");
    if (window_pad && !(*window_pad >= 0.0)) throw ConfigError("window_pad must be >= 0");
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
}

std::vector<Domain> SimConfig::window() const {
    std::vector<Domain> w;
    for (std::size_t k = 0; k < dimension(); ++k) {
        const double pad = window_pad ? *window_pad : kernel[k].decay_radius(1e-8);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const Point& l : ls) {
            lo = std::min(lo, l[k]);
            hi = std::max(hi, l[k]);
        }
        w.push_back(Domain::finite(lo - pad, T + hi + pad));
    }
    return w;
}

void JumpSet::add(std::span<const double> s, double y) {
    if (s.size() != d) throw ConfigError("jump location dimension mismatch");
    locations.insert(locations.end(), s.begin(), s.end());
    sizes.push_back(y);
}

JumpSet sample_jumps(const LevyMeasure& nu, std::span<const Domain> window, double epsilon, RandomStream& stream) {
    const JumpSizeSampler sampler(nu, epsilon);
    return draw_jumps(sampler, tail_mass(nu, epsilon), window, epsilon, stream);
}

JumpSet sample_jumps(const SimConfig& cfg, RandomStream& stream) {
    cfg.validate();
    const auto window = cfg.window();
    return sample_jumps(cfg.measure, window, cfg.epsilon, stream);
}

double eval_field(const JumpSet& jumps, const ProductKernel& kernel, double a, std::span<const double> t) {
    std::vector<double> diff(jumps.d);
    double sum = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const auto s = jumps.location(i);
        for (std::size_t k = 0; k < jumps.d; ++k) diff[k] = t[k] - s[k];
        sum += jumps.sizes[i] * kernel.f(diff);
    }
    return sum - a;
}

double window_integral(const JumpSet& jumps, const ProductKernel& kernel, double T, std::span<const double> l,
                       double a, const QuadOptions& opts) {
    const std::size_t d = jumps.d;
    const bool exact = kernel.has_antiderivative();
    double sum = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const auto s = jumps.location(i);
        double prod = jumps.sizes[i];
        for (std::size_t k = 0; k < d && prod != 0.0; ++k) {
            const double lo = l[k] - s[k];
            const double hi = T + l[k] - s[k];
            prod *= exact ? window_increment(kernel[k], lo, hi) : integrate_f(kernel[k], lo, hi, opts);
        }
        sum += prod;
    }
    return sum - a * std::pow(T, static_cast<double>(d));
}

double limit_value(const JumpSet& jumps, const ProductKernel& kernel, std::span<const double> l) {
    const std::size_t d = jumps.d;
    double sum = 0.0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const auto s = jumps.location(i);
        double prod = jumps.sizes[i];
        for (std::size_t k = 0; k < d; ++k) prod *= kernel[k].g(l[k] - s[k]);
        sum += prod;
    }
    return (d % 2 == 0) ? sum : -sum;
}

std::vector<double> sample_limit(const SimConfig& cfg, RandomStream& stream) {
    const JumpSet jumps = sample_jumps(cfg, stream);
    std::vector<double> out;
    out.reserve(cfg.ls.size());
    for (const Point& l : cfg.ls) out.push_back(limit_value(jumps, cfg.kernel, l));
    return out;
}

std::vector<double> ReplicateMatrix::column_S(std::size_t j) const {
    std::vector<double> out(replicates);
    for (std::size_t r = 0; r < replicates; ++r) out[r] = S(r, j);
    return out;
}

std::vector<double> ReplicateMatrix::column_Y(std::size_t j) const {
    std::vector<double> out(replicates);
    for (std::size_t r = 0; r < replicates; ++r) out[r] = Y(r, j);
    return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

ReplicateMatrix monte_carlo(const SimConfig& cfg, unsigned threads) {
    cfg.validate();
    const auto window = cfg.window();
    const JumpSizeSampler sampler(cfg.measure, cfg.epsilon);
    const double mass = tail_mass(cfg.measure, cfg.epsilon);
    const double a = simulation_shift(cfg);
    const bool has_limit = cfg.kernel.has_antiderivative();

    ReplicateMatrix out;
    out.replicates = cfg.replicates;
    out.points = cfg.ls.size();
    out.window_integrals.assign(out.replicates * out.points, 0.0);
    out.limit_values.assign(out.replicates * out.points, kNaN);

    parallel_for(cfg.replicates, threads, [&](std::size_t r) {
        RandomStream stream(cfg.seed, r);
        const JumpSet jumps = draw_jumps(sampler, mass, window, cfg.epsilon, stream);
        for (std::size_t j = 0; j < out.points; ++j) {
            out.window_integrals[r * out.points + j] = window_integral(jumps, cfg.kernel, cfg.T, cfg.ls[j], a);
            if (has_limit) out.limit_values[r * out.points + j] = limit_value(jumps, cfg.kernel, cfg.ls[j]);
        }
    });
    return out;
}

CfEvaluation empirical_cf(std::span<const double> samples, std::span<const double> zs, double band_constant) {
    if (samples.size() < 100) throw ConfigError("empirical_cf needs at least 100 samples");
    CfEvaluation out;
    out.zs.assign(zs.begin(), zs.end());
    const double n = static_cast<double>(samples.size());
    for (double z : zs) {
        double re = 0.0;
        double im = 0.0;
        for (double s : samples) {
            re += std::cos(z * s);
            im += std::sin(z * s);
        }
        out.values.emplace_back(re / n, im / n);
    }
    out.band = band_constant / std::sqrt(n);
    out.error_estimates.assign(zs.size(), out.band);
    return out;
}

} // namespace idma
