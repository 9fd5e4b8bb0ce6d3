#include "idma/levy.hpp"

#include <algorithm>
#include <cmath>

#include "idma/error.hpp"

namespace idma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using PowerPiece = PowerLaw;

PowerPiece power_piece(const LevyMeasure::Parameters& p) {
    return std::visit(Overloaded{
                          [](const Dickman&) { return PowerPiece{1.0, 0.0, 0.0, 1.0}; },
                          [](const TruncatedStable& t) { return PowerPiece{t.scale, t.beta, 0.0, 1.0}; },
                          [](const InnerTruncatedStable& t) {
                              return PowerPiece{t.scale, t.alpha, t.delta, kInf};
                          },
                          [](const TwoPoint&) { return PowerPiece{0.0, 0.0, 1.0, 1.0}; },
                      },
                      p);
}

// int_a^b y^order * scale * y^(-1-index) dy, 0 <= a <= b <= inf.
double power_integral(const PowerPiece& piece, int order, double a, double b) {
    a = std::max(a, piece.low);
    b = std::min(b, piece.high);
    if (!(a < b)) return 0.0;
    const double e = static_cast<double>(order) - piece.index;
    if (e == 0.0) {
        if (a == 0.0 || std::isinf(b)) return kInf;
        return piece.scale * std::log(b / a);
    }
    if (e < 0.0 && a == 0.0) return kInf;
    if (e > 0.0 && std::isinf(b)) return kInf;
    const double upper = std::isinf(b) ? 0.0 : std::pow(b, e);
    const double lower = (a == 0.0) ? 0.0 : std::pow(a, e);
    return piece.scale * (upper - lower) / e;
}

bool in_shell(double m, double lo, double hi, Endpoints ends) {
    const bool low_ok = (ends == Endpoints::OpenLow || ends == Endpoints::Open) ? m > lo : m >= lo;
    const bool high_ok = (ends == Endpoints::OpenHigh || ends == Endpoints::Open) ? m < hi : m <= hi;
    return low_ok && high_ok;
}

} // namespace

LevyMeasure::LevyMeasure(Parameters params) : params_(params) {
    std::visit(Overloaded{
                   [](const Dickman&) {},
                   [](const TruncatedStable& t) {
                       if (!(t.beta > 0.0 && t.beta < 1.0))
                           throw ConfigError("truncated_stable: beta must lie in (0, 1)");
                       if (!(t.scale > 0.0)) throw ConfigError("truncated_stable: C must be positive");
                   },
                   [this](const TwoPoint& t) {
                       if (!(t.lambda > 0.0)) throw ConfigError("two_point: lambda must be positive");
                       atoms_ = {{-1.0, 0.5 * t.lambda}, {1.0, 0.5 * t.lambda}};
                   },
                   [](const InnerTruncatedStable& t) {
                       if (!(t.alpha > 1.0 && t.alpha < 2.0))
                           throw ConfigError("inner_truncated_stable: alpha must lie in (1, 2)");
                       if (!(t.scale > 0.0)) throw ConfigError("inner_truncated_stable: c must be positive");
                       if (!(t.delta > 0.0))
                           throw ConfigError("inner_truncated_stable: delta must be positive");
                   },
               },
               params_);
}

LevyKind LevyMeasure::kind() const noexcept {
    return static_cast<LevyKind>(params_.index());
}

std::string LevyMeasure::name() const {
    switch (kind()) {
    case LevyKind::Dickman: return "dickman";
    case LevyKind::TruncatedStable: return "truncated_stable";
    case LevyKind::TwoPoint: return "two_point";
    case LevyKind::InnerTruncatedStable: return "inner_truncated_stable";
    }
    return "unknown";
}

double LevyMeasure::support_bound() const noexcept {
    return std::holds_alternative<InnerTruncatedStable>(params_) ? kInf : 1.0;
}

double LevyMeasure::density(double y) const noexcept {
    if (is_atomic()) return 0.0;
    const PowerPiece piece = power_piece(params_);
    if (!is_symmetric() && y <= 0.0) return 0.0;
    const double m = std::abs(y);
    if (m == 0.0 || m < piece.low || m > piece.high) return 0.0;
    return piece.scale * std::pow(m, -1.0 - piece.index);
}

PowerLaw LevyMeasure::power_law() const noexcept { return power_piece(params_); }

double shell_moment(const LevyMeasure& nu, int order, bool absolute, double lo, double hi,
                    Endpoints endpoints) {
    lo = std::max(lo, 0.0);
    if (!(lo <= hi)) return 0.0;
    if (nu.is_atomic()) {
        double sum = 0.0;
        for (const Atom& atom : nu.atoms()) {
            if (!in_shell(std::abs(atom.location), lo, hi, endpoints)) continue;
            const double base = absolute ? std::abs(atom.location) : atom.location;
            sum += atom.mass * std::pow(base, order);
        }
        return sum;
    }
    const double half = power_integral(power_piece(nu.parameters()), order, lo, hi);
    if (!nu.is_symmetric()) return half;
    if (order % 2 == 1 && !absolute) return 0.0;
    return 2.0 * half;
}

double abs_moment(const LevyMeasure& nu) { return shell_moment(nu, 1, true, 0.0, kInf); }

double second_moment(const LevyMeasure& nu) {
    const double m2 = shell_moment(nu, 2, true, 0.0, kInf);
    if (std::isinf(m2))
        throw DivergentMoment("second moment of " + nu.name() + " Lévy measure is infinite");
    return m2;
}

double tail_mass(const LevyMeasure& nu, double eps) {
    return shell_moment(nu, 0, true, eps, kInf, Endpoints::Closed);
}

double small_jump_variance(const LevyMeasure& nu, double eps) {
    return shell_moment(nu, 2, true, 0.0, eps, Endpoints::OpenHigh);
}

double compensator_integral(const LevyMeasure& nu) {
    return shell_moment(nu, 1, false, 0.0, 1.0, Endpoints::Closed);
}

JumpSizeSampler::JumpSizeSampler(const LevyMeasure& nu, double eps) : symmetric_(nu.is_symmetric()) {
    const double mass = tail_mass(nu, eps);
    if (!(mass > 0.0)) throw EmptyTruncation(nu.name() + " has no mass above the truncation level");
    if (nu.is_atomic()) {
        double acc = 0.0;
        for (const Atom& a : nu.atoms()) {
            if (std::abs(a.location) < eps) continue;
            acc += a.mass / mass;
            atoms_.push_back({a.location, acc});
        }
        atoms_.back().mass = 1.0;
        return;
    }
    const PowerPiece piece = power_piece(nu.parameters());
    index_ = piece.index;
    low_ = std::max(eps, piece.low);
    high_ = piece.high;
    if (index_ != 0.0) {
        low_tail_ = std::pow(low_, -index_);
        high_tail_ = std::isinf(high_) ? 0.0 : std::pow(high_, -index_);
    }
}

double JumpSizeSampler::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    if (!atoms_.empty()) {
        for (const Atom& a : atoms_)
            if (u < a.mass) return a.location;
        return atoms_.back().location;
    }
    auto magnitude = [this](double v) {
        if (index_ == 0.0) return std::pow(low_, 1.0 - v) * std::pow(high_, v);
        return std::pow(low_tail_ - v * (low_tail_ - high_tail_), -1.0 / index_);
    };
    if (!symmetric_) return magnitude(u);
    if (u < 0.5) return -magnitude(1.0 - 2.0 * u);
    return magnitude(2.0 * u - 1.0);
}

double jump_size_quantile(const LevyMeasure& nu, double eps, double u) {
    return JumpSizeSampler(nu, eps).quantile(u);
}

std::vector<double> sample_jump_sizes(const LevyMeasure& nu, double eps, std::size_t n,
                                      RandomStream& rng) {
    const JumpSizeSampler sampler(nu, eps);
    std::vector<double> out(n);
    for (double& y : out) y = sampler(rng);
    return out;
}

} // namespace idma
