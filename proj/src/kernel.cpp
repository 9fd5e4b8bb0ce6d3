#include "idma/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "idma/error.hpp"

namespace idma {

namespace {

constexpr double kTableEndTolerance = 1e-12;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
}

} // namespace

Kernel1D Kernel1D::signed_ou() {
    Kernel1D k(KernelKind::SignedOU);
    k.breakpoints_ = {0.0};
    return k;
}

Kernel1D Kernel1D::gauss_deriv() { return Kernel1D(KernelKind::GaussDeriv); }

Kernel1D Kernel1D::persistent_control() {
    Kernel1D k(KernelKind::PersistentControl);
    k.breakpoints_ = {0.0};
    return k;
}

Kernel1D Kernel1D::user_table(std::vector<double> xs, std::vector<double> gs) {
    if (xs.size() != gs.size()) throw ConfigError("user_table: x and g columns differ in length");
    if (xs.size() < 2) throw ConfigError("user_table: need at least two rows");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(gs[i])) throw ConfigError("user_table: non-finite entry");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError("user_table: x must be strictly increasing");
    }
    if (std::abs(gs.front()) > kTableEndTolerance || std::abs(gs.back()) > kTableEndTolerance)
        throw ConfigError("user_table: g must vanish at both ends of the table");
    gs.front() = 0.0;
    gs.back() = 0.0;
    Kernel1D k(KernelKind::UserTable);
    k.breakpoints_ = xs;
    k.table_ = std::make_shared<const Table>(Table{std::move(xs), std::move(gs)});
    return k;
}

Kernel1D Kernel1D::user_table_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kernel table '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> xs;
    std::vector<double> gs;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto cells = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (cells.size() == 2 && cells[0] == "x" && cells[1] == "g") continue;
            throw ConfigError(path + ": expected header 'x,g'");
        }
        if (cells.size() != 2) throw ConfigError(path + ":" + std::to_string(line_no) + ": expected two columns");
        xs.push_back(parse_number(cells[0], path, line_no));
        gs.push_back(parse_number(cells[1], path, line_no));
    }
    return user_table(std::move(xs), std::move(gs));
}

std::string Kernel1D::name() const {
    switch (kind_) {
    case KernelKind::SignedOU: return "signed_ou";
    case KernelKind::GaussDeriv: return "gauss_deriv";
    case KernelKind::PersistentControl: return "persistent_control";
    case KernelKind::UserTable: return "user_table";
    }
    return "unknown";
}

double Kernel1D::f(double x) const {
    const double u = x - shift_;
    switch (kind_) {
    case KernelKind::SignedOU:
        if (u > 0.0) return -std::exp(-u);
        if (u < 0.0) return std::exp(u);
        return 0.0;
    case KernelKind::GaussDeriv: return -2.0 * u * std::exp(-u * u);
    case KernelKind::PersistentControl: return 0.5 * std::exp(-std::abs(u));
    case KernelKind::UserTable: {
        const auto& xs = table_->xs;
        const auto& gs = table_->gs;
        if (!(u >= xs.front() && u < xs.back())) return 0.0;
        const auto i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), u) - xs.begin());
        return (gs[i] - gs[i - 1]) / (xs[i] - xs[i - 1]);
    }
    }
    return 0.0;
}

double Kernel1D::g(double x) const {
    if (std::isinf(x)) {
        if (!has_antiderivative()) throw NotAvailable(name() + " kernel has no antiderivative");
        return 0.0;
    }
    const double u = x - shift_;
    switch (kind_) {
    case KernelKind::SignedOU: return std::exp(-std::abs(u));
    case KernelKind::GaussDeriv: return std::exp(-u * u);
    case KernelKind::PersistentControl: throw NotAvailable(name() + " kernel has no antiderivative");
    case KernelKind::UserTable: {
        const auto& xs = table_->xs;
        const auto& gs = table_->gs;
        if (!(u > xs.front() && u < xs.back())) return 0.0;
        const auto i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), u) - xs.begin());
        const double w = (u - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return gs[i - 1] + w * (gs[i] - gs[i - 1]);
    }
    }
    return 0.0;
}

double Kernel1D::decay_radius(double tol) const {
    double r = 0.0;
    switch (kind_) {
    case KernelKind::SignedOU: r = std::max(0.0, -std::log(tol)); break;
    case KernelKind::PersistentControl: r = std::max(0.0, -std::log(2.0 * tol)); break;
    case KernelKind::GaussDeriv: {
        // max(e^{-R^2}, 2R e^{-R^2}) <= tol; both are decreasing for R >= 1.
        r = std::max(1.0, std::sqrt(std::max(0.0, -std::log(tol))));
        for (int it = 0; it < 60; ++it) r = std::max(1.0, std::sqrt(std::log(2.0 * r / tol)));
        break;
    }
    case KernelKind::UserTable:
        r = std::max(std::abs(table_->xs.front()), std::abs(table_->xs.back()));
        break;
    }
    return r + std::abs(shift_);
}

std::span<const double> Kernel1D::breakpoints() const noexcept { return breakpoints_; }

Kernel1D Kernel1D::shifted(double shift) const {
    Kernel1D k = *this;
    k.shift_ += shift;
    for (double& b : k.breakpoints_) b += shift;
    return k;
}

double window_increment(const Kernel1D& k, double a, double b) {
    if (!k.has_antiderivative()) throw NotAvailable(k.name() + " kernel has no antiderivative");
    return k.g(b) - k.g(a);
}

double integrate_f(const Kernel1D& k, double a, double b, const QuadOptions& opts) {
    if (k.has_antiderivative()) return window_increment(k, a, b);
    const double r = k.decay_radius(opts.abs_tol * 1e-3);
    const double sign = (a <= b) ? 1.0 : -1.0;
    const double lo = std::max(std::min(a, b), -r);
    const double hi = std::min(std::max(a, b), r);
    if (!(lo < hi)) return 0.0;
    return sign * integrate_line([&](double x) { return k.f(x); }, Domain::finite(lo, hi), opts, k.breakpoints())
                      .value;
}

KernelNorms norms(const Kernel1D& k) {
    switch (k.kind()) {
    case KernelKind::SignedOU: return {2.0, 1.0, 2.0, 1.0};
    case KernelKind::GaussDeriv: {
        const double half_pi_root = std::sqrt(std::numbers::pi / 2.0);
        return {2.0, half_pi_root, std::sqrt(std::numbers::pi), half_pi_root};
    }
    case KernelKind::PersistentControl: return {1.0, 0.25, std::nullopt, std::nullopt};
    case KernelKind::UserTable: break;
    }
    // Piecewise-linear g: every norm is a closed-form sum over segments.
    std::vector<double> xs;
    std::vector<double> gs;
    const auto bp = k.breakpoints();
    for (double x : bp) {
        xs.push_back(x);
        gs.push_back(k.g(x));
    }
    // g(x) at the table ends is the limit from inside, which is zero.
    gs.front() = 0.0;
    gs.back() = 0.0;
    KernelNorms n{0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double dx = xs[i] - xs[i - 1];
        const double a = gs[i - 1];
        const double b = gs[i];
        const double dg = b - a;
        n.l1_f += std::abs(dg);
        n.l2sq_f += dg * dg / dx;
        if (a * b >= 0.0)
            *n.l1_g += dx * 0.5 * (std::abs(a) + std::abs(b));
        else
            *n.l1_g += dx * 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b));
        *n.l2sq_g += dx * (a * a + a * b + b * b) / 3.0;
    }
    return n;
}

double integral_f(const Kernel1D& k, const QuadOptions& opts) {
    if (k.has_antiderivative()) return 0.0;
    const double r = k.decay_radius(opts.abs_tol * 1e-3);
    return integrate_line([&](double x) { return k.f(x); }, Domain::full_line(r), opts, k.breakpoints()).value;
}

double check_derivative(const Kernel1D& k, std::span<const double> grid, double h) {
    double worst = 0.0;
    const auto bp = k.breakpoints();
    for (double x : grid) {
        const bool near_kink =
            std::any_of(bp.begin(), bp.end(), [&](double b) { return std::abs(x - b) <= h; });
        if (near_kink) continue;
        const double fd = (k.g(x + h) - k.g(x - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - k.f(x)));
    }
    return worst;
}

double autocorrelation(const Kernel1D& k, double t, const QuadOptions& opts) {
    const double at = std::abs(t);
    switch (k.kind()) {
    case KernelKind::SignedOU: return std::exp(-at) * (1.0 - at);
    case KernelKind::GaussDeriv: return std::sqrt(std::numbers::pi / 2.0) * (1.0 - t * t) * std::exp(-0.5 * t * t);
    case KernelKind::PersistentControl: return 0.25 * (1.0 + at) * std::exp(-at);
    case KernelKind::UserTable: break;
    }
    std::vector<double> cuts;
    for (double b : k.breakpoints()) {
        cuts.push_back(b);
        cuts.push_back(b - t);
    }
    const auto bp = k.breakpoints();
    const Domain dom = Domain::finite(bp.front(), bp.back());
    return integrate_line([&](double u) { return k.f(u) * k.f(u + t); }, dom, opts, cuts).value;
}

ProductKernel::ProductKernel(std::vector<Kernel1D> components) : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("product kernel needs at least one component");
}

bool ProductKernel::has_antiderivative() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](const Kernel1D& k) { return k.has_antiderivative(); });
}

double ProductKernel::f(std::span<const double> x) const {
    double v = 1.0;
    for (std::size_t j = 0; j < components_.size(); ++j) v *= components_[j].f(x[j]);
    return v;
}

double ProductKernel::g(std::span<const double> x) const {
    double v = 1.0;
    for (std::size_t j = 0; j < components_.size(); ++j) v *= components_[j].g(x[j]);
    return v;
}

double ProductKernel::window_increment(std::span<const double> lo, std::span<const double> hi) const {
    double v = 1.0;
    for (std::size_t j = 0; j < components_.size(); ++j) v *= idma::window_increment(components_[j], lo[j], hi[j]);
    return v;
}

double ProductKernel::integral_f(const QuadOptions& opts) const {
    double v = 1.0;
    for (const Kernel1D& k : components_) v *= idma::integral_f(k, opts);
    return v;
}

} // namespace idma
