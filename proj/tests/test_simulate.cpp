#include <doctest.h>

#include <cmath>

#include "idma/error.hpp"
#include "idma/simulate.hpp"
#include "idma/verify.hpp"
#include "oracles.hpp"

using namespace idma;

namespace {

const Kernel1D ou = Kernel1D::signed_ou();
const LevyMeasure two_point = LevyMeasure::two_point(1.0);

JumpSet empty_set(std::size_t d) {
    JumpSet j;
    j.d = d;
    return j;
}

} // namespace

TEST_SUITE("simulate") {

TEST_CASE("jump counts are Poisson with the truncated mass") {
    const Domain w[] = {Domain::finite(0.0, 10.0)};
    double dickman = 0.0;
    double tp = 0.0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
        RandomStream a(1, r);
        RandomStream b(2, r);
        dickman += static_cast<double>(sample_jumps(LevyMeasure::dickman(), w, 0.01, a).size());
        tp += static_cast<double>(sample_jumps(two_point, w, 1e-3, b).size());
    }
    const double mean_d = 10.0 * std::log(100.0);
    CHECK(std::abs(dickman / reps - mean_d) < 4.0 * std::sqrt(mean_d / reps));
    CHECK(std::abs(tp / reps - 10.0) < 4.0 * std::sqrt(10.0 / reps));
    RandomStream c(3);
    CHECK_THROWS_AS(sample_jumps(LevyMeasure::dickman(), w, 1.0, c), EmptyTruncation);
}

TEST_CASE("jump locations stay in the window") {
    const Domain w[] = {Domain::finite(-2.0, 3.0), Domain::finite(1.0, 1.5)};
    RandomStream rng(8);
    const auto jumps = sample_jumps(LevyMeasure::dickman(), w, 0.01, rng);
    CHECK(jumps.size() > 0);
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const auto s = jumps.location(i);
        CHECK(s[0] >= -2.0);
        CHECK(s[0] <= 3.0);
        CHECK(s[1] >= 1.0);
        CHECK(s[1] <= 1.5);
        CHECK(jumps.sizes[i] >= 0.01);
    }
}

TEST_CASE("eval_field examples") {
    const double t1[] = {1.0};
    CHECK(eval_field(empty_set(1), ou, 0.0, t1) == 0.0);
    JumpSet one = empty_set(1);
    one.add(std::vector<double>{0.0}, 1.0);
    CHECK(eval_field(one, ou, 0.0, t1) == doctest::Approx(-std::exp(-1.0)));
    JumpSet two = empty_set(1);
    two.add(std::vector<double>{0.0}, 1.0);
    two.add(std::vector<double>{1.0}, -1.0);
    const double t[] = {0.5};
    CHECK(eval_field(two, ou, 0.0, t) == doctest::Approx(-2.0 * std::exp(-0.5)));
    CHECK(eval_field(two, ou, 0.25, t) == doctest::Approx(-2.0 * std::exp(-0.5) - 0.25));
}

TEST_CASE("window_integral examples") {
    const double l0[] = {0.0};
    CHECK(window_integral(empty_set(1), ou, 1.0, l0) == 0.0);
    JumpSet one = empty_set(1);
    one.add(std::vector<double>{0.0}, 1.0);
    CHECK(window_integral(one, ou, 1.0, l0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
    JumpSet two = empty_set(2);
    two.add(std::vector<double>{0.0, 0.0}, 2.0);
    const ProductKernel ou2(std::vector<Kernel1D>{ou, ou});
    const double l00[] = {0.0, 0.0};
    CHECK(window_integral(two, ou2, 1.0, l00) == doctest::Approx(2.0 * std::pow(std::exp(-1.0) - 1.0, 2)));
}

TEST_CASE("window_integral without an antiderivative falls back to quadrature") {
    JumpSet one = empty_set(1);
    one.add(std::vector<double>{0.5}, 2.0);
    const double l0[] = {0.0};
    // 2 * int_0^3 e^{-|t - 0.5|}/2 dt - a * 3
    const double ref = (1.0 - std::exp(-0.5)) + (1.0 - std::exp(-2.5));
    CHECK(window_integral(one, Kernel1D::persistent_control(), 3.0, l0, 0.1) ==
          doctest::Approx(ref - 0.3).epsilon(1e-9));
}

TEST_CASE("limit_value examples") {
    const double l0[] = {0.0};
    CHECK(limit_value(empty_set(1), ou, l0) == 0.0);
    JumpSet one = empty_set(1);
    one.add(std::vector<double>{0.0}, 1.0);
    CHECK(limit_value(one, ou, l0) == doctest::Approx(-1.0));
    JumpSet two = empty_set(2);
    two.add(std::vector<double>{1.0, 1.0}, 1.0);
    const ProductKernel ou2(std::vector<Kernel1D>{ou, ou});
    const double l00[] = {0.0, 0.0};
    CHECK(limit_value(two, ou2, l00) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("window_integral matches grid quadrature of eval_field with second-order error") {
    const ProductKernel k(std::vector<Kernel1D>{ou, ou});
    JumpSet one = empty_set(2);
    one.add(std::vector<double>{-0.5, -0.25}, 1.5);
    const double l[] = {0.0, 0.0};
    const double exact = window_integral(one, k, 1.0, l);
    auto trapezoid = [&](int n) {
        const double h = 1.0 / n;
        double sum = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                const double t[] = {i * h, j * h};
                const double w = ((i == 0 || i == n) ? 0.5 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
                sum += w * eval_field(one, k, 0.0, t);
            }
        return sum * h * h;
    };
    const double e1 = std::abs(trapezoid(16) - exact);
    const double e2 = std::abs(trapezoid(32) - exact);
    const double e3 = std::abs(trapezoid(64) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("monte_carlo with one replicate is one sample_jumps run") {
    SimConfig cfg{ou, LevyMeasure::dickman(), 3.0, {{0.0}, {1.0}}, 1e-3, std::nullopt, 1, 99};
    const auto m = monte_carlo(cfg);
    RandomStream stream(99, 0);
    const auto jumps = sample_jumps(cfg, stream);
    const double l0[] = {0.0};
    const double l1[] = {1.0};
    CHECK(m.S(0, 0) == window_integral(jumps, ou, 3.0, l0));
    CHECK(m.S(0, 1) == window_integral(jumps, ou, 3.0, l1));
    CHECK(m.Y(0, 1) == limit_value(jumps, ou, l1));
}

TEST_CASE("replicate moments match the analytic mean and variance") {
    SimConfig cfg{ou, two_point, 2.0, {{0.0}}, 1e-3, std::nullopt, 100000, 7};
    const auto m = sample_moments(monte_carlo(cfg).column_S(0));
    CHECK(std::abs(m.mean) < 4.0 * m.mean_se);
    CHECK(std::abs(m.variance - 1.187988) < 4.0 * m.variance_se);
}

TEST_CASE("Dickman window integrals are centred") {
    SimConfig cfg{ou, LevyMeasure::dickman(), 10.0, {{0.0}}, 1e-3, std::nullopt, 20000, 4};
    const auto m = sample_moments(monte_carlo(cfg).column_S(0));
    CHECK(std::abs(m.mean) < 4.0 * m.mean_se);
}

TEST_CASE("persistent control keeps the exact mean under truncation") {
    // E S_T = a_sim-corrected drift: int f * int_{|y|>=eps} y nu * T - a_sim T = 0 by construction
    SimConfig cfg{Kernel1D::persistent_control(), LevyMeasure::dickman(), 2.0, {{0.0}}, 0.05, std::nullopt, 5000, 12};
    const auto m = sample_moments(monte_carlo(cfg).column_S(0));
    CHECK(std::abs(m.mean) < 4.0 * m.mean_se + 1e-3);
}

TEST_CASE("empirical_cf examples") {
    std::vector<double> zeros(200, 0.0);
    const double z[] = {0.0, 1.0, -3.0};
    const auto cf = empirical_cf(zeros, z);
    for (const auto& v : cf.values) CHECK(v == Complex(1.0, 0.0));
    CHECK(cf.band == doctest::Approx(3.0 / std::sqrt(200.0)));
    std::vector<double> few(50, 0.0);
    CHECK_THROWS_AS(empirical_cf(few, z), ConfigError);
}

TEST_CASE("empirical CF at T = 40 is within 5/sqrt(N) of the analytic CF") {
    SimConfig cfg{ou, two_point, 40.0, {{0.0}}, 1e-3, std::nullopt, 100000, 2024};
    const auto samples = monte_carlo(cfg).column_S(0);
    const double z[] = {1.0};
    const auto cf = empirical_cf(samples, z);
    const Complex analytic = std::exp(log_cf_window(ou, two_point, FddSpec::single(1, {0.0}, 1.0, 40.0)).value);
    CHECK(std::abs(cf.values[0] - analytic) <= 5.0 / std::sqrt(100000.0));
}

TEST_CASE("monte_carlo is identical for 1, 4 and 16 workers") {
    SimConfig cfg{ou, LevyMeasure::truncated_stable(0.7, 1.0), 5.0, {{0.0}, {2.0}}, 1e-2, std::nullopt, 3000, 5};
    const auto a = monte_carlo(cfg, 1);
    const auto b = monte_carlo(cfg, 4);
    const auto c = monte_carlo(cfg, 16);
    CHECK(a.window_integrals == b.window_integrals);
    CHECK(a.window_integrals == c.window_integrals);
    CHECK(a.limit_values == b.limit_values);
    CHECK(a.limit_values == c.limit_values);
}

TEST_CASE("halving epsilon changes the variance by at most the discarded variance") {
    const auto nu = LevyMeasure::dickman();
    const double eps = 0.2;
    SimConfig coarse{ou, nu, 3.0, {{0.0}}, eps, std::nullopt, 20000, 31};
    SimConfig fine = coarse;
    fine.epsilon = eps / 2.0;
    const auto a = sample_moments(monte_carlo(coarse).column_S(0));
    const auto b = sample_moments(monte_carlo(fine).column_S(0));
    const double bound = small_jump_variance(nu, eps) * norms(ou).l2sq_f;
    CHECK(std::abs(a.variance - b.variance) < bound + 4.0 * std::hypot(a.variance_se, b.variance_se));
}

TEST_CASE("doubling the window pad changes window integrals by the tail of g") {
    const double pad = 4.0;
    const double T = 2.0;
    const Domain big[] = {Domain::finite(-2.0 * pad, T + 2.0 * pad)};
    const double l0[] = {0.0};
    double mean_diff = 0.0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        RandomStream rng(77, r);
        const JumpSet all = sample_jumps(two_point, big, 1e-3, rng);
        JumpSet inner = empty_set(1);
        for (std::size_t i = 0; i < all.size(); ++i)
            if (all.locations[i] >= -pad && all.locations[i] <= T + pad) inner.add(all.location(i), all.sizes[i]);
        mean_diff += std::abs(window_integral(all, ou, T, l0) - window_integral(inner, ou, T, l0));
    }
    mean_diff /= reps;
    // E sum_outside |y| |g(T - s) - g(-s)| <= abs_moment * 2 int_pad^inf e^{-u} du on each side
    const double bound = abs_moment(two_point) * 4.0 * std::exp(-pad);
    CHECK(mean_diff <= bound);
}

TEST_CASE("parallel_for propagates exceptions") {
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 6) throw ConfigError("boom");
                                 }),
                    ConfigError);
}

TEST_CASE("simulation config validation") {
    SimConfig bad{ou, two_point, -1.0, {{0.0}}, 1e-3, std::nullopt, 10, 0};
    CHECK_THROWS_AS(monte_carlo(bad), ConfigError);
    SimConfig dims{ou, two_point, 1.0, {{0.0, 1.0}}, 1e-3, std::nullopt, 10, 0};
    CHECK_THROWS_AS(monte_carlo(dims), ConfigError);
}

}
