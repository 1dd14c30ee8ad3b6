#include "doctest.h"
#include "radsob/quadrature.hpp"

#include <cmath>
#include <functional>

using namespace radsob::quadrature;

namespace {

// Independent oracle: plain adaptive Simpson for bounded integrands.
double simpson(const std::function<double(double)>& f, double a, double b, int depth,
               double fa, double fm, double fb) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-13)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, depth - 1, fa, flm, fm) +
           simpson(f, m, b, depth - 1, fm, frm, fb);
}

double simpson_oracle(const std::function<double(double)>& f, double a, double b) {
    double m = 0.5 * (a + b);
    return simpson(f, a, b, 40, f(a), f(m), f(b));
}

}  // namespace

TEST_CASE("build_grid basic families") {
    auto g = build_grid(1.0, 16, 1.0);
    REQUIRE(g.size() == 16);
    CHECK(g.nodes[0] == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(g.nodes[7] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.nodes.back() == 1.0);

    auto h = build_grid(2.0, 16, 0.5);
    CHECK(h.min_node() == doctest::Approx(2.0 * std::pow(0.5, 15)).epsilon(1e-14));
    CHECK(h.nodes.back() == 2.0);

    auto f = build_grid(1.0, 2000, 0.99);
    CHECK(f.min_node() == doctest::Approx(std::exp(1999.0 * std::log(0.99))).epsilon(1e-12));

    CHECK_THROWS_AS(build_grid(-1.0, 100, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 4, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 100, 1.5), std::invalid_argument);
}

TEST_CASE("integrate_weighted: constants are exact across the theta range") {
    for (double theta : {-0.9, -0.5, 0.0, 1.0, 2.7}) {
        for (double R : {0.5, 1.0, 2.0}) {
            auto r = integrate_weighted([](double) { return 1.0; }, theta, R);
            REQUIRE(r.converged);
            double exact = std::pow(R, theta + 1.0) / (theta + 1.0);
            CHECK(std::abs(r.value - exact) <= 1e-10 * exact);
        }
    }
}

TEST_CASE("integrate_weighted: elementary antiderivatives") {
    auto r = integrate_weighted([](double) { return 1.0; }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));

    auto s = integrate_weighted([](double x) { return x; }, -0.5, 1.0);
    CHECK(s.value == doctest::Approx(1.0 / 1.5).epsilon(1e-11));

    // log singularity against a strongly singular weight: int_0^1 log(1/r) r^t dr = (t+1)^-2
    for (double theta : {-0.9, -0.5, 0.3}) {
        auto l = integrate_weighted([](double x) { return std::log(1.0 / x); }, theta, 1.0);
        REQUIRE(l.converged);
        CHECK(l.value == doctest::Approx(std::pow(theta + 1.0, -2.0)).epsilon(1e-9));
    }
}

TEST_CASE("integrate_weighted agrees with an independent Simpson oracle") {
    auto f = [](double x) { return std::sin(3.0 * x) + std::exp(-x); };
    double theta = 0.3;
    auto mine = integrate_weighted(f, theta, 2.0, 1e-11);
    double ref = simpson_oracle([&](double x) { return f(x) * std::pow(x, theta); }, 1e-9, 2.0);
    CHECK(mine.value == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("integrate_weighted: refinement stability and linearity") {
    auto f = [](double x) { return std::cos(x) / (1.0 + x); };
    auto g = [](double x) { return std::sqrt(x) + 0.2 * std::log(1.0 / x); };
    double theta = -0.4, R = 1.5, tol = 1e-10;
    QuadratureConfig fine;
    fine.panel_ratio = std::sqrt(0.7);  // doubles the panel count per decade
    double i1 = integrate_weighted_value(f, theta, R, tol);
    double i2 = integrate_weighted_value(f, theta, R, tol, fine);
    CHECK(std::abs(i1 - i2) < tol * std::abs(i1) * 10);

    double a = 0.7, b = -1.3;
    double lhs = integrate_weighted_value(
        [&](double x) { return a * f(x) + b * g(x); }, theta, R, tol);
    double rhs = a * integrate_weighted_value(f, theta, R, tol) +
                 b * integrate_weighted_value(g, theta, R, tol);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("integrate_weighted flags non-integrable integrands") {
    auto r = integrate_weighted([](double x) { return std::pow(x, -2.0); }, 0.0, 1.0);
    CHECK_FALSE(r.converged);
    CHECK(r.diverging);
    CHECK_THROWS_AS(
        integrate_weighted_value([](double x) { return std::pow(x, -2.0); }, 0.0, 1.0),
        EstimationFailure);
}

TEST_CASE("integrate_weighted honors breakpoints") {
    // kinked integrand: |r - 1/3|
    auto f = [](double x) { return std::abs(x - 1.0 / 3.0); };
    double exact = 5.0 / 54.0 + 1.0 / (2.0 * 27.0);  // int_0^1 |x-1/3| dx = 5/18... computed below
    // direct: int_0^{1/3}(1/3-x) + int_{1/3}^1 (x-1/3) = 1/18 + 2/9 = 5/18
    exact = 5.0 / 18.0;
    double v = integrate_weighted_value(f, 0.0, 1.0, 1e-11, {}, {1.0 / 3.0});
    CHECK(v == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("integrate_weighted_interval: truncated weighted integrals") {
    // int_a^1 r^-1 dr = log(1/a)
    for (double a : {1e-2, 1e-4}) {
        double v = integrate_weighted_interval([](double) { return 1.0; }, -1.0 + 1e-14, a, 1.0);
        CHECK(v == doctest::Approx(std::log(1.0 / a)).epsilon(1e-8));
    }
}

TEST_CASE("CumulativeIntegral: monomials and zero") {
    CumulativeIntegral c1([](double) { return 1.0; }, 2.0, 1.0);
    for (double t : {0.1, 0.37, 1.0})
        CHECK(c1(t) == doctest::Approx(std::pow(t, 3.0) / 3.0).epsilon(1e-12));

    CumulativeIntegral c0([](double) { return 0.0; }, 0.7, 2.0);
    for (double t : {0.05, 1.3, 2.0}) CHECK(c0(t) == doctest::Approx(0.0));

    CumulativeIntegral cs([](double s) { return s; }, 1.0, 1.0);
    for (double t : {0.2, 0.9}) CHECK(cs(t) == doctest::Approx(t * t * t / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(cs(1.5), std::domain_error);
    CHECK_THROWS_AS(cs(-0.1), std::domain_error);

    // monotone for v >= 0
    CumulativeIntegral cm([](double s) { return 1.0 + std::sin(s) * std::sin(s); }, 0.5, 1.0);
    double prev = 0.0;
    for (double t = 0.05; t <= 1.0; t += 0.05) {
        double v = cm(t);
        CHECK(v >= prev);
        prev = v;
    }
}
