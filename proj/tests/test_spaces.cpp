#include "doctest.h"
#include "radsob/spaces.hpp"

#include <cmath>
#include <random>

using namespace radsob::spaces;
using radsob::functions::RadialFunction;
using radsob::quadrature::build_grid;

namespace {
SpaceParams make(int k, double p, std::vector<double> alpha, double theta = 0.0,
                 double R = 1.0) {
    SpaceParams s;
    s.k = k;
    s.p = p;
    s.R = R;
    s.alpha = std::move(alpha);
    s.theta = theta;
    return s;
}
}  // namespace

TEST_CASE("regime trichotomy") {
    CHECK(regime(make(1, 2, {0.0, 1.0})) == Regime::AdamsTrudingerMoser);
    CHECK(regime(make(1, 1, {1.0, 2.0}, 1.0)) == Regime::Sobolev);
    CHECK(regime(make(2, 2, {0.0, 0.0, 0.0})) == Regime::Morrey);
    // exact-zero tolerance: a hair off from the ATM line is not ATM
    CHECK(regime(make(1, 2, {0.0, 1.0 + 1e-9})) == Regime::Sobolev);
}

TEST_CASE("sobolev_norm closed forms") {
    double a0 = 0.7, R = 1.3, c = 2.5;
    auto cu = RadialFunction::constant(c, R);
    double expect = c * std::pow(std::pow(R, a0 + 1.0) / (a0 + 1.0), 0.5);
    CHECK(sobolev_norm(cu, make(1, 2, {a0, 1.0}, 0, R)) ==
          doctest::Approx(expect).epsilon(1e-11));

    auto u = RadialFunction::polynomial({1.0, -1.0}, 1.0);  // 1 - r
    CHECK(sobolev_norm(u, make(1, 2, {0.0, 0.0})) ==
          doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-11));

    auto r2 = RadialFunction::power(2.0, 1.0);
    CHECK(sobolev_norm(r2, make(2, 2, {0.0, 0.0, 0.0})) ==
          doctest::Approx(std::sqrt(1.0 / 5.0 + 4.0 / 3.0 + 4.0)).epsilon(1e-11));
}

TEST_CASE("sobolev_norm flags the divergent derivative order") {
    // u = log(R/r): |u'|^2 r = 1/r is non-integrable
    auto u = RadialFunction::log_power(1.0, 1.0);
    try {
        sobolev_norm(u, make(1, 2, {0.0, 1.0}));
        FAIL("expected DivergentNorm");
    } catch (const DivergentNorm& e) {
        CHECK(e.derivative_order == 1);
    }
}

TEST_CASE("sobolev_norm homogeneity and triangle inequality") {
    auto params = make(1, 2, {0.0, 1.2});
    auto corpus = standard_corpus(1.0);
    for (const auto& e : corpus) {
        double n1 = sobolev_norm(e.u, params);
        double n2 = sobolev_norm(e.u.scaled(-3.7), params);
        CHECK(n2 == doctest::Approx(3.7 * n1).epsilon(1e-12));
    }
    std::mt19937_64 rng(42);
    auto coef = [&]() { return -1.0 + 2.0 * double(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 20; ++trial) {
        const auto& a = corpus[rng() % corpus.size()].u;
        const auto& b = corpus[rng() % corpus.size()].u;
        double ca = coef(), cb = coef();
        auto uv = RadialFunction::sum(ca, a, cb, b);
        double lhs = sobolev_norm(uv, params);
        double rhs = sobolev_norm(a.scaled(ca), params) + sobolev_norm(b.scaled(cb), params);
        CHECK(lhs <= rhs + 1e-8 * (1.0 + rhs));
    }
}

TEST_CASE("embedding_exponent per regime") {
    auto sob = embedding_exponent(make(1, 1, {1.0, 2.0}, 1.0));
    REQUIRE(sob.p_star.has_value());
    CHECK(*sob.p_star == doctest::Approx(1.0));

    auto atm = embedding_exponent(make(1, 2, {0.0, 1.0}));
    CHECK(atm.unbounded);
    CHECK_FALSE(atm.p_star.has_value());

    auto sob8 = embedding_exponent(make(1, 2, {1.0, 2.0}, 3.0));
    REQUIRE(sob8.p_star.has_value());
    CHECK(*sob8.p_star == doctest::Approx(8.0));

    // Morrey with (alpha_k+1)/p = 0.5 not integer: gamma = min{1+0-0.5, 1-1/4}
    auto mor = embedding_exponent(make(1, 4.0, {0.0, 1.0}));
    REQUIRE(mor.holder_gamma.has_value());
    CHECK(*mor.holder_gamma == doctest::Approx(0.5));

    // integer case: any Holder exponent below one
    auto mori = embedding_exponent(make(2, 2.0, {0.0, 0.5, 1.0}));
    CHECK(mori.gamma_any_below_one);
}

TEST_CASE("hardy_constant formula instances") {
    CHECK(hardy_constant(2, 3) == doctest::Approx(1.0));
    CHECK(hardy_constant(2, 5) == doctest::Approx(0.5));
    CHECK(hardy_constant(3, 4) == doctest::Approx(1.5));
    CHECK_THROWS_AS(hardy_constant(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hardy_constant(1.0, 3.0), std::invalid_argument);
}

TEST_CASE("hardy_ratio: trivial, closed form, near-extremal family") {
    auto zero = RadialFunction::constant(0.0, 1.0);
    CHECK(hardy_ratio(zero, 2, 3, 1.0) == doctest::Approx(0.0));

    auto u = RadialFunction::polynomial({1.0, -1.0}, 1.0);  // 1 - r, u(1)=0
    CHECK(hardy_ratio(u, 2, 3, 1.0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));

    // near-extremal family: ratio increases toward p/(alpha-p+1) as delta -> 0+
    for (auto [p, alpha] : std::vector<std::pair<double, double>>{{2, 3}, {2, 5}, {3, 4}}) {
        double C = hardy_constant(p, alpha);
        double prev = 0.0;
        for (double delta : {0.2, 0.1, 0.05}) {
            auto fam = hardy_near_extremal(p, alpha, delta, 1.0);
            double ratio = hardy_ratio(fam, p, alpha, 1.0);
            CHECK(ratio <= C + 1e-6);
            CHECK(ratio > prev);
            prev = ratio;
        }
        CHECK(prev >= 0.95 * C);
    }
}

TEST_CASE("hardy_ratio <= hardy_constant on the boundary-vanishing corpus") {
    double p = 2, alpha = 3, R = 1.0;
    double C = hardy_constant(p, alpha);
    // boundary-vanishing members: u - u(R)
    for (const auto& e : standard_corpus(R)) {
        auto shifted = RadialFunction::sum(1.0, e.u, -e.u(R), RadialFunction::constant(1.0, R));
        double ratio = hardy_ratio(shifted, p, alpha, R);
        CHECK(ratio <= C + 1e-6);
    }
}

TEST_CASE("hardy_admissible literal case conditions") {
    CHECK(hardy_admissible(2, 2, 1, 3, HardySide::BoundaryVanishing));
    CHECK_FALSE(hardy_admissible(2, 3, 1, 3, HardySide::BoundaryVanishing));
    CHECK(hardy_admissible(2, 5, 0, 0, HardySide::BoundaryVanishing));
    // origin-vanishing: needs alpha - p + 1 < 0 and q above the (negative) bound
    CHECK(hardy_admissible(2, 2, 0, 0.5, HardySide::OriginVanishing));
    CHECK_FALSE(hardy_admissible(2, 2, 0, 3, HardySide::OriginVanishing));
}

TEST_CASE("pointwise_bound_ratio: Sobolev constants and powers") {
    auto params = make(1, 2, {1.0, 2.0}, 1.0);  // sigma = 1
    auto g = build_grid(1.0, 400, 0.98);
    auto c = RadialFunction::constant(2.0, 1.0);
    double norm = sobolev_norm(c, params);
    double expect = 2.0 * std::pow(1.0, params.sigma() / params.p) / norm;
    CHECK(pointwise_bound_ratio(c, params, g) == doctest::Approx(expect).epsilon(1e-6));

    // u = r^{-s} with s < sigma/p stays bounded in ratio; sup at t = R here
    auto u = RadialFunction::power(-0.25, 1.0);
    double r1 = pointwise_bound_ratio(u, params, g);
    CHECK(std::isfinite(r1));
    auto g2 = build_grid(1.0, 800, 0.98);
    double r2 = pointwise_bound_ratio(u, params, g2);
    CHECK(std::abs(r1 - r2) <= 0.05 * std::max(r1, r2));
}

TEST_CASE("pointwise_bound_ratio: ATM log profile is dominated and stable") {
    auto params = make(1, 2, {0.0, 1.0});  // ATM
    auto u = RadialFunction::log_power(1.0, 1.0);
    auto g1 = build_grid(1.0, 2000, 0.99);
    auto g2 = build_grid(1.0, 4000, 0.99);
    double r1 = pointwise_bound_ratio(u, params, g1);
    double r2 = pointwise_bound_ratio(u, params, g2);
    CHECK(std::isfinite(r1));
    CHECK(r1 >= 0.0);
    CHECK(std::abs(r1 - r2) <= 0.05 * std::max({r1, r2, 0.02}));
    CHECK_THROWS_AS(pointwise_bound_ratio(u, make(2, 2, {0.0, 0.0, 0.0}), g1),
                    std::invalid_argument);
}

TEST_CASE("morrey_ratio: constants, linear witness, refinement stability") {
    auto params = make(1, 4, {0.0, 1.0});  // sigma = 1 - 4 + 1 < 0, gamma = 1/2
    auto g = build_grid(1.0, 400, 0.98);
    CHECK(morrey_ratio(RadialFunction::constant(3.0, 1.0), params, g) == doctest::Approx(0.0));

    auto lin = RadialFunction::power(1.0, 1.0);
    double expect = std::pow(2.0, 0.25);  // sup |r-s|^{1/2} / (1/2)^{1/4} as |r-s| -> 1
    double got = morrey_ratio(lin, params, g);
    CHECK(got == doctest::Approx(expect).epsilon(0.01));

    auto frac = RadialFunction::power(0.6, 1.0);
    double m1 = morrey_ratio(frac, params, g);
    double m2 = morrey_ratio(frac, params, build_grid(1.0, 800, 0.99));
    CHECK(std::isfinite(m1));
    CHECK(std::abs(m1 - m2) <= 0.05 * std::max(m1, m2));

    CHECK_THROWS_AS(morrey_ratio(lin, make(1, 2, {0.0, 1.0}), g), std::invalid_argument);
}

TEST_CASE("embedding sharpness witnesses on X^{1,1}_1(1,2)") {
    // For q > p* = 1 the L^q_1 norm of t^{-2/q} diverges as the truncation
    // goes to 0 while the X-norm converges.
    using radsob::quadrature::integrate_weighted_interval;
    for (double q : {1.5, 2.0}) {
        auto u = RadialFunction::power(-2.0 / q, 1.0);
        double first_lq = 0.0, prev_lq = 0.0;
        std::vector<double> xnorms;
        for (double lo : {1e-2, 1e-3, 1e-4, 1e-5}) {
            double lq = std::pow(
                integrate_weighted_interval(
                    [&](double t) { return std::pow(std::abs(u(t)), q); }, 1.0, lo, 1.0),
                1.0 / q);
            CHECK(lq > prev_lq);
            if (first_lq == 0.0) first_lq = lq;
            prev_lq = lq;
            double x0 = integrate_weighted_interval(
                [&](double t) { return std::abs(u(t)); }, 1.0, lo, 1.0);
            double x1 = integrate_weighted_interval(
                [&](double t) { return std::abs(u.deriv(1, t)); }, 2.0, lo, 1.0);
            xnorms.push_back(x0 + x1);
        }
        CHECK(prev_lq > 1.5 * first_lq);  // keeps growing across three decades
        CHECK(std::abs(xnorms.back() - xnorms[xnorms.size() - 2]) <= 0.01 * xnorms.back());
    }
    // theta < alpha_k - kp: u = t^{-(theta+1)} escapes L^{p*}_theta
    double theta = 0.5;
    auto w = RadialFunction::power(-(theta + 1.0), 1.0);
    double grow_small = integrate_weighted_interval(
        [&](double t) { return std::abs(w(t)); }, theta, 1e-6, 1.0);
    double grow_big = integrate_weighted_interval(
        [&](double t) { return std::abs(w(t)); }, theta, 1e-3, 1.0);
    CHECK(grow_small > grow_big + 5.0);
}
