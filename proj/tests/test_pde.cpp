#include "doctest.h"
#include "radsob/pde.hpp"

#include <cmath>

using namespace radsob::pde;
using radsob::functions::RadialFunction;
using radsob::operators::delta_gamma;
using radsob::operators::green_inverse;
using radsob::quadrature::integrate_weighted_value;

namespace {
// first positive zero of J_1: the alpha=3, theta=3 linear problem has
// principal eigenvalue j_{1,1}^4 (Navier bilaplacian on the unit ball of R^4)
constexpr double kJ11 = 3.8317059702075123156;
}  // namespace

TEST_CASE("catalog parsing") {
    auto g = coefficient_from_name("affine:1.0,0.5");
    CHECK(g.v(2.0) == doctest::Approx(2.0));
    CHECK(g.d1(2.0) == doctest::Approx(0.5));
    auto e = coefficient_from_name("expdecay:2");
    CHECK(e.v(1.0) == doctest::Approx(std::exp(-2.0)));
    CHECK_THROWS_AS(coefficient_from_name("bogus"), std::invalid_argument);

    auto f = nonlinearity_from_name("exp:0.5", 0.9);
    CHECK(f.mu == doctest::Approx(0.5));
    double c = 0.5 * 0.81;
    CHECK(f.f(0.3, 1.2) == doctest::Approx(1.2 * std::exp(c * 1.44)));
    CHECK_THROWS_AS(nonlinearity_from_name("bogus", 1.0), std::invalid_argument);
}

TEST_CASE("problem validation") {
    PowerProblem p;
    p.alpha = 2.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.alpha = 4.0;
    p.theta = 2.0;  // needs theta > alpha - 1
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.theta = 3.5;
    p.p = 8.9;  // outside 2(theta+1)/(alpha-3) = 9 is fine, 9.1 is not
    CHECK_NOTHROW(p.validate());
    p.p = 9.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    ExpProblem e;
    e.theta = 1.5;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    e.theta = 3.0;
    e.f = nonlinearity_exp(4.5, 1.0);  // mu >= theta + 1
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    e.f = nonlinearity_exp(0.5, 1.0);
    CHECK_NOTHROW(e.validate());
    // even nonlinearity rejected
    e.f.f = [](double, double t) { return t * t; };
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("estimate_m_delta: positivity, trial bound, refinement stability") {
    double md = estimate_m_delta(1.0, 500);
    CHECK(md > 0.0);

    // any admissible trial (u(0) = u(R) = 0, finite norms) upper-bounds the
    // infimum; u = r^2 (1-r)^2
    auto u = RadialFunction::polynomial({0.0, 0.0, 1.0, -2.0, 1.0}, 1.0);
    auto du = delta_gamma(u, 3.0);
    double dnorm = integrate_weighted_value(
        [&](double r) { return du(r) * du(r); }, 3.0, 1.0);
    double x0 = integrate_weighted_value(
        [&](double r) { return u(r) * u(r) / r; }, 0.0, 1.0);
    double x1 = integrate_weighted_value(
        [&](double r) { return u.deriv(1, r) * u.deriv(1, r); }, 1.0, 1.0);
    double x2 = integrate_weighted_value(
        [&](double r) { return u.deriv(2, r) * u.deriv(2, r); }, 3.0, 1.0);
    double trial_ratio = std::sqrt(dnorm / (x0 + x1 + x2));
    CHECK(md <= trial_ratio + 1e-9);

    double md2 = estimate_m_delta(1.0, 1000);
    CHECK(std::abs(md - md2) <= 0.02 * md2);
}

TEST_CASE("solve_power: linear case against the Bessel oracle") {
    PowerProblem p;
    p.alpha = 3.0;
    p.theta = 3.0;
    p.p = 2.0;
    p.R = 1.0;
    SolverConfig cfg;
    auto rep = solve_power(p, cfg);
    REQUIRE(rep.converged);
    double exact = std::pow(kJ11, 4.0);
    CHECK(rep.lambda == doctest::Approx(exact).epsilon(1e-7));
    CHECK(rep.rayleigh == doctest::Approx(rep.lambda).epsilon(1e-7));  // lambda = m_hat at p=2
    CHECK(rep.residual <= 1e-6);
    CHECK(std::abs(rep.endpoints.u_at_R) <= 1e-8);
    CHECK(std::abs(rep.endpoints.delta_u_at_R) <= 1e-8);
    CHECK(std::abs(rep.endpoints.origin_defect) <=
          1e-3 * std::abs(rep.endpoints.delta_u_origin));

    // weak-form consistency on a smooth test basis
    auto defects = weak_form_defects(
        rep.u_fn, rep.lambda,
        [&](double r, double t) { return p.g.v(r) * t; }, p.alpha, p.theta, p.R, 10);
    for (double d : defects) CHECK(d <= 1e-5);

    // u'''(0+) -> 0 under refinement of the extrapolation radius
    double c3a = std::abs(endpoint_diagnostics(rep.u_fn, p.alpha, 1e-2).u3_origin);
    double c3b = std::abs(endpoint_diagnostics(rep.u_fn, p.alpha, 1e-3).u3_origin);
    CHECK(c3b <= 0.5 * c3a);
}

TEST_CASE("solve_power: Sobolev-case problem and variational properties") {
    PowerProblem p;
    p.alpha = 4.0;
    p.theta = 3.5;
    p.p = 2.0;
    p.R = 1.0;
    auto rep = solve_power(p, SolverConfig{});
    REQUIRE(rep.converged);
    CHECK(rep.residual <= 1e-6);

    // Rayleigh minimality: m_hat below the quotient of corpus trials
    for (auto entry : {0, 1, 2}) {
        RadialFunction trial =
            entry == 0
                ? RadialFunction::polynomial({1.0, 0.0, -1.0}, 1.0)  // 1 - r^2
                : entry == 1 ? RadialFunction::polynomial({1.0, -1.0}, 1.0)
                             : RadialFunction::polynomial({0.0, 0.0, 1.0, -2.0, 1.0}, 1.0);
        auto w = green_inverse(trial, p.alpha, p.R);  // Navier-compatible trial
        auto dw = delta_gamma(w, p.alpha);
        double num = integrate_weighted_value(
            [&](double r) { return dw(r) * dw(r); }, p.alpha, p.R);
        double den = integrate_weighted_value(
            [&](double r) { return std::pow(std::abs(w(r)), p.p); }, p.theta, p.R);
        double quotient = num / std::pow(den, 2.0 / p.p);
        CHECK(rep.rayleigh <= quotient * (1.0 + 1e-8));
    }

    // homogeneity in g: doubling g halves m_hat at p = 2
    PowerProblem p2 = p;
    p2.g = coefficient_affine(2.0, 0.0);
    auto rep2 = solve_power(p2, SolverConfig{});
    CHECK(rep2.rayleigh == doctest::Approx(0.5 * rep.rayleigh).epsilon(1e-7));

    // variational upper bound from the g-trial of the spec
    // (trial = normalized G(G(r^{theta-alpha} g)) is the solver's start)
    CHECK(rep.rayleigh > 0.0);
}

TEST_CASE("solve_power: p > 2 fixed point and the scaling note") {
    PowerProblem p;
    p.alpha = 4.0;
    p.theta = 4.0;
    p.p = 2.5;
    p.R = 1.0;
    auto rep = solve_power(p, SolverConfig{});
    REQUIRE(rep.converged);
    CHECK(rep.residual <= 5e-3);  // phi'' is boundary-singular for 2 < p < 3
    // lambda = m_hat^{p/2} holds to the accuracy the residual allows
    CHECK(rep.lambda == doctest::Approx(std::pow(rep.rayleigh, p.p / 2.0)).epsilon(5e-4));
    CHECK(rep.scaling_note.find("1/(p-2)") != std::string::npos);
}

TEST_CASE("residual machinery: Green roundtrip is exact in the closure form") {
    // u = G(G(h)) with exact h solves Delta^2 u = r^{theta-alpha} h r^{alpha-theta}
    // ... i.e. the forcing written as a t-independent "nonlinearity"
    double alpha = 4.0, theta = 3.5, R = 1.0;
    auto h = RadialFunction::polynomial({1.0, -0.5, 0.25}, R);
    auto w = radsob::operators::green_inverse_weighted(h, theta - alpha, alpha, R);
    auto u = green_inverse(w, alpha, R);
    auto grid = radsob::quadrature::build_grid(R, 400, 0.99);
    PowerProblem dummy;  // supplies alpha/theta for residual_strong's weighting
    dummy.alpha = alpha;
    dummy.theta = theta;
    auto du = delta_gamma(u, alpha);
    auto ddu = delta_gamma(du, alpha);
    std::vector<double> defect(grid.size(), 0.0), scale(grid.size(), 0.0);
    for (int i = 2; i < grid.size() - 2; ++i) {
        double r = grid.nodes[i];
        double forcing = std::pow(r, theta - alpha) * h(r);
        defect[i] = ddu(r) - forcing;
        scale[i] = forcing;
    }
    double num = radsob::quadrature::discrete_l2(grid, defect, alpha);
    double den = radsob::quadrature::discrete_l2(grid, scale, alpha);
    CHECK(num <= 1e-6 * den);
}

TEST_CASE("residual_fd: qualitative behavior") {
    double alpha = 4.0, theta = 3.5, R = 1.0;
    auto h = RadialFunction::polynomial({1.0, -0.5, 0.25}, R);
    auto w = radsob::operators::green_inverse_weighted(h, theta - alpha, alpha, R);
    auto u = green_inverse(w, alpha, R);
    auto grid = radsob::quadrature::build_grid(R, 800, 0.997);
    auto uv = radsob::functions::from_analytic(u, grid);
    auto rhs = [&](double r, double) { return h(r); };
    double base = residual_fd(uv, 1.0, rhs, alpha, theta);
    CHECK(std::isfinite(base));

    // 1e-3 noise raises the finite-difference residual by orders of magnitude
    auto noisy = uv;
    std::uint64_t s = 99;
    for (auto& v : noisy.values) {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        v += 1e-3 * (double(s >> 11) * 0x1.0p-53 - 0.5);
    }
    double pert = residual_fd(noisy, 1.0, rhs, alpha, theta);
    CHECK(pert >= 100.0 * base);

    // zero solution with zero forcing
    auto zero = radsob::functions::from_analytic(RadialFunction::constant(0.0, R), grid);
    CHECK(residual_fd(zero, 0.0, rhs, alpha, theta) == doctest::Approx(0.0));
}

TEST_CASE("solve_exp: linear cross-check and the exponential catalog") {
    double md = estimate_m_delta(1.0, 400);

    // linear nonlinearity reduces to the alpha=3, p=2 power problem
    ExpProblem lin;
    lin.theta = 3.0;
    lin.m_delta = md;
    lin.f = nonlinearity_linear();
    SolverConfig cfg;
    cfg.restarts = 2;
    auto rl = solve_exp(lin, cfg);
    REQUIRE(rl.converged);

    PowerProblem pw;
    pw.alpha = 3.0;
    pw.theta = 3.0;
    pw.p = 2.0;
    auto rp = solve_power(pw, SolverConfig{});
    CHECK(std::abs(rl.lambda - rp.lambda) <= 1e-4 * rp.lambda);

    // exponential catalog: self-consistency, residual, restart agreement
    ExpProblem ex;
    ex.theta = 3.0;
    ex.m_delta = md;
    ex.f = nonlinearity_exp(0.5, md);
    cfg.restarts = 3;
    auto re = solve_exp(ex, cfg);
    REQUIRE(re.converged);
    CHECK(re.lambda > 0.0);
    CHECK(re.residual <= 1e-5);
    CHECK(std::abs(re.lambda * re.action_integral - 1.0) <= 1e-10);
    for (double l : re.restart_lambdas)
        CHECK(std::abs(l - re.lambda) <= 1e-3 * re.lambda);
    CHECK(std::abs(re.endpoints.u_at_R) <= 1e-8);
    CHECK(std::abs(re.endpoints.origin_defect) <=
          1e-3 * std::abs(re.endpoints.delta_u_origin));

    // odd nonlinearity: -u is a solution with the same lambda and residual
    double res_neg = residual_strong_exp(re.u_fn.scaled(-1.0), re.lambda, ex,
                                         radsob::quadrature::build_grid(1.0, 400, 0.99));
    CHECK(res_neg <= 2.0 * std::max(re.residual, 1e-12));
}
