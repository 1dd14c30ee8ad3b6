#include "radsob/functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radsob::functions {

RadialFunction::RadialFunction(double radius, std::vector<Evaluator> derivatives)
    : radius_(radius), derivs_(std::move(derivatives)) {
    if (derivs_.empty())
        throw std::invalid_argument("RadialFunction: needs at least the value evaluator");
    if (!(radius_ > 0.0)) throw std::invalid_argument("RadialFunction: radius must be positive");
}

double RadialFunction::deriv(int j, double r) const {
    if (j < 0 || j > order())
        throw std::out_of_range("RadialFunction: derivative order " + std::to_string(j) +
                                " not available (have " + std::to_string(order()) + ")");
    return derivs_[j](r);
}

RadialFunction RadialFunction::scaled(double c) const {
    std::vector<Evaluator> d;
    d.reserve(derivs_.size());
    for (const auto& e : derivs_)
        d.push_back([e, c](double r) { return c * e(r); });
    return RadialFunction(radius_, std::move(d));
}

RadialFunction RadialFunction::sum(double a, const RadialFunction& u, double b,
                                   const RadialFunction& v) {
    if (std::abs(u.radius() - v.radius()) > 1e-12 * u.radius())
        throw std::invalid_argument("RadialFunction::sum: domain radii differ");
    int k = std::min(u.order(), v.order());
    std::vector<Evaluator> d;
    for (int j = 0; j <= k; ++j) {
        auto ue = u.derivs_[j], ve = v.derivs_[j];
        d.push_back([a, b, ue, ve](double r) { return a * ue(r) + b * ve(r); });
    }
    return RadialFunction(u.radius(), std::move(d));
}

RadialFunction RadialFunction::constant(double c, double R, int order) {
    std::vector<Evaluator> d;
    d.push_back([c](double) { return c; });
    for (int j = 1; j <= order; ++j) d.push_back([](double) { return 0.0; });
    return RadialFunction(R, std::move(d));
}

RadialFunction RadialFunction::power(double exponent, double R, int order) {
    std::vector<Evaluator> d;
    for (int j = 0; j <= order; ++j) {
        double c = 1.0;
        for (int i = 0; i < j; ++i) c *= (exponent - i);
        double e = exponent - j;
        d.push_back([c, e](double r) { return c * std::pow(r, e); });
    }
    return RadialFunction(R, std::move(d));
}

RadialFunction RadialFunction::log_power(double exponent, double R, int order) {
    // u = L^s with L(r) = log(R/r); derivatives via the Bell-type expansion
    // u^(j) = sum over compositions; for the small orders needed here, build
    // recursively: u' = -s L^{s-1}/r and differentiate symbolically as a sum
    // of terms c * L^{s-m} / r^j.
    struct Term {
        double c;
        double m;  // L^{s-m}
    };
    std::vector<std::vector<Term>> levels(order + 1);
    levels[0] = {{1.0, 0.0}};
    for (int j = 1; j <= order; ++j) {
        // d/dr [c L^{s-m} r^{-(j-1)}] = -c(s-m)L^{s-m-1}r^{-j} - (j-1)c L^{s-m} r^{-j}
        for (const Term& t : levels[j - 1]) {
            levels[j].push_back({-t.c * (exponent - t.m), t.m + 1.0});
            if (j - 1 > 0) levels[j].push_back({-t.c * (j - 1.0), t.m});
        }
    }
    std::vector<RadialFunction::Evaluator> d;
    for (int j = 0; j <= order; ++j) {
        auto terms = levels[j];
        double s = exponent;
        d.push_back([terms, s, R, j](double r) {
            double L = std::log(R / r);
            double acc = 0.0;
            for (const Term& t : terms) acc += t.c * std::pow(L, s - t.m);
            return acc / std::pow(r, j);
        });
    }
    return RadialFunction(R, std::move(d));
}

RadialFunction RadialFunction::polynomial(std::vector<double> coeffs, double R) {
    int deg = static_cast<int>(coeffs.size()) - 1;
    int order = std::max(deg + 1, 6);
    std::vector<Evaluator> d;
    std::vector<double> c = coeffs;
    for (int j = 0; j <= order; ++j) {
        auto cj = c;
        d.push_back([cj](double r) {
            double acc = 0.0;
            for (int i = static_cast<int>(cj.size()) - 1; i >= 0; --i) acc = acc * r + cj[i];
            return acc;
        });
        // differentiate coefficient vector
        std::vector<double> next;
        for (size_t i = 1; i < c.size(); ++i) next.push_back(c[i] * static_cast<double>(i));
        c = next.empty() ? std::vector<double>{0.0} : next;
    }
    return RadialFunction(R, std::move(d));
}

GridFunction from_analytic(const RadialFunction& u, const Grid& g) {
    if (std::abs(u.radius() - g.R) > 1e-12 * g.R)
        throw std::invalid_argument("from_analytic: function and grid radii differ");
    GridFunction out;
    out.grid = g;
    out.values.resize(g.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i) out.values[i] = u(g.nodes[i]);
    return out;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m) {
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int n = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<std::vector<double>>> delta(
        m + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(n + 1, 0.0)));
    delta[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int nn = 1; nn <= n; ++nn) {
        double c2 = 1.0;
        for (int nu = 0; nu < nn; ++nu) {
            double c3 = nodes[nn] - nodes[nu];
            c2 *= c3;
            for (int mm = 0; mm <= std::min(nn, m); ++mm) {
                delta[mm][nn][nu] =
                    ((nodes[nn] - x0) * delta[mm][nn - 1][nu] -
                     (mm > 0 ? mm * delta[mm - 1][nn - 1][nu] : 0.0)) /
                    c3;
            }
        }
        for (int mm = 0; mm <= std::min(nn, m); ++mm) {
            delta[mm][nn][nn] =
                (c1 / c2) * ((mm > 0 ? mm * delta[mm - 1][nn - 1][nn - 1] : 0.0) -
                             (nodes[nn - 1] - x0) * delta[mm][nn - 1][nn - 1]);
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int nu = 0; nu <= n; ++nu) w[nu] = delta[m][n][nu];
    return w;
}

GridFunction derivative(const GridFunction& u, int j) {
    if (j < 0 || j > 4) throw std::invalid_argument("derivative: order must be in [0,4]");
    const int n = u.size();
    if (n < j + 2) throw std::invalid_argument("derivative: grid too small for requested order");
    if (j == 0) return u;
    // stencil sizes: exactness for quadratics at j=1, one extra order above
    // minimal for j>=2 (ill-conditioning grows fast on graded grids)
    static const int window_for[5] = {1, 3, 5, 6, 7};
    const int w = std::min(window_for[j], n);
    GridFunction out;
    out.grid = u.grid;
    out.values.resize(n);
    std::vector<double> stencil(w), vals(w);
    for (int i = 0; i < n; ++i) {
        int lo = std::clamp(i - w / 2, 0, n - w);
        for (int s = 0; s < w; ++s) stencil[s] = u.grid.nodes[lo + s];
        auto wt = fd_weights(u.grid.nodes[i], stencil, j);
        double acc = 0.0;
        for (int s = 0; s < w; ++s) acc += wt[s] * u.values[lo + s];
        out.values[i] = acc;
    }
    return out;
}

}  // namespace radsob::functions
