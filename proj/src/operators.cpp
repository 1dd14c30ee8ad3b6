#include "radsob/operators.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace radsob::operators {

namespace {

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b *= double(n - k + i) / i;
    return b;
}

// x (x-1) ... (x-i+1)
double falling(double x, int i) {
    double f = 1.0;
    for (int j = 0; j < i; ++j) f *= (x - j);
    return f;
}

// sign of Gamma(x) for non-pole x
double gamma_sign(double x) {
    if (x > 0.0) return 1.0;
    long long m = static_cast<long long>(std::floor(x));
    return (m % 2 == 0) ? 1.0 : -1.0;
}

bool is_nonpositive_integer(double x, double tol = 1e-12) {
    return x <= tol && std::abs(x - std::round(x)) <= tol;
}

}  // namespace

RadialFunction delta_gamma(const RadialFunction& u, double gamma) {
    if (u.order() < 2)
        throw std::invalid_argument("delta_gamma: function must expose two derivatives");
    int out_order = u.order() - 2;
    std::vector<RadialFunction::Evaluator> d;
    for (int m = 0; m <= out_order; ++m) {
        d.push_back([u, gamma, m](double r) {
            // (Delta u)^(m) = -u^(m+2) - gamma d^m[u'/r]
            double acc = -u.deriv(m + 2, r);
            double rpow = 1.0 / r;  // r^{-(m-i+1)} built downward
            for (int i = m; i >= 0; --i) {
                double fac = binom(m, i) * ((m - i) % 2 == 0 ? 1.0 : -1.0) *
                             std::tgamma(double(m - i + 1));
                acc -= gamma * fac * rpow * u.deriv(1 + i, r);
                rpow /= r;
            }
            return acc;
        });
    }
    return RadialFunction(u.radius(), std::move(d));
}

RadialFunction derivative_function(const RadialFunction& u) {
    if (u.order() < 1) throw std::invalid_argument("derivative_function: order 0 input");
    std::vector<RadialFunction::Evaluator> d;
    for (int j = 0; j + 1 <= u.order(); ++j)
        d.push_back([u, j](double r) { return u.deriv(j + 1, r); });
    return RadialFunction(u.radius(), std::move(d));
}

RadialFunction nabla_gamma_k(const RadialFunction& u, double gamma, int k) {
    if (k < 1) throw std::invalid_argument("nabla_gamma_k: k must be >= 1");
    if (u.order() < k)
        throw std::invalid_argument("nabla_gamma_k: function exposes too few derivatives");
    RadialFunction w = u;
    for (int i = 0; i < k / 2; ++i) w = delta_gamma(w, gamma);
    if (k % 2 == 1) w = derivative_function(w);
    return w;
}

namespace {

// Cached inner integral C(r) = int_0^r phi s^{gamma+beta} ds and outer
// integral D(r) = int_r^R t^{-gamma} C(t) dt on a geometric ladder.
struct GreenCache {
    RadialFunction phi;
    double beta, gamma, R;
    quadrature::CumulativeIntegral C;
    std::vector<double> nodes;  // descending from R
    std::vector<double> D;

    GreenCache(const RadialFunction& phi_, double beta_, double gamma_, double R_,
               const GreenConfig& cfg)
        : phi(phi_),
          beta(beta_),
          gamma(gamma_),
          R(R_),
          C([phi_](double s) { return phi_(s); }, gamma_ + beta_, R_, cfg.table_ratio,
            cfg.table_floor) {
        int depth =
            static_cast<int>(std::ceil(std::log(cfg.table_floor) / std::log(cfg.table_ratio))) + 1;
        nodes.resize(depth + 1);
        for (int i = 0; i <= depth; ++i) nodes[i] = R * std::pow(cfg.table_ratio, i);
        D.assign(depth + 1, 0.0);
        auto g = [this](double t) { return std::pow(t, -gamma) * C(t); };
        for (int i = 1; i <= depth; ++i)
            D[i] = D[i - 1] + quadrature::gauss_integrate(g, nodes[i], nodes[i - 1]);
    }

    double Dv(double r) const {
        if (r >= nodes.front()) return 0.0;
        auto g = [this](double t) { return std::pow(t, -gamma) * C(t); };
        if (r <= nodes.back()) {
            // below the ladder floor C(t) ~ phi0 t^{gamma+beta+1}/(gamma+beta+1)
            double rm = nodes.back();
            double phi0 = phi(rm * 0.9);
            double gb1 = gamma + beta + 1.0;
            double tail = phi0 / gb1 *
                          (std::pow(rm, beta + 2.0) - std::pow(r, beta + 2.0)) / (beta + 2.0);
            return D.back() + tail;
        }
        auto it = std::lower_bound(nodes.begin(), nodes.end(), r, std::greater<double>());
        size_t i = static_cast<size_t>(it - nodes.begin());  // first node <= r
        return D[i - 1] + quadrature::gauss_integrate(g, r, nodes[i - 1]);
    }

    // C^{(j)}(r): j = 0 the table value, else d^{j-1}[phi r^{gamma+beta}]
    double Cder(int j, double r) const {
        if (j == 0) return C(r);
        double acc = 0.0;
        for (int l = 0; l <= j - 1; ++l)
            acc += binom(j - 1, l) * phi.deriv(l, r) * falling(gamma + beta, j - 1 - l) *
                   std::pow(r, gamma + beta - (j - 1 - l));
        return acc;
    }
};

}  // namespace

RadialFunction green_inverse_weighted(const RadialFunction& phi, double beta, double gamma,
                                      double R, const GreenConfig& cfg) {
    if (!(gamma + beta > -1.0))
        throw std::invalid_argument("green_inverse: gamma + beta must be > -1");
    auto cache = std::make_shared<GreenCache>(phi, beta, gamma, R, cfg);
    int out_order = phi.order() + 2;
    std::vector<RadialFunction::Evaluator> d;
    d.push_back([cache](double r) { return cache->Dv(r); });
    d.push_back([cache, gamma](double r) { return -std::pow(r, -gamma) * cache->C(r); });
    for (int m = 1; m + 1 <= out_order; ++m) {
        d.push_back([cache, gamma, m](double r) {
            // u^{(m+1)} = -sum_i binom(m,i) (d^i r^{-gamma}) C^{(m-i)}
            double acc = 0.0;
            for (int i = 0; i <= m; ++i)
                acc += binom(m, i) * falling(-gamma, i) * std::pow(r, -gamma - i) *
                       cache->Cder(m - i, r);
            return -acc;
        });
    }
    return RadialFunction(R, std::move(d));
}

RadialFunction green_inverse(const RadialFunction& v, double gamma, double R,
                             const GreenConfig& cfg) {
    return green_inverse_weighted(v, 0.0, gamma, R, cfg);
}

namespace {

std::vector<std::vector<double>> build_levels(double g, int depth, double seed1,
                                              double seed2) {
    std::vector<std::vector<double>> lv;
    lv.push_back({seed1, seed2});
    for (int n = 1; n < depth; ++n) {
        const auto& a = lv.back();
        auto get = [&](int i) { return (i >= 1 && i <= 2 * n) ? a[i - 1] : 0.0; };
        std::vector<double> out(2 * n + 2);
        for (int i = 1; i <= 2 * n + 2; ++i)
            out[i - 1] = 2.0 * n * (g - 2.0 * n - 1.0) * get(i) +
                         (g - 4.0 * n - 1.0) * get(i - 1) - get(i - 2);
        lv.push_back(std::move(out));
    }
    return lv;
}

}  // namespace

double CoefficientTable::entry(int i, int n) const {
    if (n < 1 || n > depth || i < 1 || i > 2 * n)
        throw std::out_of_range("CoefficientTable::entry: index out of range");
    return levels[n - 1][i - 1];
}

CoefficientTable coefficient_table(double gamma, int n) {
    if (n < 1) throw std::invalid_argument("coefficient_table: n must be >= 1");
    CoefficientTable t;
    t.gamma = gamma;
    t.depth = n;
    t.levels = build_levels(gamma, n, -(gamma - 1.0), -1.0);
    return t;
}

CoefficientTable laplacian_expansion_table(double gamma, int n) {
    if (n < 1) throw std::invalid_argument("laplacian_expansion_table: n must be >= 1");
    CoefficientTable t;
    t.gamma = gamma;
    t.depth = n;
    t.levels = build_levels(gamma, n, gamma - 1.0, -1.0);
    return t;
}

std::optional<double> c1n_closed_form(double gamma, int n) {
    double arg = (gamma + 1.0 - 2.0 * n) / 2.0;
    if (is_nonpositive_integer(arg)) return std::nullopt;
    double num_arg = (gamma + 1.0) / 2.0;
    if (is_nonpositive_integer(num_arg))
        throw std::invalid_argument("c1n_closed_form: Gamma((gamma+1)/2) pole");
    // lgamma gives log|Gamma|; attach signs explicitly
    double logv = (2.0 * n - 1.0) * std::log(2.0) + std::lgamma(double(n)) +
                  std::lgamma(num_arg) - std::lgamma(arg);
    double sign = gamma_sign(num_arg) * gamma_sign(arg);
    return -sign * std::exp(logv);
}

ClosedFormCheck check_c1n(double gamma, int n, double rel_tol) {
    ClosedFormCheck out;
    out.recursion = coefficient_table(gamma, n).entry(1, n);
    out.closed_form = c1n_closed_form(gamma, n);
    if (!out.closed_form) {
        out.pole = true;
        // pole of the denominator Gamma: the limiting closed-form value is 0
        out.match = std::abs(out.recursion) <= rel_tol;
        return out;
    }
    double scale = std::max(std::abs(*out.closed_form), 1e-300);
    out.match = std::abs(out.recursion - *out.closed_form) <= rel_tol * scale;
    return out;
}

RadialFunction iterated_laplacian_psi(const moser::MoserSequenceParams& params,
                                      double gamma, int n) {
    if (n < 1) throw std::invalid_argument("iterated_laplacian_psi: n must be >= 1");
    auto p = moser::with_default_profile(params);
    auto table = laplacian_expansion_table(gamma, n);
    std::vector<double> coef = table.levels[n - 1];
    double L = std::log(p.m);
    double R = p.R;
    std::vector<RadialFunction::Evaluator> d;
    d.push_back([p, coef, L, R, n](double r) {
        double t = std::log(R / r) / L;
        double acc = 0.0;
        double Lp = L;
        for (int i = 1; i <= 2 * n; ++i) {
            acc += coef[i - 1] * moser::moser_H(p, i, t) / Lp;
            Lp *= L;
        }
        return acc / std::pow(r, 2.0 * n);
    });
    return RadialFunction(R, std::move(d));
}

double navier_base(double gamma, int k) {
    if (k < 1) throw std::invalid_argument("navier_base: k must be >= 1");
    bool odd = (k % 2 == 1);
    if (odd && !(gamma > k - 2))
        throw std::invalid_argument("navier_base: need gamma > k-2 for odd k");
    if (!odd && !(gamma > k - 1))
        throw std::invalid_argument("navier_base: need gamma > k-1 for even k");
    double first = odd ? (k + 1.0) / 2.0 : k / 2.0;
    double denom_arg = odd ? (gamma + 2.0 - k) / 2.0 : (gamma + 1.0 - k) / 2.0;
    double logv = (k - 1.0) * std::log(2.0) + std::lgamma(first) +
                  std::lgamma((gamma + 1.0) / 2.0) - std::lgamma(denom_arg);
    return std::exp(logv);
}

double mu0_navier(double theta, double gamma, double p, int k) {
    if (!(p > 1.0)) throw std::invalid_argument("mu0_navier: p must be > 1");
    if (!(theta > -1.0)) throw std::invalid_argument("mu0_navier: theta must be > -1");
    double base = navier_base(gamma, k);
    return (theta + 1.0) * std::pow(base, p / (p - 1.0));
}

double comparison_constant(double gamma, double q) {
    if (!(q > 1.0)) throw std::invalid_argument("comparison_constant: q must be > 1");
    if (!(gamma - 2.0 * q + 1.0 > 0.0))
        throw std::invalid_argument("comparison_constant: needs gamma - 2q + 1 > 0");
    return q * q / ((q - 1.0) * (gamma + 1.0) * (gamma - 2.0 * q + 1.0));
}

std::vector<double> comparison_chain(double gamma, double p, double alpha, int j) {
    if (j < 1) throw std::invalid_argument("comparison_chain: j must be >= 1");
    if (j >= 2 && !(alpha > 2.0 * (j - 1.0) * p - 1.0))
        throw std::invalid_argument("comparison_chain: needs alpha > 2(j-1)p - 1");
    if (j >= 2 && !(gamma > (alpha - p + 1.0) / p))
        throw std::invalid_argument("comparison_chain: needs gamma > (alpha-p+1)/p");
    std::vector<double> out;
    for (int i = 1; i <= j - 1; ++i) {
        double a = (gamma + 1.0) * p - (alpha - 2.0 * (i - 1.0) * p + 1.0);
        double b = alpha - 2.0 * i * p + 1.0;
        out.push_back(p * p / (a * b));
    }
    return out;
}

double comparison_product(double gamma, double p, int k) {
    if (k < 2) throw std::invalid_argument("comparison_product: k must be >= 2");
    bool odd = (k % 2 == 1);
    int j = odd ? (k - 1) / 2 : k / 2;
    double alpha = odd ? (k - 1.0) * p - 1.0 : k * p - 1.0;  // alpha_k (- p for odd)
    auto chain = comparison_chain(gamma, p, alpha, j);
    double prod_inv = 1.0;
    for (double c : chain) prod_inv /= c;
    double lhs = (gamma - 1.0) * prod_inv;
    if (odd) lhs *= (k - 1.0);  // (alpha_k - p + 1)/p with alpha_k = kp - 1
    return lhs;
}

}  // namespace radsob::operators
