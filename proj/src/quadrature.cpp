#include "radsob/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace radsob::quadrature {

namespace {

// Legendre nodes by Newton iteration on P_n; weights 2/((1-x^2) P_n'(x)^2).
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        x[i] = xi;
        w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
}

struct RuleCache {
    std::mutex m;
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> rules;
    const std::pair<std::vector<double>, std::vector<double>>& get(int order) {
        std::lock_guard<std::mutex> lock(m);
        auto it = rules.find(order);
        if (it == rules.end()) {
            std::vector<double> x, w;
            legendre_rule(order, x, w);
            it = rules.emplace(order, std::make_pair(std::move(x), std::move(w))).first;
        }
        return it->second;
    }
};

RuleCache& cache() {
    static RuleCache c;
    return c;
}

double gauss_panel(const Integrand& g, double a, double b, int order, long* evals) {
    const auto& [x, w] = cache().get(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * g(mid + half * x[i]);
    if (evals) *evals += static_cast<long>(x.size());
    return s * half;
}

// Panel-halving adaptivity at the geometric midpoint.
double adaptive_panel(const Integrand& g, double a, double b, int order, int depth,
                      double abs_tol, double* err_acc, long* evals) {
    double coarse = gauss_panel(g, a, b, order, evals);
    double m = (a > 0.0) ? std::sqrt(a * b) : 0.5 * (a + b);
    double fine = gauss_panel(g, a, m, order, evals) + gauss_panel(g, m, b, order, evals);
    double err = std::abs(fine - coarse);
    if (err <= std::max(abs_tol, 1e-15 * std::abs(fine)) || depth <= 0) {
        // |fine - coarse| tracks the coarse error; the fine value is better by
        // roughly the order of the rule (conservatively 2^8 for Gauss-8)
        if (err_acc) *err_acc += err / 256.0;
        return fine;
    }
    return adaptive_panel(g, a, m, order, depth - 1, 0.5 * abs_tol, err_acc, evals) +
           adaptive_panel(g, m, b, order, depth - 1, 0.5 * abs_tol, err_acc, evals);
}

struct TailFit {
    double value = 0.0;
    double uncertainty = 0.0;
    bool divergent = false;  // fitted growth rate of f beats the weight
};

// int_0^a f(r) r^theta dr from a local fit of f in s = log(R/r).  Pure powers
// f = c r^{-beta} are exponentials in s and are integrated exactly; anything
// sign-consistent gets the exponential fit, the rest a linear one.
TailFit weighted_tail(const Integrand& f, double theta, double a, double d, long* evals) {
    const double f1 = f(a * std::exp(-d));
    const double f2 = f(a * std::exp(-2.0 * d));
    const double f3 = f(a * std::exp(-3.0 * d));
    if (evals) *evals += 3;
    const double tp1 = theta + 1.0;
    const double mass = std::pow(a, tp1);
    TailFit t;
    if (!std::isfinite(f1) || !std::isfinite(f2) || !std::isfinite(f3)) {
        t.value = 0.0;
        t.uncertainty = std::numeric_limits<double>::infinity();
        t.divergent = true;
        return t;
    }
    const bool same_sign = (f1 > 0 && f2 > 0 && f3 > 0) || (f1 < 0 && f2 < 0 && f3 < 0);
    if (same_sign) {
        const double beta_hi = std::log(f3 / f2) / d;
        const double beta_lo = std::log(f2 / f1) / d;
        if (std::max(beta_hi, beta_lo) >= tp1 * (1.0 - 1e-9)) {
            t.value = 0.0;
            t.uncertainty = std::numeric_limits<double>::infinity();
            t.divergent = true;
            return t;
        }
        auto tail_for = [&](double beta) {
            double f0 = f1 * std::exp(-beta * d);  // extrapolate to s_a
            return f0 * mass / (tp1 - beta);
        };
        t.value = tail_for(beta_hi);
        t.uncertainty = 2.0 * std::abs(t.value - tail_for(beta_lo));
    } else {
        const double c1 = (f3 - f1) / (2.0 * d);
        const double c0 = f1 - c1 * d;
        t.value = mass * (c0 / tp1 + c1 / (tp1 * tp1));
        const double curv = std::abs(f1 - 2.0 * f2 + f3) / (d * d);
        t.uncertainty = 2.0 * mass * curv / (tp1 * tp1 * tp1);
    }
    if (!std::isfinite(t.value)) {
        t.uncertainty = std::numeric_limits<double>::infinity();
        t.divergent = true;
    }
    return t;
}

}  // namespace

const std::vector<double>& gauss_nodes(int order) { return cache().get(order).first; }
const std::vector<double>& gauss_weights(int order) { return cache().get(order).second; }

double gauss_integrate(const Integrand& f, double a, double b, int order) {
    return gauss_panel(f, a, b, order, nullptr);
}

std::vector<double> cell_weights(const Grid& g, double alpha) {
    if (!(alpha > -1.0))
        throw std::invalid_argument("cell_weights: weight must be integrable at 0 (alpha > -1)");
    const int n = g.size();
    std::vector<double> w(n);
    double lo = 0.0;
    for (int i = 0; i < n; ++i) {
        double hi = (i + 1 < n) ? 0.5 * (g.nodes[i] + g.nodes[i + 1]) : g.R;
        w[i] = (std::pow(hi, alpha + 1.0) - std::pow(lo, alpha + 1.0)) / (alpha + 1.0);
        lo = hi;
    }
    return w;
}

double discrete_l2(const Grid& g, const std::vector<double>& values, double alpha) {
    if (values.size() != g.nodes.size())
        throw std::invalid_argument("discrete_l2: value count does not match the grid");
    auto w = cell_weights(g, alpha);
    double acc = 0.0;
    for (size_t i = 0; i < values.size(); ++i) acc += w[i] * values[i] * values[i];
    return std::sqrt(acc);
}

namespace {
double bisect_adaptive(const Integrand& f, double a, double b, double tol, int depth) {
    double coarse = gauss_panel(f, a, b, 8, nullptr);
    double m = 0.5 * (a + b);
    double fine = gauss_panel(f, a, m, 8, nullptr) + gauss_panel(f, m, b, 8, nullptr);
    if (std::abs(fine - coarse) <= std::max(tol, 1e-15 * std::abs(fine)) || depth <= 0)
        return fine;
    return bisect_adaptive(f, a, m, 0.5 * tol, depth - 1) +
           bisect_adaptive(f, m, b, 0.5 * tol, depth - 1);
}
}  // namespace

double integrate_adaptive(const Integrand& f, double a, double b, double tol) {
    if (!(b > a)) throw std::invalid_argument("integrate_adaptive: need a < b");
    double scale = std::abs(gauss_panel(f, a, b, 8, nullptr));
    return bisect_adaptive(f, a, b, tol * std::max(scale, 1e-30), 24);
}

Grid build_grid(double R, int n, double grading) {
    if (!(R > 0.0)) throw std::invalid_argument("build_grid: R must be positive");
    if (n < 16) throw std::invalid_argument("build_grid: need n >= 16");
    if (!(grading > 0.0 && grading <= 1.0))
        throw std::invalid_argument("build_grid: grading must be in (0,1]");
    Grid g;
    g.R = R;
    g.grading = grading;
    g.nodes.resize(n);
    if (std::abs(grading - 1.0) < 1e-14) {
        for (int i = 0; i < n; ++i) g.nodes[i] = R * (i + 1) / n;
    } else {
        for (int i = 0; i < n; ++i) g.nodes[i] = R * std::pow(grading, n - 1 - i);
    }
    g.nodes.back() = R;
    return g;
}

WeightedIntegral integrate_weighted(const Integrand& f, double theta, double R,
                                    double tol, const QuadratureConfig& cfg,
                                    const std::vector<double>& breakpoints) {
    if (!(theta > -1.0)) throw std::invalid_argument("integrate_weighted: theta must be > -1");
    if (!(R > 0.0)) throw std::invalid_argument("integrate_weighted: R must be positive");
    const double q = cfg.panel_ratio;
    const double d = 0.5 * std::log(1.0 / q);
    auto g = [&](double r) { return f(r) * std::pow(r, theta); };

    std::vector<double> bps(breakpoints);
    std::sort(bps.begin(), bps.end(), std::greater<double>());
    size_t bi = 0;
    while (bi < bps.size() && bps[bi] >= R * (1.0 - 1e-14)) ++bi;

    WeightedIntegral out;
    double acc = 0.0, comp = 0.0;  // Kahan
    double hi = R;
    int j = 1;
    int grow_streak = 0;
    int divergent_fits = 0;
    double prev_abs = 0.0;
    double scale_hint = 0.0;

    while (out.panels < cfg.max_panels) {
        double geo = R * std::pow(q, j);
        double lo = geo;
        if (bi < bps.size() && bps[bi] > geo * (1.0 + 1e-14) && bps[bi] < hi * (1.0 - 1e-14)) {
            lo = bps[bi];
            ++bi;
        } else {
            ++j;
        }
        const double abs_tol = 0.02 * tol * std::max(scale_hint, 1e-300);
        const double piece =
            adaptive_panel(g, lo, hi, cfg.panel_order, cfg.max_split_depth, abs_tol,
                           &out.error_estimate, &out.evaluations);
        double y = piece - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        ++out.panels;
        hi = lo;
        scale_hint = std::max(scale_hint, std::abs(acc));

        if (!std::isfinite(acc)) {
            out.value = acc;
            out.diverging = true;
            return out;
        }
        const bool mass_growing = out.panels > 1 && std::abs(piece) >= 0.5 * prev_abs;
        if (std::abs(piece) > prev_abs && out.panels > cfg.min_panels)
            ++grow_streak;
        else
            grow_streak = 0;
        prev_abs = std::abs(piece);
        if (grow_streak >= 8) {
            out.value = acc;
            out.diverging = true;
            out.error_estimate = std::abs(piece) * 8.0;
            return out;
        }

        // no tail extrapolation while breakpoints remain below: the integrand
        // may change character there (piecewise definitions)
        if (out.panels >= cfg.min_panels && bi >= bps.size()) {
            TailFit tail = weighted_tail(f, theta, hi, d, &out.evaluations);
            // a divergent fit only counts if the panel masses stopped shrinking
            // (rounding-noise integrands produce random fit slopes)
            divergent_fits = (tail.divergent && mass_growing) ? divergent_fits + 1 : 0;
            if (divergent_fits >= 3) {
                out.value = acc;
                out.diverging = true;
                out.error_estimate = std::numeric_limits<double>::infinity();
                return out;
            }
            const double scale = std::max({std::abs(acc + tail.value), scale_hint, 1e-300});
            if (!tail.divergent && tail.uncertainty <= 0.25 * tol * scale &&
                out.error_estimate <= 0.5 * tol * scale) {
                out.value = acc + tail.value;
                out.error_estimate += tail.uncertainty;
                out.converged = true;
                return out;
            }
        }
        if (hi < 1e-280) break;  // cannot grade further in double precision
    }
    TailFit tail = weighted_tail(f, theta, hi, d, &out.evaluations);
    out.value = acc + tail.value;
    out.error_estimate += tail.uncertainty;
    out.converged = false;
    return out;
}

double integrate_weighted_value(const Integrand& f, double theta, double R, double tol,
                                const QuadratureConfig& cfg,
                                const std::vector<double>& breakpoints) {
    WeightedIntegral r = integrate_weighted(f, theta, R, tol, cfg, breakpoints);
    if (!r.converged)
        throw EstimationFailure(
            r.diverging ? "integrate_weighted: integrand appears non-integrable near 0"
                        : "integrate_weighted: tolerance not reached at max panels",
            r);
    return r.value;
}

double integrate_weighted_interval(const Integrand& f, double theta, double lo,
                                   double hi, double tol, const QuadratureConfig& cfg) {
    if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("integrate_weighted_interval: need 0 < lo < hi");
    auto g = [&](double r) { return f(r) * std::pow(r, theta); };
    // geometric ladder from hi down to lo
    double err = 0.0;
    long evals = 0;
    double acc = 0.0;
    double top = hi;
    const double q = cfg.panel_ratio;
    while (top > lo * (1.0 + 1e-14)) {
        double bot = std::max(lo, top * q);
        acc += adaptive_panel(g, bot, top, cfg.panel_order, cfg.max_split_depth,
                              0.05 * tol * std::max(std::abs(acc), 1e-300), &err, &evals);
        top = bot;
    }
    return acc;
}

CumulativeIntegral::CumulativeIntegral(Integrand v, double gamma, double R,
                                       double table_ratio, double table_floor)
    : v_(std::move(v)), gamma_(gamma), R_(R) {
    if (!(gamma > -1.0)) throw std::invalid_argument("CumulativeIntegral: gamma must be > -1");
    if (!(R > 0.0)) throw std::invalid_argument("CumulativeIntegral: R must be positive");
    int depth = static_cast<int>(std::ceil(std::log(table_floor) / std::log(table_ratio))) + 1;
    nodes_.resize(depth + 1);
    for (int i = 0; i <= depth; ++i) nodes_[i] = R * std::pow(table_ratio, i);
    cum_.assign(depth + 1, 0.0);
    cum_[depth] = tail_below(nodes_[depth]);
    auto g = [this](double s) { return v_(s) * std::pow(s, gamma_); };
    for (int i = depth - 1; i >= 0; --i)
        cum_[i] = cum_[i + 1] + gauss_panel(g, nodes_[i + 1], nodes_[i], 8, nullptr);
}

double CumulativeIntegral::tail_below(double a) const {
    const double d = 0.08;
    const double f1 = v_(a * std::exp(-d));
    const double f2 = v_(a * std::exp(-3.0 * d));
    const double c1 = (f2 - f1) / (2.0 * d);
    const double c0 = f1 - c1 * d;
    const double gp1 = gamma_ + 1.0;
    return std::pow(a, gp1) * (c0 / gp1 + c1 / (gp1 * gp1));
}

double CumulativeIntegral::total() const { return cum_[0]; }

double CumulativeIntegral::operator()(double t) const {
    if (!(t > 0.0) || t > R_ * (1.0 + 1e-12))
        throw std::domain_error("CumulativeIntegral: evaluation outside (0,R]");
    if (t >= nodes_[0]) return cum_[0];
    if (t <= nodes_.back()) return tail_below(t);
    // nodes_ decreasing: locate first node <= t, integrate up from it
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t, std::greater<double>());
    size_t i = static_cast<size_t>(it - nodes_.begin());
    auto g = [this](double s) { return v_(s) * std::pow(s, gamma_); };
    return cum_[i] + gauss_panel(g, nodes_[i], t, 8, nullptr);
}

}  // namespace radsob::quadrature
