#include "radsob/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "radsob/moser.hpp"
#include "radsob/operators.hpp"
#include "radsob/pde.hpp"
#include "radsob/spaces.hpp"

namespace radsob::experiments {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// typed access with strict key validation
class Params {
public:
    Params(const std::map<std::string, std::string>& kv, std::set<std::string> allowed)
        : kv_(kv), allowed_(std::move(allowed)) {
        for (const auto& [k, v] : kv_)
            if (!allowed_.count(k))
                throw ConfigError("unknown key '" + k + "' for this experiment");
    }

    bool has(const std::string& k) const { return kv_.count(k) > 0; }

    double num(const std::string& k, double dflt) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) return dflt;
        try {
            size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("key '" + k + "' is not a number: '" + it->second + "'");
        }
    }

    int integer(const std::string& k, int dflt) const {
        return static_cast<int>(std::llround(num(k, dflt)));
    }

    std::string str(const std::string& k, const std::string& dflt) const {
        auto it = kv_.find(k);
        return it == kv_.end() ? dflt : it->second;
    }

    std::vector<double> list(const std::string& k, std::vector<double> dflt) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) return dflt;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stod(trim(tok)));
            } catch (...) {
                throw ConfigError("key '" + k + "' has a non-numeric entry: '" + tok + "'");
            }
        }
        if (out.empty()) throw ConfigError("key '" + k + "' is an empty list");
        return out;
    }

private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> allowed_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void row(std::vector<std::string> r) { rows.push_back(std::move(r)); }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        for (size_t i = 0; i < header.size(); ++i)
            out << header[i] << (i + 1 < header.size() ? "," : "\n");
        for (const auto& r : rows)
            for (size_t i = 0; i < r.size(); ++i) out << r[i] << (i + 1 < r.size() ? "," : "\n");
    }
};

struct Summary {
    std::vector<std::pair<std::string, std::string>> entries;
    bool pass = true;

    void put(const std::string& k, const std::string& v) { entries.emplace_back(k, v); }
    void put(const std::string& k, double v) { entries.emplace_back(k, fmt(v)); }
    void check(const std::string& name, bool ok) {
        entries.emplace_back("check." + name, ok ? "pass" : "fail");
        pass = pass && ok;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
        out << "pass=" << (pass ? "true" : "false") << "\n";
    }
};

struct Ctx {
    const ExperimentConfig& cfg;
    Table table;
    Summary summary;

    std::uint64_t require_seed() const {
        if (!cfg.seed) throw ConfigError("this experiment is stochastic: a seed is required");
        return *cfg.seed;
    }
};

using spaces::SpaceParams;

SpaceParams space_from(const Params& p, int k_dflt, double p_dflt,
                       std::vector<double> alpha_dflt, double theta_dflt, double R_dflt) {
    SpaceParams s;
    s.k = p.integer("k", k_dflt);
    s.p = p.num("p", p_dflt);
    s.R = p.num("R", R_dflt);
    s.alpha = p.list("alpha", alpha_dflt);
    s.theta = p.num("theta", theta_dflt);
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------

void run_regimes(Ctx& c) {
    Params p(c.cfg.params, {});
    (void)p;
    c.table.header = {"k", "p", "alpha_k", "theta", "sigma", "regime", "exponent"};
    struct Row {
        int k;
        double pe, ak, th;
    };
    std::vector<Row> sweep = {{1, 2, 1, 0},   {1, 1, 2, 1},    {2, 2, 0, 0},
                              {1, 2, 1.5, 1}, {2, 2, 3, 2},    {3, 2, 5, 0.5},
                              {1, 4, 1, 0},   {2, 1.5, 2, 0.3}, {1, 2, 0.2, 0}};
    bool consistent = true;
    for (const auto& r : sweep) {
        SpaceParams s;
        s.k = r.k;
        s.p = r.pe;
        s.R = 1.0;
        s.alpha.assign(r.k + 1, 0.0);
        s.alpha.back() = r.ak;
        s.theta = r.th;
        auto reg = spaces::regime(s);
        auto emb = spaces::embedding_exponent(s);
        std::string expo = "-";
        if (emb.p_star) expo = fmt(*emb.p_star);
        if (emb.unbounded) expo = "unbounded";
        if (emb.holder_gamma) expo = "holder:" + fmt(*emb.holder_gamma);
        if (emb.gamma_any_below_one) expo = "holder:any<1";
        double sig = s.sigma();
        bool ok = (std::abs(sig) <= 1e-12 && reg == spaces::Regime::AdamsTrudingerMoser) ||
                  (sig > 1e-12 && reg == spaces::Regime::Sobolev) ||
                  (sig < -1e-12 && reg == spaces::Regime::Morrey);
        consistent = consistent && ok;
        c.table.row({fmt(r.k), fmt(r.pe), fmt(r.ak), fmt(r.th), fmt(sig),
                     spaces::to_string(reg), expo});
    }
    c.summary.put("rows", double(c.table.rows.size()));
    c.summary.check("trichotomy_consistent", consistent);
}

void run_norms(Ctx& c) {
    Params p(c.cfg.params, {"k", "p", "R", "alpha", "theta"});
    auto s = space_from(p, 1, 2.0, {0.0, 1.2}, 0.0, 1.0);
    c.table.header = {"member", "norm", "homogeneity_error"};
    double worst = 0.0;
    for (const auto& e : spaces::standard_corpus(s.R)) {
        double n1, err;
        try {
            n1 = spaces::sobolev_norm(e.u, s);
            double n2 = spaces::sobolev_norm(e.u.scaled(-2.5), s);
            err = std::abs(n2 - 2.5 * n1) / std::max(2.5 * n1, 1e-300);
        } catch (const spaces::DivergentNorm& d) {
            c.table.row({e.name, "divergent(order " + std::to_string(d.derivative_order) + ")",
                         "-"});
            continue;
        }
        worst = std::max(worst, err);
        c.table.row({e.name, fmt(n1), fmt(err)});
    }
    c.summary.put("max_homogeneity_error", worst);
    c.summary.check("homogeneity", worst <= 1e-12);
}

void run_verify_hardy(Ctx& c) {
    Params p(c.cfg.params, {"tol"});
    double tol = p.num("tol", 1e-6);
    c.table.header = {"p", "alpha", "member", "ratio", "constant", "fraction"};
    bool below = true, near = true, monotone = true;
    for (auto [pp, alpha] : std::vector<std::pair<double, double>>{{2, 3}, {2, 5}, {3, 4}}) {
        double C = spaces::hardy_constant(pp, alpha);
        for (const auto& e : spaces::standard_corpus(1.0)) {
            auto shifted = spaces::RadialFunction::sum(
                1.0, e.u, -e.u(1.0), spaces::RadialFunction::constant(1.0, 1.0));
            double ratio = spaces::hardy_ratio(shifted, pp, alpha, 1.0);
            below = below && ratio <= C + tol;
            c.table.row({fmt(pp), fmt(alpha), e.name, fmt(ratio), fmt(C), fmt(ratio / C)});
        }
        double prev = 0.0;
        for (double delta : {0.2, 0.1, 0.05}) {
            auto fam = spaces::hardy_near_extremal(pp, alpha, delta, 1.0);
            double ratio = spaces::hardy_ratio(fam, pp, alpha, 1.0);
            below = below && ratio <= C + tol;
            monotone = monotone && ratio > prev;
            prev = ratio;
            c.table.row({fmt(pp), fmt(alpha), "near_extremal_delta_" + fmt(delta), fmt(ratio),
                         fmt(C), fmt(ratio / C)});
        }
        near = near && prev >= 0.95 * C;
    }
    c.summary.check("ratios_below_constant", below);
    c.summary.check("family_reaches_095", near);
    c.summary.check("family_monotone", monotone);
}

void run_verify_embedding_sharpness(Ctx& c) {
    Params p(c.cfg.params, {"q"});
    auto qs = p.list("q", {1.5, 2.0});
    c.table.header = {"q", "min_node", "lq_norm", "x_norm"};
    bool grows = true, xstable = true;
    for (double q : qs) {
        auto u = spaces::RadialFunction::power(-2.0 / q, 1.0);
        double prev = 0.0, first = 0.0;
        std::vector<double> xs;
        for (double lo : {1e-2, 1e-3, 1e-4, 1e-5}) {
            double lq = std::pow(
                quadrature::integrate_weighted_interval(
                    [&](double t) { return std::pow(std::abs(u(t)), q); }, 1.0, lo, 1.0),
                1.0 / q);
            double x0 = quadrature::integrate_weighted_interval(
                [&](double t) { return std::abs(u(t)); }, 1.0, lo, 1.0);
            double x1 = quadrature::integrate_weighted_interval(
                [&](double t) { return std::abs(u.deriv(1, t)); }, 2.0, lo, 1.0);
            if (first == 0.0) first = lq;
            grows = grows && lq > prev;
            prev = lq;
            xs.push_back(x0 + x1);
            c.table.row({fmt(q), fmt(lo), fmt(lq), fmt(x0 + x1)});
        }
        grows = grows && prev > 1.5 * first;
        xstable = xstable && std::abs(xs[3] - xs[2]) <= 0.01 * xs[3];
    }
    c.summary.check("lq_grows_unboundedly", grows);
    c.summary.check("x_norm_converged_1pct", xstable);
}

void run_moser_norms(Ctx& c) {
    Params p(c.cfg.params, {"k", "p", "R", "alpha", "theta", "eps", "m-list"});
    auto s = space_from(p, 1, 2.0, {0.0, 1.0}, 0.0, 1.0);
    double eps = p.num("eps", 0.05);
    auto ms = p.list("m-list", {std::exp(10.0), std::exp(20.0)});
    c.table.header = {"m", "log_m", "rescaled_norm", "bound", "zeroth_term"};
    bool in_window = true;
    std::vector<double> zeroth;
    for (double m : ms) {
        moser::MoserSequenceParams mp;
        mp.m = m;
        mp.eps = eps;
        mp.k = s.k;
        mp.R = s.R;
        auto rep = moser::sequence_norm_report(mp, s);
        in_window = in_window && rep.rescaled >= 1.0 && rep.rescaled <= rep.bound + 0.5;
        zeroth.push_back(rep.terms[0]);
        c.table.row({fmt(m), fmt(std::log(m)), fmt(rep.rescaled), fmt(rep.bound),
                     fmt(rep.terms[0])});
    }
    c.summary.check("rescaled_in_window", in_window);
    if (zeroth.size() >= 2) {
        double ratio = zeroth.front() / zeroth.back();
        c.summary.put("zeroth_term_decay_ratio", ratio);
        double expect = std::pow(std::log(ms.back()) / std::log(ms.front()), s.p);
        c.summary.check("lower_order_decay", ratio > 0.6 * expect && ratio < 1.7 * expect);
    }
}

void run_blowup(Ctx& c) {
    Params p(c.cfg.params, {"mu", "k", "p", "R", "alpha", "theta", "eps", "m-list"});
    auto s = space_from(p, 1, 2.0, {0.0, 1.0}, 0.0, 1.0);
    double mu = p.num("mu", 1.5);
    double eps = p.num("eps", 0.05);
    auto ms = p.list("m-list", {1e2, 1e3, 1e4, 1e5, 1e6});
    auto rows = moser::blowup_table(mu, s, ms, eps);
    c.table.header = {"m", "value", "diverged", "lower_bound", "growth_exponent",
                      "predicted_exponent"};
    double lo = 1e300, hi = 0.0;
    bool lower_bound_ok = true;
    for (const auto& r : rows) {
        lo = std::min(lo, r.value);
        hi = std::max(hi, r.value);
        double lb = std::exp(mu * std::pow(spaces::sobolev_norm(
                                              moser::moser_sequence(
                                                  moser::with_default_profile(
                                                      {r.m, eps, s.k, s.R, {}}),
                                                  s.k),
                                              s), -s.p_conj())) *
                    std::pow(s.R / r.m, s.theta + 1.0) / (s.theta + 1.0);
        lower_bound_ok = lower_bound_ok && std::abs(lb - r.lower_bound) <= 1e-12 * lb;
        c.table.row({fmt(r.m), fmt(r.value), r.diverged ? "1" : "0", fmt(r.lower_bound),
                     fmt(r.growth_exponent), fmt(r.predicted_exponent)});
    }
    double mu_0 = moser::mu0(s.theta, s.k, s.p);
    c.summary.put("mu", mu);
    c.summary.put("mu0", mu_0);
    c.summary.put("max_over_min", hi / std::max(lo, 1e-300));
    c.summary.check("lower_bound_column", lower_bound_ok);
    if (mu > mu_0)
        c.summary.check("supercritical_growth", rows.back().value >= 10.0 * rows.front().value);
    else
        c.summary.check("subcritical_bounded", hi / std::max(lo, 1e-300) <= 2.0);
}

void run_maximize(Ctx& c) {
    Params p(c.cfg.params,
             {"mu", "k", "p", "R", "alpha", "theta", "max-iters", "tol", "restarts", "grid-n"});
    auto s = space_from(p, 1, 2.0, {0.0, 1.0}, 0.0, 1.0);
    double mu_0 = moser::mu0(s.theta, s.k, s.p);
    double mu = p.num("mu", 0.5 * mu_0);
    moser::OptimizerConfig oc;
    oc.max_iters = p.integer("max-iters", 50000);
    oc.tol = p.num("tol", c.cfg.tol.value_or(1e-10));
    oc.seed = c.require_seed();
    oc.restarts = p.integer("restarts", 3);
    oc.grid_n = p.integer("grid-n", c.cfg.grid_n.value_or(200));
    auto rep = moser::maximize_lmu(mu, s, oc);
    c.table.header = {"restart", "value"};
    for (size_t i = 0; i < rep.restart_values.size(); ++i)
        c.table.row({fmt(double(i)), fmt(rep.restart_values[i])});
    double spread = 0.0;
    for (double v : rep.restart_values)
        spread = std::max(spread, std::abs(v - rep.value) / rep.value);
    double floor = std::pow(s.R, s.theta + 1.0) / (s.theta + 1.0);
    c.summary.put("value", rep.value);
    c.summary.put("norm", rep.norm);
    c.summary.put("iterations", double(rep.iterations));
    c.summary.put("restart_spread", spread);
    c.summary.check("converged", rep.converged);
    c.summary.check("restart_agreement_1e-3", spread <= 1e-3);
    c.summary.check("norm_on_sphere", std::abs(rep.norm - 1.0) <= 1e-6);
    c.summary.check("value_above_floor", rep.value >= floor - 1e-9);
}

void run_critical_k1(Ctx& c) {
    Params p(c.cfg.params, {"A", "theta", "alpha0", "p", "radii"});
    double A = p.num("A", 1.0);
    double theta = p.num("theta", 1.0);
    double alpha0 = p.num("alpha0", 0.5);
    double pp = p.num("p", 2.0);
    auto radii = p.list("radii", {0.5, 1.0, 2.0});
    auto rows = moser::critical_k1_sweep(A, theta, alpha0, pp, radii);
    c.table.header = {"member", "R", "normalized_value", "admissible"};
    bool bounded = true;
    for (const auto& r : rows) {
        if (r.admissible) bounded = bounded && std::isfinite(r.normalized_value);
        c.table.row({r.member, fmt(r.R), fmt(r.normalized_value), r.admissible ? "1" : "0"});
    }
    c.summary.check("values_finite", bounded);
}

void run_navier_constants(Ctx& c) {
    Params p(c.cfg.params, {"k", "theta", "gamma", "p"});
    c.table.header = {"k", "theta", "gamma", "p", "mu0", "base", "product_identity_lhs"};
    bool k1_ok = true, k2_ok = true, product_ok = true;
    if (p.has("k")) {
        int k = p.integer("k", 2);
        double theta = p.num("theta", 0.0), gamma = p.num("gamma", 3.0),
               pp = p.num("p", 2.0);
        double mu0 = operators::mu0_navier(theta, gamma, pp, k);
        double base = operators::navier_base(gamma, k);
        double lhs = k >= 2 ? operators::comparison_product(gamma, pp, k) : base;
        c.table.row({fmt(k), fmt(theta), fmt(gamma), fmt(pp), fmt(mu0), fmt(base), fmt(lhs)});
        product_ok = std::abs(lhs - base) <= 1e-10 * std::abs(base);
    } else {
        for (double theta : {0.0, 1.0, 2.5})
            for (double gamma : {2.0, 3.0, 6.0})
                for (double pp : {1.5, 2.0, 3.0}) {
                    double m1 = operators::mu0_navier(theta, gamma, pp, 1);
                    k1_ok = k1_ok && std::abs(m1 - (theta + 1.0)) <= 1e-12 * (theta + 1.0);
                    double m2 = operators::mu0_navier(theta, gamma, pp, 2);
                    double expect =
                        (theta + 1.0) * std::pow(gamma - 1.0, pp / (pp - 1.0));
                    k2_ok = k2_ok && std::abs(m2 - expect) <= 1e-12 * expect;
                    c.table.row({fmt(2), fmt(theta), fmt(gamma), fmt(pp), fmt(m2),
                                 fmt(operators::navier_base(gamma, 2)), fmt(gamma - 1.0)});
                }
        for (int k : {4, 6})
            for (double gamma : {double(k), k + 0.8, k + 3.3}) {
                double lhs = operators::comparison_product(gamma, 2.0, k);
                double rhs = operators::navier_base(gamma, k);
                product_ok = product_ok && std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs);
                c.table.row({fmt(k), "0", fmt(gamma), "2", fmt(operators::mu0_navier(0, gamma, 2, k)),
                             fmt(rhs), fmt(lhs)});
            }
    }
    c.summary.check("k1_equals_theta_plus_1", k1_ok);
    c.summary.check("k2_closed_form", k2_ok);
    c.summary.check("gamma_product_identity", product_ok);
}

void run_coefficients(Ctx& c) {
    Params p(c.cfg.params, {"gamma", "n"});
    double gamma = p.num("gamma", 7.3);
    int n = p.integer("n", 6);
    auto table = operators::coefficient_table(gamma, n);
    c.table.header = {"n", "i", "c_in", "c1n_closed_form", "pole", "match"};
    bool all_match = true;
    for (int level = 1; level <= n; ++level) {
        auto chk = operators::check_c1n(gamma, level, 1e-12);
        all_match = all_match && chk.match;
        for (int i = 1; i <= 2 * level; ++i) {
            c.table.row({fmt(level), fmt(i), fmt(table.entry(i, level)),
                         i == 1 && chk.closed_form ? fmt(*chk.closed_form) : "-",
                         i == 1 && chk.pole ? "1" : "0",
                         i == 1 ? (chk.match ? "1" : "0") : "-"});
        }
    }
    c.summary.check("recursion_matches_closed_form", all_match);
}

void run_green_roundtrip(Ctx& c) {
    Params p(c.cfg.params, {"gamma-list", "trials", "grid-n", "grading"});
    auto gammas = p.list("gamma-list", {2.0, 3.0, 5.0});
    int trials = p.integer("trials", 10);
    int grid_n = p.integer("grid-n", c.cfg.grid_n.value_or(2000));
    double grading = p.num("grading", 0.995);
    std::uint64_t seed = c.require_seed();
    auto g = quadrature::build_grid(1.0, grid_n, grading);
    c.table.header = {"gamma", "trial", "rel_error", "u_at_R"};
    double worst = 0.0, worst_boundary = 0.0;
    std::uint64_t state = seed;
    auto uniform = [&]() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return 2.0 * (double(z >> 11) * 0x1.0p-53) - 1.0;
    };
    for (double gamma : gammas) {
        for (int t = 0; t < trials; ++t) {
            auto v = spaces::RadialFunction::polynomial(
                {uniform(), uniform(), uniform(), uniform(), uniform()}, 1.0);
            auto u = operators::green_inverse(v, gamma, 1.0);
            auto back = operators::delta_gamma(u, gamma);
            std::vector<double> defect(g.size()), vv(g.size());
            for (int i = 0; i < g.size(); ++i) {
                defect[i] = back(g.nodes[i]) - v(g.nodes[i]);
                vv[i] = v(g.nodes[i]);
            }
            double rel = quadrature::discrete_l2(g, defect, gamma) /
                         std::max(quadrature::discrete_l2(g, vv, gamma), 1e-300);
            worst = std::max(worst, rel);
            worst_boundary = std::max(worst_boundary, std::abs(u(1.0)));
            c.table.row({fmt(gamma), fmt(double(t)), fmt(rel), fmt(u(1.0))});
        }
    }
    c.summary.put("max_rel_error", worst);
    c.summary.check("roundtrip_1e-6", worst <= 1e-6);
    c.summary.check("boundary_zero", worst_boundary == 0.0);
}

void run_solve_power(Ctx& c) {
    Params p(c.cfg.params,
             {"alpha", "theta", "p", "g", "R", "max-iters", "tol", "report-grid-n"});
    pde::PowerProblem prob;
    prob.alpha = p.num("alpha", 4.0);
    prob.theta = p.num("theta", 3.5);
    prob.p = p.num("p", 2.0);
    prob.R = p.num("R", 1.0);
    prob.g = pde::coefficient_from_name(p.str("g", "one"));
    pde::SolverConfig sc;
    sc.max_iters = p.integer("max-iters", 300);
    sc.tol = p.num("tol", 1e-12);
    sc.report_grid_n = p.integer("report-grid-n", c.cfg.grid_n.value_or(800));
    auto rep = pde::solve_power(prob, sc);
    auto wf = pde::weak_form_defects(
        rep.u_fn, rep.lambda,
        [&](double r, double t) {
            return prob.g.v(r) * std::pow(std::abs(t), prob.p - 2.0) * t;
        },
        prob.alpha, prob.theta, prob.R, 10);
    double wf_max = *std::max_element(wf.begin(), wf.end());
    c.table.header = {"lambda",  "rayleigh", "residual", "iterations", "u_at_R",
                      "delta_u_at_R", "origin_defect", "delta_u_origin", "u3_origin",
                      "weak_form_max"};
    c.table.row({fmt(rep.lambda), fmt(rep.rayleigh), fmt(rep.residual),
                 fmt(double(rep.iterations)), fmt(rep.endpoints.u_at_R),
                 fmt(rep.endpoints.delta_u_at_R), fmt(rep.endpoints.origin_defect),
                 fmt(rep.endpoints.delta_u_origin), fmt(rep.endpoints.u3_origin),
                 fmt(wf_max)});
    c.summary.put("lambda", rep.lambda);
    c.summary.put("rayleigh", rep.rayleigh);
    if (!rep.scaling_note.empty()) c.summary.put("scaling_note", rep.scaling_note);
    c.summary.check("converged", rep.converged);
    c.summary.check("residual_1e-6", rep.residual <= (prob.p == 2.0 ? 1e-6 : 5e-3));
    c.summary.check("boundary_1e-8", std::abs(rep.endpoints.u_at_R) <= 1e-8 &&
                                         std::abs(rep.endpoints.delta_u_at_R) <= 1e-8);
    c.summary.check("origin_defect",
                    std::abs(rep.endpoints.origin_defect) <=
                        1e-3 * std::abs(rep.endpoints.delta_u_origin));
    c.summary.check("weak_form_1e-5", wf_max <= 1e-5);
}

void run_solve_exp(Ctx& c) {
    Params p(c.cfg.params,
             {"theta", "f", "mu", "R", "m-delta", "m-delta-n", "restarts", "max-iters",
              "tol", "report-grid-n"});
    pde::ExpProblem prob;
    prob.theta = p.num("theta", 3.0);
    prob.R = p.num("R", 1.0);
    prob.m_delta = p.num("m-delta", 0.0);
    if (!(prob.m_delta > 0.0))
        prob.m_delta = pde::estimate_m_delta(prob.R, p.integer("m-delta-n", 600));
    std::string fname = p.str("f", "exp:" + fmt(p.num("mu", 0.5)));
    prob.f = pde::nonlinearity_from_name(fname, prob.m_delta);
    pde::SolverConfig sc;
    sc.seed = c.require_seed();
    sc.restarts = p.integer("restarts", 3);
    sc.max_iters = p.integer("max-iters", 300);
    sc.tol = p.num("tol", 1e-12);
    sc.report_grid_n = p.integer("report-grid-n", c.cfg.grid_n.value_or(800));
    auto rep = pde::solve_exp(prob, sc);
    double spread = 0.0;
    for (double l : rep.restart_lambdas)
        spread = std::max(spread, std::abs(l - rep.lambda) / rep.lambda);
    c.table.header = {"lambda", "action_integral", "lambda_action_defect", "residual",
                      "iterations", "restart_spread", "u_at_R", "origin_defect"};
    double self = std::abs(rep.lambda * rep.action_integral - 1.0);
    c.table.row({fmt(rep.lambda), fmt(rep.action_integral), fmt(self), fmt(rep.residual),
                 fmt(double(rep.iterations)), fmt(spread), fmt(rep.endpoints.u_at_R),
                 fmt(rep.endpoints.origin_defect)});
    c.summary.put("m_delta", prob.m_delta);
    c.summary.put("lambda", rep.lambda);
    c.summary.check("converged", rep.converged);
    c.summary.check("self_consistency_1e-10", self <= 1e-10);
    c.summary.check("residual_1e-5", rep.residual <= 1e-5);
    c.summary.check("restart_agreement_1e-3", spread <= 1e-3);
}

using Runner = std::function<void(Ctx&)>;

const std::map<std::string, Runner>& registry() {
    static const std::map<std::string, Runner> reg = {
        {"regimes", run_regimes},
        {"norms", run_norms},
        {"verify-hardy", run_verify_hardy},
        {"verify-embedding-sharpness", run_verify_embedding_sharpness},
        {"moser-norms", run_moser_norms},
        {"blowup", run_blowup},
        {"maximize", run_maximize},
        {"critical-k1", run_critical_k1},
        {"navier-constants", run_navier_constants},
        {"coefficients", run_coefficients},
        {"green-roundtrip", run_green_roundtrip},
        {"solve-power", run_solve_power},
        {"solve-exp", run_solve_exp},
    };
    return reg;
}

}  // namespace

std::map<std::string, std::map<std::string, std::string>> parse_config_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::map<std::string, std::string>> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        if (section.empty())
            throw ConfigError("key '" + key + "' outside any [experiment] section");
        out[section][key] = value;
    }
    return out;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : registry()) n.push_back(k);
        return n;
    }();
    return names;
}

int run(const ExperimentConfig& cfg) {
    try {
        auto it = registry().find(cfg.experiment);
        if (it == registry().end())
            throw ConfigError("unknown experiment '" + cfg.experiment + "'");
        Ctx ctx{cfg, {}, {}};
        std::filesystem::create_directories(cfg.out_dir);
        std::string base = cfg.out_dir + "/" + cfg.experiment;
        try {
            it->second(ctx);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            ctx.summary.put("failure_code", std::string("numerical: ") + e.what());
            ctx.summary.pass = false;
            ctx.table.write(base + ".csv");
            ctx.summary.write(base + "_summary.txt");
            return 1;
        }
        ctx.table.write(base + ".csv");
        ctx.summary.write(base + "_summary.txt");
        return ctx.summary.pass ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
}

}  // namespace radsob::experiments
