#include "radsob/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace radsob::spaces {

using quadrature::integrate_weighted;

namespace {
constexpr double kSigmaTol = 1e-12;
}

void SpaceParams::validate() const {
    if (k < 1) throw std::invalid_argument("SpaceParams: k must be >= 1");
    if (!(p >= 1.0)) throw std::invalid_argument("SpaceParams: p must be >= 1");
    if (!(R > 0.0)) throw std::invalid_argument("SpaceParams: R must be positive");
    if (static_cast<int>(alpha.size()) != k + 1)
        throw std::invalid_argument("SpaceParams: need k+1 weight exponents");
    for (double a : alpha)
        if (!(a > -1.0)) throw std::invalid_argument("SpaceParams: weights must be > -1");
    if (!(theta > -1.0)) throw std::invalid_argument("SpaceParams: theta must be > -1");
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Sobolev: return "Sobolev";
        case Regime::AdamsTrudingerMoser: return "AdamsTrudingerMoser";
        case Regime::Morrey: return "Morrey";
    }
    return "?";
}

Regime regime(const SpaceParams& params) {
    params.validate();
    double s = params.sigma();
    if (std::abs(s) <= kSigmaTol) return Regime::AdamsTrudingerMoser;
    return s > 0.0 ? Regime::Sobolev : Regime::Morrey;
}

std::vector<double> sobolev_norm_terms(const RadialFunction& u, const SpaceParams& params,
                                       double tol) {
    params.validate();
    if (u.order() < params.k)
        throw std::invalid_argument("sobolev_norm: function exposes too few derivatives");
    std::vector<double> terms(params.k + 1);
    for (int j = 0; j <= params.k; ++j) {
        auto f = [&u, j, p = params.p](double r) {
            return std::pow(std::abs(u.deriv(j, r)), p);
        };
        auto I = integrate_weighted(f, params.alpha[j], params.R, tol);
        if (!I.converged) throw DivergentNorm(j);
        terms[j] = I.value;
    }
    return terms;
}

double sobolev_norm(const RadialFunction& u, const SpaceParams& params, double tol) {
    auto terms = sobolev_norm_terms(u, params, tol);
    double s = 0.0;
    for (double t : terms) s += t;
    return std::pow(s, 1.0 / params.p);
}

EmbeddingExponent embedding_exponent(const SpaceParams& params) {
    EmbeddingExponent out;
    out.regime = regime(params);
    switch (out.regime) {
        case Regime::Sobolev:
            out.p_star = (params.theta + 1.0) * params.p / params.sigma();
            break;
        case Regime::AdamsTrudingerMoser:
            out.unbounded = true;
            break;
        case Regime::Morrey: {
            double ratio = (params.alpha_k() + 1.0) / params.p;
            double frac = ratio - std::floor(ratio);
            if (std::abs(frac) < 1e-12 || std::abs(frac - 1.0) < 1e-12) {
                out.gamma_any_below_one = true;  // any exponent in (0,1)
            } else {
                out.holder_gamma =
                    std::min(1.0 + std::floor(ratio) - ratio, 1.0 - 1.0 / params.p);
            }
            break;
        }
    }
    return out;
}

double hardy_constant(double p, double alpha) {
    if (!(p > 1.0)) throw std::invalid_argument("hardy_constant: p must be > 1");
    if (!(alpha - p + 1.0 > 0.0))
        throw std::invalid_argument("hardy_constant: needs alpha - p + 1 > 0");
    return p / (alpha - p + 1.0);
}

double hardy_ratio(const RadialFunction& u, double p, double alpha, double R, double tol) {
    auto num = integrate_weighted(
        [&](double r) { return std::pow(std::abs(u(r)), p); }, alpha - p, R, tol);
    auto den = integrate_weighted(
        [&](double r) { return std::pow(std::abs(u.deriv(1, r)), p); }, alpha, R, tol);
    if (!num.converged || !den.converged)
        throw std::runtime_error("hardy_ratio: weighted integral did not converge");
    if (den.value <= 0.0) {
        if (num.value <= 0.0) return 0.0;  // 0/0 convention for the trivial member
        throw std::runtime_error("hardy_ratio: zero denominator");
    }
    return std::pow(num.value / den.value, 1.0 / p);
}

bool hardy_admissible(double p, double q, double theta, double alpha, HardySide side) {
    if (!(p >= 1.0 && q >= 1.0))
        throw std::invalid_argument("hardy_admissible: p,q must be >= 1");
    const double a = alpha - p + 1.0;
    if (side == HardySide::OriginVanishing) {
        if (!(a < 0.0)) return false;
        const double bound = (theta + 1.0) * p / a;  // negative here
        if (p <= q) return q >= bound;
        return q > bound;
    }
    // boundary-vanishing
    if (a <= 0.0) return theta > -1.0;
    const double bound = (theta + 1.0) * p / a;
    if (p <= q) return q <= bound;
    return q < bound;
}

double pointwise_bound_ratio(const RadialFunction& u, const SpaceParams& params,
                             const Grid& g) {
    Regime reg = regime(params);
    if (reg == Regime::Morrey)
        throw std::invalid_argument("pointwise_bound_ratio: Morrey regime, use morrey_ratio");
    // Norms are restricted to the grid's support [min node, R]: borderline
    // members (log profiles at the ATM edge) stay diagnosable, and members
    // with convergent norms are unaffected under refinement.
    const double lo = g.min_node();
    std::vector<double> terms(params.k + 1);
    for (int j = 0; j <= params.k; ++j)
        terms[j] = quadrature::integrate_weighted_interval(
            [&u, j, p = params.p](double r) { return std::pow(std::abs(u.deriv(j, r)), p); },
            params.alpha[j], lo, params.R);
    double norm_p = 0.0;
    for (double t : terms) norm_p += t;
    double norm = std::pow(norm_p, 1.0 / params.p);
    if (norm <= 0.0) throw std::runtime_error("pointwise_bound_ratio: zero norm");
    double sup = 0.0;
    if (reg == Regime::Sobolev) {
        double e = params.sigma() / params.p;
        for (double t : g.nodes)
            sup = std::max(sup, std::abs(u(t)) * std::pow(t, e));
    } else {
        double dk = std::pow(terms.back(), 1.0 / params.p);
        double e = (params.p - 1.0) / params.p;
        for (double t : g.nodes) {
            double lead = std::pow(std::abs(std::log(t / params.R)), e) * dk;
            sup = std::max(sup, std::abs(u(t)) - lead);
        }
        sup = std::max(sup, 0.0);
    }
    return sup / norm;
}

double morrey_ratio(const RadialFunction& u, const SpaceParams& params, const Grid& g) {
    params.validate();
    if (params.k != 1 || !(params.p > 1.0) || regime(params) != Regime::Morrey)
        throw std::invalid_argument("morrey_ratio: needs the k=1 Morrey regime with p > 1");
    double gamma = std::min(1.0 - (params.alpha[1] + 1.0) / params.p, 1.0 - 1.0 / params.p);
    auto dnorm = integrate_weighted(
        [&](double r) { return std::pow(std::abs(u.deriv(1, r)), params.p); },
        params.alpha[1], params.R);
    if (!dnorm.converged) throw std::runtime_error("morrey_ratio: ||u'|| diverges");
    double dn = std::pow(dnorm.value, 1.0 / params.p);
    if (dn <= 0.0) return 0.0;
    std::vector<double> vals(g.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i) vals[i] = u(g.nodes[i]);
    double best = 0.0;
    for (size_t i = 0; i < g.nodes.size(); ++i)
        for (size_t j = i + 1; j < g.nodes.size(); ++j) {
            double d = g.nodes[j] - g.nodes[i];
            best = std::max(best, std::abs(vals[j] - vals[i]) / std::pow(d, gamma));
        }
    return best / dn;
}

RadialFunction hardy_near_extremal(double p, double alpha, double delta, double R) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("hardy_near_extremal: delta must be in (0,1)");
    double e = -(alpha - p + 1.0) * (1.0 - delta) / p;
    return RadialFunction::sum(1.0, RadialFunction::power(e, R), -std::pow(R, e),
                               RadialFunction::constant(1.0, R));
}

std::vector<CorpusEntry> standard_corpus(double R) {
    std::vector<CorpusEntry> c;
    c.push_back({"const", RadialFunction::constant(1.0, R)});
    c.push_back({"affine", RadialFunction::polynomial({1.0, -1.0 / R}, R)});  // 1 - r/R
    c.push_back(
        {"cubic", RadialFunction::polynomial({0.5, 0.0, 1.0 / (R * R), -0.4 / (R * R * R)}, R)});
    c.push_back({"pow_0.6", RadialFunction::power(0.6, R)});
    c.push_back({"pow_1.5", RadialFunction::power(1.5, R)});
    c.push_back({"log", RadialFunction::log_power(1.0, R)});
    c.push_back({"log_1.5", RadialFunction::log_power(1.5, R)});
    return c;
}

}  // namespace radsob::spaces
