// Weighted Sobolev norms on X^{k,p}_R(alpha_0..alpha_k), the
// Sobolev / Adams-Trudinger-Moser / Morrey regime trichotomy, embedding
// exponents, Hardy constants, and numerical checks of the radial pointwise
// estimates.

#ifndef RADSOB_SPACES_HPP
#define RADSOB_SPACES_HPP

#include <optional>
#include <string>
#include <vector>

#include "radsob/functions.hpp"
#include "radsob/quadrature.hpp"

namespace radsob::spaces {

using functions::RadialFunction;
using quadrature::Grid;

struct SpaceParams {
    int k = 1;
    double p = 2.0;
    double R = 1.0;
    std::vector<double> alpha;  // alpha_0 .. alpha_k, each > -1
    double theta = 0.0;

    double alpha_k() const { return alpha.back(); }
    double sigma() const { return alpha.back() - k * p + 1.0; }
    double p_conj() const { return p / (p - 1.0); }
    void validate() const;
};

enum class Regime { Sobolev, AdamsTrudingerMoser, Morrey };

std::string to_string(Regime r);

// Trichotomy on sigma = alpha_k - k p + 1 with exact-zero tolerance 1e-12.
Regime regime(const SpaceParams& params);

struct DivergentNorm : std::runtime_error {
    int derivative_order;
    DivergentNorm(int j)
        : std::runtime_error("sobolev_norm: weighted integral of derivative order " +
                             std::to_string(j) + " diverges"),
          derivative_order(j) {}
};

// (sum_j ||u^(j)||^p_{L^p_{alpha_j}})^{1/p}
double sobolev_norm(const RadialFunction& u, const SpaceParams& params,
                    double tol = 1e-10);
// per-order p-th powers, for reports
std::vector<double> sobolev_norm_terms(const RadialFunction& u, const SpaceParams& params,
                                       double tol = 1e-10);

struct EmbeddingExponent {
    Regime regime;
    std::optional<double> p_star;        // Sobolev: (theta+1)p/sigma
    bool unbounded = false;              // ATM: L^q for every finite q
    std::optional<double> holder_gamma;  // Morrey
    bool gamma_any_below_one = false;    // Morrey with (alpha_k+1)/p integer
};

EmbeddingExponent embedding_exponent(const SpaceParams& params);

// p/(alpha - p + 1), valid for alpha - p + 1 > 0, p > 1.
double hardy_constant(double p, double alpha);

// ||u||_{L^p_{alpha-p}} / ||u'||_{L^p_alpha} for boundary-vanishing u.
double hardy_ratio(const RadialFunction& u, double p, double alpha, double R,
                   double tol = 1e-10);

enum class HardySide { OriginVanishing, BoundaryVanishing };

// Literal case conditions of the Hardy-type inequality for AC_L / AC_R.
bool hardy_admissible(double p, double q, double theta, double alpha, HardySide side);

// Sobolev regime: sup_t |u(t)| t^{sigma/p} / ||u||.
// ATM regime: sup_t (|u(t)| - |log(t/R)|^{1/p'} ||u^(k)||_{L^p_{alpha_k}})_+ / ||u||.
double pointwise_bound_ratio(const RadialFunction& u, const SpaceParams& params,
                             const Grid& g);

// k=1 Morrey regime: max over node pairs of |u(r)-u(s)| / (|r-s|^gamma ||u'||).
double morrey_ratio(const RadialFunction& u, const SpaceParams& params, const Grid& g);

// Fixed analytic test corpus: constants, affine, monomials, log powers.
struct CorpusEntry {
    std::string name;
    RadialFunction u;
};
std::vector<CorpusEntry> standard_corpus(double R);

// Near-extremal boundary-vanishing family for the Hardy inequality:
// r^e - R^e with e = -(alpha-p+1)(1-delta)/p; the ratio approaches
// p/(alpha-p+1) as delta -> 0+ at a rate uniform in (p, alpha).
RadialFunction hardy_near_extremal(double p, double alpha, double delta, double R);

}  // namespace radsob::spaces

#endif
