// The operator Delta_gamma = -u'' - gamma u'/r, iterated gradients, the
// Green-integral inverse with Navier-type boundary behavior, the coefficient
// recursion for Delta^n of the Moser sequence, and the Gamma-function sharp
// constants.

#ifndef RADSOB_OPERATORS_HPP
#define RADSOB_OPERATORS_HPP

#include <optional>
#include <vector>

#include "radsob/functions.hpp"
#include "radsob/moser.hpp"

namespace radsob::operators {

using functions::RadialFunction;

// -u'' - gamma u'/r; derivative order drops by 2.
RadialFunction delta_gamma(const RadialFunction& u, double gamma);

// u' as a RadialFunction (evaluator shift); order drops by 1.
RadialFunction derivative_function(const RadialFunction& u);

// (Delta^{(k-1)/2} u)' for k odd, Delta^{k/2} u for k even.
RadialFunction nabla_gamma_k(const RadialFunction& u, double gamma, int k);

struct GreenConfig {
    double table_ratio = 0.85;
    double table_floor = 1e-13;
};

// u(r) = int_r^R t^{-gamma} int_0^t v(s) s^gamma ds dt: u(R) = 0,
// Delta_gamma u = v, r^gamma u' -> 0 at the origin.  Derivatives up to
// v.order()+2 are supplied in closed form from the cached inner integral.
RadialFunction green_inverse(const RadialFunction& v, double gamma, double R,
                             const GreenConfig& cfg = {});

// Same with v(r) = r^beta phi(r), phi smooth: the power factor is absorbed
// into the quadrature weight (gamma + beta > -1 required).
RadialFunction green_inverse_weighted(const RadialFunction& phi, double beta,
                                      double gamma, double R,
                                      const GreenConfig& cfg = {});

// Coefficient tables for Delta_gamma^n psi_{m,eps} = r^{-2n} sum_i c_{in}
// H^(i)(log(R/r)/log m) / (log m)^i.
struct CoefficientTable {
    double gamma = 0.0;
    int depth = 0;
    std::vector<std::vector<double>> levels;  // levels[n-1] has 2n entries

    double entry(int i, int n) const;  // c_{in}, 1-based
};

// Literal published table: seed c_11 = -(gamma-1), c_21 = -1.
CoefficientTable coefficient_table(double gamma, int n);

// Expansion that matches n-fold operator application: seed (+(gamma-1), -1).
// The first-entry magnitudes |c_1n| agree between the two tables.
CoefficientTable laplacian_expansion_table(double gamma, int n);

// -2^{2n-1} Gamma(n) Gamma((gamma+1)/2) / Gamma((gamma+1-2n)/2); nullopt when
// the denominator Gamma sits on a pole (odd-integer collisions), where the
// limiting value is 0.
std::optional<double> c1n_closed_form(double gamma, int n);

struct ClosedFormCheck {
    double recursion = 0.0;
    std::optional<double> closed_form;
    bool pole = false;
    bool match = false;
};

ClosedFormCheck check_c1n(double gamma, int n, double rel_tol = 1e-12);

// Evaluates Delta_gamma^n psi via the expansion table; matches the composed
// operator applied to moser_sequence.
RadialFunction iterated_laplacian_psi(const moser::MoserSequenceParams& params,
                                      double gamma, int n);

// 2^{k-1} Gamma(.)... base of the Navier sharp constant (parity-dependent).
double navier_base(double gamma, int k);

// mu_0(theta,gamma,p,k) = (theta+1) * navier_base^{p/(p-1)}.
double mu0_navier(double theta, double gamma, double p, int k);

// C_{gamma,q} = q^2 / ((q-1)(gamma+1)(gamma-2q+1)), gamma - 2q + 1 > 0.
double comparison_constant(double gamma, double q);

// C_i = p^2 / ([(gamma+1)p - (alpha-2(i-1)p+1)](alpha-2ip+1)), i = 1..j-1.
std::vector<double> comparison_chain(double gamma, double p, double alpha, int j);

// (gamma-1) [ (k-1) for k odd ] prod C_i^{-1} with the chain at alpha_k = kp-1;
// equals navier_base(gamma,k).
double comparison_product(double gamma, double p, int k);

}  // namespace radsob::operators

#endif
