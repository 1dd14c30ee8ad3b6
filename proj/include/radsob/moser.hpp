// Exponential functionals, sharp Adams-Trudinger-Moser constants, extremal
// sequences and blow-up demonstrations, the half-line change of variables,
// and Luxemburg norms.

#ifndef RADSOB_MOSER_HPP
#define RADSOB_MOSER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "radsob/spaces.hpp"

namespace radsob::moser {

using functions::GridFunction;
using functions::RadialFunction;
using spaces::SpaceParams;

struct Polynomial {
    std::vector<double> coeffs;  // ascending powers

    double operator()(double t) const;
    double deriv(int j, double t) const;
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double sup_deriv1(int scan_points = 1000) const;  // max of phi' on [0,1]
};

// Minimal-degree polynomial with phi(0)=...=phi^(k+1)(0)=0, phi(1)=phi'(1)=1,
// phi''(1)=...=phi^(k-1)(1)=0, and phi' >= 0 on [0,1] (verified by scan; the
// degree is escalated with a least-norm re-solve if the scan fails).
Polynomial profile_phi(int k);

struct MoserSequenceParams {
    double m = 100.0;   // > 1
    double eps = 0.05;  // in (0, 1/2)
    int k = 1;
    double R = 1.0;
    Polynomial phi;  // defaults to profile_phi(k) when empty

    void validate() const;
    const Polynomial& profile() const;
};

// Copy with the default profile filled in (and validated).
MoserSequenceParams with_default_profile(MoserSequenceParams params);

// H(t): eps*phi(t/eps) on (0,eps], t on (eps,1-eps], 1-eps*phi((1-t)/eps) on
// (1-eps,1], 1 beyond; returns the j-th derivative at t (0 for t > 1, t <= 0).
double moser_H(const MoserSequenceParams& params, int j, double t);

// psi_{m,eps}(r) = H(log(R/r)/log m) with derivative closures up to `order`
// (default: params.k).
RadialFunction moser_sequence(const MoserSequenceParams& params, int order = -1);

// r-values where psi's definition changes piece; quadrature panel breakpoints
std::vector<double> moser_breakpoints(const MoserSequenceParams& params);

// mu_0 = (theta+1) ((k-1)!)^{p/(p-1)}
double mu0(double theta, int k, double p);

struct FunctionalValue {
    double value = 0.0;
    bool converged = false;
    bool diverging = false;
};

// int_0^R exp(mu |u|^{p/(p-1)}) r^theta dr
FunctionalValue moser_functional(const RadialFunction& u, double mu, double p,
                                 double theta, double R,
                                 const std::vector<double>& breakpoints = {});

struct SequenceNormReport {
    double norm_pth = 0.0;       // ||psi||^p_{X^{k,p}_R}
    double rescaled = 0.0;       // ||psi||^p (log m)^{p-1}
    double bound = 0.0;          // ((k-1)!)^p (1 + 2^p eps ||phi'||^p)
    double phi_sup = 0.0;        // ||phi'||_inf
    std::vector<double> terms;   // per-derivative p-th powers
};

// Requires the ATM regime with alpha_i - i p + 1 > 0 for i < k.
SequenceNormReport sequence_norm_report(const MoserSequenceParams& params,
                                        const SpaceParams& space);

struct BlowupRow {
    double m = 0.0;
    double value = 0.0;           // functional at psi/||psi||
    bool diverged = false;
    double lower_bound = 0.0;     // exp(mu ||psi||^{-p'}) (R/m)^{theta+1}/(theta+1)
    double growth_exponent = 0.0; // d log(value) / d log(m), vs previous row
    double predicted_exponent = 0.0;
};

std::vector<BlowupRow> blowup_table(double mu, const SpaceParams& space,
                                    const std::vector<double>& m_list, double eps);

struct OptimizerConfig {
    int max_iters = 50000;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    int restarts = 3;
    int grid_n = 200;
    double grid_grading = 0.96;
};

struct MaximizeReport {
    double value = 0.0;  // estimate of l_mu
    GridFunction maximizer;
    double norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> restart_values;
};

// sup of the exponential functional over the unit sphere of X^{k,p}_R,
// projected ascent on nodal values with rescaling onto the sphere.
MaximizeReport maximize_lmu(double mu, const SpaceParams& space,
                            const OptimizerConfig& cfg = {});

struct HalfLineFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

// w(t) = (theta+1)^{(p-1)/p} u(R e^{-t/(theta+1)})
HalfLineFunction halfline_transform(const RadialFunction& u, double theta, double p,
                                    double R);

struct HalflineIdentity {
    double lhs = 0.0;  // int_{r_T}^R e^{(theta+1)|u|^{p'}} r^theta dr
    double rhs = 0.0;  // R^{theta+1}/(theta+1) int_0^T e^{|w|^{p'}-t} dt
};

// Both sides truncated consistently at t = T (r_T = R e^{-T/(theta+1)}).
HalflineIdentity halfline_identity(const RadialFunction& u, double theta, double p,
                                   double R, double T);

struct RampExtension {
    HalfLineFunction wtilde;
    double C1 = 0.0;
    double ramp_energy = 0.0;  // |w(0)|^p / C1^{p-1}
};

// Linear ramp w(0) t / C1 on [0, C1], then w shifted; requires w >= 0 and
// w(0) <= A w(t) on a sample scan (membership in the K_A class).
RampExtension extend_ramp(const HalfLineFunction& w, double A, double theta,
                          double alpha0, double p, double R, double scan_T = 40.0);

// Luxemburg norm with Phi(t) = exp(|t|^{p'}) - 1 (N-function normalization;
// set literal_phi for the paper's un-normalized exp(|t|^{p'})).
double luxemburg_norm(const RadialFunction& u, double theta, double p, double R,
                      bool literal_phi = false);

struct CriticalSweepRow {
    std::string member;
    double R = 0.0;
    double normalized_value = 0.0;  // functional at mu = theta+1, / R^{theta+1}
    bool admissible = true;         // u(R) <= A u(r) on scan
};

std::vector<CriticalSweepRow> critical_k1_sweep(double A, double theta, double alpha0,
                                                double p,
                                                const std::vector<double>& radii);

}  // namespace radsob::moser

#endif
