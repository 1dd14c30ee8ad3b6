#include "radsob/moser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radsob::moser {

using quadrature::integrate_adaptive;
using quadrature::integrate_weighted;
using quadrature::integrate_weighted_interval;

namespace {

double falling(double x, int i) {
    double f = 1.0;
    for (int j = 0; j < i; ++j) f *= (x - j);
    return f;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// deterministic uniform in [0,1) from a 64-bit state (splitmix64 step)
double next_uniform(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return double(z >> 11) * 0x1.0p-53;
}

// Gaussian elimination with partial pivoting, in place.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (std::abs(A[col][col]) < 1e-14)
            throw std::runtime_error("solve_dense: singular system");
        for (int r = col + 1; r < n; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

}  // namespace

double Polynomial::operator()(double t) const {
    double acc = 0.0;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) acc = acc * t + coeffs[i];
    return acc;
}

double Polynomial::deriv(int j, double t) const {
    double acc = 0.0;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= j; --i)
        acc = acc * t + coeffs[i] * falling(double(i), j);
    return acc;
}

double Polynomial::sup_deriv1(int scan_points) const {
    double sup = 0.0;
    for (int i = 0; i <= scan_points; ++i)
        sup = std::max(sup, std::abs(deriv(1, double(i) / scan_points)));
    return sup;
}

Polynomial profile_phi(int k) {
    if (k < 1) throw std::invalid_argument("profile_phi: k must be >= 1");
    const int base = k + 2;                 // phi divisible by t^{k+2}
    const int K = std::max(2, k);           // conditions at t = 1
    for (int extra = 0; extra <= 6; ++extra) {
        const int dof = K + extra;
        // condition rows: phi(1)=1, phi'(1)=1, phi^(j)(1)=0 for j=2..k-1
        std::vector<std::vector<double>> A(K, std::vector<double>(dof));
        std::vector<double> rhs(K, 0.0);
        rhs[0] = 1.0;
        rhs[1] = 1.0;
        for (int j = 0; j < K; ++j)
            for (int i = 0; i < dof; ++i) A[j][i] = falling(double(base + i), j);
        std::vector<double> q;
        if (extra == 0) {
            q = solve_dense(A, rhs);
        } else {
            // least-norm solution q = A^T (A A^T)^{-1} rhs
            std::vector<std::vector<double>> AAT(K, std::vector<double>(K, 0.0));
            for (int r = 0; r < K; ++r)
                for (int c = 0; c < K; ++c)
                    for (int i = 0; i < dof; ++i) AAT[r][c] += A[r][i] * A[c][i];
            auto lam = solve_dense(AAT, rhs);
            q.assign(dof, 0.0);
            for (int i = 0; i < dof; ++i)
                for (int r = 0; r < K; ++r) q[i] += A[r][i] * lam[r];
        }
        Polynomial phi;
        phi.coeffs.assign(base + dof, 0.0);
        for (int i = 0; i < dof; ++i) phi.coeffs[base + i] = q[i];
        bool nonneg = true;
        for (int s = 0; s <= 1000 && nonneg; ++s)
            nonneg = phi.deriv(1, double(s) / 1000.0) >= -1e-11;
        if (nonneg) return phi;
    }
    throw std::runtime_error("profile_phi: nonnegative slope unattainable at the degree cap");
}

void MoserSequenceParams::validate() const {
    if (!(m > 1.0)) throw std::invalid_argument("MoserSequenceParams: m must be > 1");
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("MoserSequenceParams: eps must be in (0, 1/2)");
    if (k < 1) throw std::invalid_argument("MoserSequenceParams: k must be >= 1");
    if (!(R > 0.0)) throw std::invalid_argument("MoserSequenceParams: R must be positive");
    if (phi.coeffs.empty()) return;  // default profile picked up lazily
    for (int j = 0; j <= k + 1 && j < static_cast<int>(phi.coeffs.size()); ++j)
        if (std::abs(phi.coeffs[j]) > 1e-12)
            throw std::invalid_argument("MoserSequenceParams: phi must vanish to order k+1 at 0");
    if (std::abs(phi(1.0) - 1.0) > 1e-10 || std::abs(phi.deriv(1, 1.0) - 1.0) > 1e-10)
        throw std::invalid_argument("MoserSequenceParams: phi(1) = phi'(1) = 1 required");
    for (int j = 2; j <= k - 1; ++j)
        if (std::abs(phi.deriv(j, 1.0)) > 1e-9)
            throw std::invalid_argument("MoserSequenceParams: phi^(j)(1) = 0 required");
    for (int s = 0; s <= 1000; ++s)
        if (phi.deriv(1, double(s) / 1000.0) < -1e-9)
            throw std::invalid_argument("MoserSequenceParams: phi' < 0 on [0,1]");
}

const Polynomial& MoserSequenceParams::profile() const {
    if (phi.coeffs.empty())
        throw std::logic_error("MoserSequenceParams: profile not materialized");
    return phi;
}

MoserSequenceParams with_default_profile(MoserSequenceParams p) {
    if (p.phi.coeffs.empty()) p.phi = profile_phi(p.k);
    p.validate();
    return p;
}

namespace {
MoserSequenceParams with_profile(MoserSequenceParams p) { return with_default_profile(std::move(p)); }
}  // namespace

double moser_H(const MoserSequenceParams& params, int j, double t) {
    const Polynomial& phi = params.profile();
    const double eps = params.eps;
    if (t <= 0.0) return 0.0;
    if (t > 1.0) return j == 0 ? 1.0 : 0.0;
    if (t <= eps) {
        if (j == 0) return eps * phi(t / eps);
        return std::pow(eps, 1.0 - j) * phi.deriv(j, t / eps);
    }
    if (t <= 1.0 - eps) {
        if (j == 0) return t;
        return j == 1 ? 1.0 : 0.0;
    }
    if (j == 0) return 1.0 - eps * phi((1.0 - t) / eps);
    double sgn = (j % 2 == 0) ? -1.0 : 1.0;
    return sgn * std::pow(eps, 1.0 - j) * phi.deriv(j, (1.0 - t) / eps);
}

RadialFunction moser_sequence(const MoserSequenceParams& params, int order) {
    MoserSequenceParams p = with_profile(params);
    if (order < 0) order = p.k;
    const double L = std::log(p.m);
    const double R = p.R;
    // chain-rule coefficients: psi^(i) = r^{-i} sum_j c(j,i) H^(j)(t)/L^j
    std::vector<std::vector<double>> c(order + 1);
    if (order >= 1) c[1] = {-1.0};
    for (int i = 1; i < order; ++i) {
        c[i + 1].assign(i + 1, 0.0);
        auto get = [&](int j) { return (j >= 1 && j <= i) ? c[i][j - 1] : 0.0; };
        for (int j = 1; j <= i + 1; ++j) c[i + 1][j - 1] = -double(i) * get(j) - get(j - 1);
    }
    std::vector<RadialFunction::Evaluator> d;
    d.push_back([p, L, R](double r) { return moser_H(p, 0, std::log(R / r) / L); });
    for (int i = 1; i <= order; ++i) {
        auto ci = c[i];
        d.push_back([p, L, R, ci, i](double r) {
            double t = std::log(R / r) / L;
            double acc = 0.0;
            double Lp = L;
            for (int j = 1; j <= i; ++j) {
                acc += ci[j - 1] * moser_H(p, j, t) / Lp;
                Lp *= L;
            }
            return acc / std::pow(r, double(i));
        });
    }
    return RadialFunction(R, std::move(d));
}

std::vector<double> moser_breakpoints(const MoserSequenceParams& params) {
    const double L = std::log(params.m);
    return {params.R * std::exp(-params.eps * L),
            params.R * std::exp(-(1.0 - params.eps) * L), params.R / params.m};
}

double mu0(double theta, int k, double p) {
    if (!(theta > -1.0)) throw std::invalid_argument("mu0: theta must be > -1");
    if (k < 1) throw std::invalid_argument("mu0: k must be >= 1");
    if (!(p > 1.0)) throw std::invalid_argument("mu0: p must be > 1");
    return (theta + 1.0) * std::pow(factorial(k - 1), p / (p - 1.0));
}

FunctionalValue moser_functional(const RadialFunction& u, double mu, double p,
                                 double theta, double R,
                                 const std::vector<double>& breakpoints) {
    if (!(mu >= 0.0)) throw std::invalid_argument("moser_functional: mu must be >= 0");
    if (!(p > 1.0)) throw std::invalid_argument("moser_functional: p must be > 1");
    const double pc = p / (p - 1.0);
    auto f = [&u, mu, pc](double r) { return std::exp(mu * std::pow(std::abs(u(r)), pc)); };
    auto I = integrate_weighted(f, theta, R, 1e-9, {}, breakpoints);
    return {I.value, I.converged, I.diverging};
}

SequenceNormReport sequence_norm_report(const MoserSequenceParams& params,
                                        const SpaceParams& space) {
    MoserSequenceParams p = with_profile(params);
    space.validate();
    if (spaces::regime(space) != spaces::Regime::AdamsTrudingerMoser)
        throw std::invalid_argument("sequence_norm_report: space must be in the ATM regime");
    for (int i = 0; i < space.k; ++i)
        if (!(space.alpha[i] - i * space.p + 1.0 > 0.0))
            throw std::invalid_argument(
                "sequence_norm_report: needs alpha_i - i p + 1 > 0 below order k");
    if (space.k != p.k || space.R != p.R)
        throw std::invalid_argument("sequence_norm_report: sequence/space mismatch");
    auto psi = moser_sequence(p, p.k);
    auto bps = moser_breakpoints(p);
    SequenceNormReport rep;
    rep.terms.resize(space.k + 1);
    for (int j = 0; j <= space.k; ++j) {
        auto f = [&psi, j, pp = space.p](double r) {
            return std::pow(std::abs(psi.deriv(j, r)), pp);
        };
        rep.terms[j] = quadrature::integrate_weighted_value(f, space.alpha[j], space.R,
                                                            1e-10, {}, bps);
        rep.norm_pth += rep.terms[j];
    }
    const double L = std::log(p.m);
    rep.rescaled = rep.norm_pth * std::pow(L, space.p - 1.0);
    rep.phi_sup = p.profile().sup_deriv1();
    rep.bound = std::pow(factorial(p.k - 1), space.p) *
                (1.0 + std::pow(2.0, space.p) * p.eps * std::pow(rep.phi_sup, space.p));
    return rep;
}

std::vector<BlowupRow> blowup_table(double mu, const SpaceParams& space,
                                    const std::vector<double>& m_list, double eps) {
    space.validate();
    if (spaces::regime(space) != spaces::Regime::AdamsTrudingerMoser)
        throw std::invalid_argument("blowup_table: space must be in the ATM regime");
    const double pc = space.p / (space.p - 1.0);
    const double mu_0 = mu0(space.theta, space.k, space.p);
    std::vector<BlowupRow> rows;
    double phi_sup = profile_phi(space.k).sup_deriv1();
    const double pred =
        (space.theta + 1.0) *
        (mu / mu_0 / (1.0 + std::pow(2.0, space.p) * eps * std::pow(phi_sup, space.p)) - 1.0);
    for (double m : m_list) {
        MoserSequenceParams params;
        params.m = m;
        params.eps = eps;
        params.k = space.k;
        params.R = space.R;
        params = with_profile(params);
        auto psi = moser_sequence(params, space.k);
        double norm = spaces::sobolev_norm(psi, space);
        auto u = psi.scaled(1.0 / norm);
        auto F = moser_functional(u, mu, space.p, space.theta, space.R,
                                  moser_breakpoints(params));
        BlowupRow row;
        row.m = m;
        row.value = F.value;
        row.diverged = !F.converged;
        row.lower_bound = std::exp(mu * std::pow(norm, -pc)) *
                          std::pow(space.R / m, space.theta + 1.0) / (space.theta + 1.0);
        row.predicted_exponent = pred;
        if (!rows.empty() && rows.back().value > 0.0 && row.value > 0.0)
            row.growth_exponent =
                std::log(row.value / rows.back().value) / std::log(m / rows.back().m);
        rows.push_back(row);
    }
    return rows;
}

namespace {

using quadrature::cell_weights;

// Symmetric positive-definite banded matrix, upper storage, Cholesky solve.
struct BandedSPD {
    int n = 0, bw = 0;
    std::vector<double> a;  // at(i,j) for j in [i, i+bw]

    BandedSPD(int n_, int bw_) : n(n_), bw(bw_), a(size_t(n_) * (bw_ + 1), 0.0) {}
    double& at(int i, int j) { return a[size_t(i) * (bw + 1) + (j - i)]; }
    double get(int i, int j) const { return a[size_t(i) * (bw + 1) + (j - i)]; }

    void add_sym(int i, int j, double v) {
        if (i <= j)
            at(i, j) += v;
        else
            at(j, i) += v;
    }

    void factor() {
        for (int k = 0; k < n; ++k) {
            double d = at(k, k);
            for (int i = std::max(0, k - bw); i < k; ++i) {
                double lik = get(i, k);
                d -= lik * lik;
            }
            if (!(d > 0.0)) throw std::runtime_error("BandedSPD: not positive definite");
            at(k, k) = std::sqrt(d);
            for (int j = k + 1; j <= std::min(k + bw, n - 1); ++j) {
                double s = at(k, j);
                for (int i = std::max({0, k - bw, j - bw}); i < k; ++i)
                    s -= get(i, k) * get(i, j);
                at(k, j) = s / at(k, k);
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        for (int i = 0; i < n; ++i) {  // forward with U^T
            double s = b[i];
            for (int j = std::max(0, i - bw); j < i; ++j) s -= get(j, i) * b[j];
            b[i] = s / get(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {  // backward with U
            double s = b[i];
            for (int j = i + 1; j <= std::min(i + bw, n - 1); ++j) s -= get(i, j) * b[j];
            b[i] = s / get(i, i);
        }
        return b;
    }
};

struct Stencil {
    int start = 0;
    std::vector<double> w;
};

std::vector<Stencil> derivative_stencils(const quadrature::Grid& g, int order) {
    static const int window_for[5] = {1, 3, 5, 6, 7};
    const int n = g.size();
    const int w = std::min(window_for[order], n);
    std::vector<Stencil> rows(n);
    std::vector<double> nodes(w);
    for (int i = 0; i < n; ++i) {
        int lo = std::clamp(i - w / 2, 0, n - w);
        for (int s = 0; s < w; ++s) nodes[s] = g.nodes[lo + s];
        rows[i].start = lo;
        rows[i].w = functions::fd_weights(g.nodes[i], nodes, order);
    }
    return rows;
}

struct NormMachine {
    const SpaceParams& space;
    std::vector<std::vector<double>> weights;        // per order j
    std::vector<std::vector<Stencil>> stencils;      // per order j (j=0 empty)

    NormMachine(const quadrature::Grid& g, const SpaceParams& sp) : space(sp) {
        weights.resize(sp.k + 1);
        stencils.resize(sp.k + 1);
        for (int j = 0; j <= sp.k; ++j) {
            weights[j] = cell_weights(g, sp.alpha[j]);
            if (j >= 1) stencils[j] = derivative_stencils(g, j);
        }
    }

    int bandwidth() const {
        int bw = 0;
        for (int j = 1; j <= space.k; ++j)
            for (const auto& st : stencils[j])
                bw = std::max(bw, int(st.w.size()) - 1);
        return bw;
    }

    // B(u) with grad norm_pth = p B(u) u:   B = sum_j D_j^T W_j |D_j u|^{p-2} D_j
    BandedSPD metric(const std::vector<double>& u) const {
        const int n = static_cast<int>(u.size());
        const double p = space.p;
        BandedSPD B(n, bandwidth());
        double dscale = 1e-30;
        for (double x : u) dscale = std::max(dscale, std::abs(x));
        auto wfac = [&](double d) {
            return p == 2.0 ? 1.0 : std::pow(std::max(std::abs(d), 1e-8 * dscale), p - 2.0);
        };
        for (int i = 0; i < n; ++i) B.add_sym(i, i, weights[0][i] * wfac(u[i]));
        for (int j = 1; j <= space.k; ++j) {
            for (int i = 0; i < n; ++i) {
                const Stencil& st = stencils[j][i];
                double d = 0.0;
                for (size_t s = 0; s < st.w.size(); ++s) d += st.w[s] * u[st.start + s];
                double f = weights[j][i] * wfac(d);
                for (size_t s = 0; s < st.w.size(); ++s)
                    for (size_t t = s; t < st.w.size(); ++t)
                        B.add_sym(st.start + int(s), st.start + int(t),
                                  f * st.w[s] * st.w[t]);
            }
        }
        double dmax = 0.0;
        for (int i = 0; i < n; ++i) dmax = std::max(dmax, B.get(i, i));
        for (int i = 0; i < n; ++i) B.at(i, i) += 1e-13 * dmax;
        return B;
    }

    double norm_pth(const std::vector<double>& u, std::vector<double>* grad,
                    std::vector<double>* hess_diag = nullptr) const {
        const int n = static_cast<int>(u.size());
        const double p = space.p;
        if (grad) grad->assign(n, 0.0);
        if (hess_diag) hess_diag->assign(n, 0.0);
        double acc = 0.0;
        for (int j = 0; j <= space.k; ++j) {
            for (int i = 0; i < n; ++i) {
                double d;
                if (j == 0) {
                    d = u[i];
                } else {
                    d = 0.0;
                    const Stencil& st = stencils[j][i];
                    for (size_t s = 0; s < st.w.size(); ++s)
                        d += st.w[s] * u[st.start + s];
                }
                double a = std::abs(d);
                if (a == 0.0) continue;
                acc += weights[j][i] * std::pow(a, p);
                double gfac =
                    grad ? weights[j][i] * p * std::pow(a, p - 1.0) * (d > 0 ? 1.0 : -1.0)
                         : 0.0;
                double hfac = hess_diag
                                  ? weights[j][i] * p * std::max(p - 1.0, 1e-3) *
                                        std::pow(std::max(a, 1e-10), p - 2.0)
                                  : 0.0;
                if (j == 0) {
                    if (grad) (*grad)[i] += gfac;
                    if (hess_diag) (*hess_diag)[i] += hfac;
                } else {
                    const Stencil& st = stencils[j][i];
                    for (size_t s = 0; s < st.w.size(); ++s) {
                        if (grad) (*grad)[st.start + s] += gfac * st.w[s];
                        if (hess_diag)
                            (*hess_diag)[st.start + s] += hfac * st.w[s] * st.w[s];
                    }
                }
            }
        }
        return acc;
    }
};

}  // namespace

MaximizeReport maximize_lmu(double mu, const SpaceParams& space, const OptimizerConfig& cfg) {
    space.validate();
    if (spaces::regime(space) != spaces::Regime::AdamsTrudingerMoser)
        throw std::invalid_argument("maximize_lmu: space must be in the ATM regime");
    const double mu_0 = mu0(space.theta, space.k, space.p);
    if (!(mu >= 0.0 && mu < mu_0))
        throw std::invalid_argument("maximize_lmu: need 0 <= mu < mu_0");
    auto g = quadrature::build_grid(space.R, cfg.grid_n, cfg.grid_grading);
    NormMachine machine(g, space);
    auto wtheta = cell_weights(g, space.theta);
    const double pc = space.p / (space.p - 1.0);
    const int n = g.size();

    auto objective = [&](const std::vector<double>& u, std::vector<double>* grad) {
        if (grad) grad->assign(n, 0.0);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = std::abs(u[i]);
            double e = std::exp(mu * std::pow(a, pc));
            acc += wtheta[i] * e;
            if (grad && a > 0.0)
                (*grad)[i] = wtheta[i] * e * mu * pc * std::pow(a, pc - 1.0) *
                             (u[i] > 0 ? 1.0 : -1.0);
        }
        return acc;
    };
    auto normalize = [&](std::vector<double>& u) {
        double np = machine.norm_pth(u, nullptr);
        double s = std::pow(np, 1.0 / space.p);
        if (!(s > 0.0)) throw std::runtime_error("maximize_lmu: zero trial norm");
        for (double& x : u) x /= s;
        return s;
    };

    MaximizeReport best;
    best.value = -1.0;
    for (int restart = 0; restart < std::max(1, cfg.restarts); ++restart) {
        std::uint64_t state = cfg.seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull * restart;
        // random smooth positive start (rough nodal noise has an enormous
        // discrete derivative norm and normalizes to nothing useful)
        double c0 = 0.2 + 0.8 * next_uniform(state);
        double c1 = 0.2 + 0.8 * next_uniform(state);
        double c2 = 0.2 + 0.8 * next_uniform(state);
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i) {
            double x = g.nodes[i] / space.R;
            u[i] = c0 + c1 * (1.0 - x) + c2 * (1.0 - x * x);
        }
        normalize(u);
        double obj = objective(u, nullptr);
        int it = 0;
        int stall = 0;
        bool converged = false;
        std::vector<double> grad, trial;
        // safeguarded fixed-point iteration on the first-order condition
        // grad F = lambda p B(u) u:   z = B(u)^{-1} grad F, step toward z on
        // the norm sphere while the objective improves
        for (; it < cfg.max_iters; ++it) {
            objective(u, &grad);
            double gsz = 0.0;
            for (double x : grad) gsz += x * x;
            if (gsz == 0.0) {  // mu = 0: objective is constant on the sphere
                converged = true;
                break;
            }
            BandedSPD B = machine.metric(u);
            B.factor();
            auto z = B.solve(grad);
            normalize(z);
            double prev = obj;
            bool improved = false;
            for (double t : {1.0, 0.5, 0.25, 0.1, 0.03, 0.01, 0.003, 0.001, 3e-4, 1e-4}) {
                trial = u;
                for (int i = 0; i < n; ++i) trial[i] += t * (z[i] - u[i]);
                normalize(trial);
                double ot = objective(trial, nullptr);
                if (std::isfinite(ot) && ot > obj) {
                    u.swap(trial);
                    obj = ot;
                    improved = true;
                    break;
                }
            }
            if (!improved) {
                converged = true;
                break;
            }
            if ((obj - prev) <= cfg.tol * std::abs(obj)) {
                if (++stall >= 3) {
                    converged = true;
                    break;
                }
            } else {
                stall = 0;
            }
        }
        double norm = std::pow(machine.norm_pth(u, nullptr), 1.0 / space.p);
        best.restart_values.push_back(obj);
        if (obj > best.value) {
            best.value = obj;
            best.maximizer = GridFunction{g, u};
            best.norm = norm;
            best.iterations = it;
            best.converged = converged;
        }
    }
    return best;
}

HalfLineFunction halfline_transform(const RadialFunction& u, double theta, double p,
                                    double R) {
    if (!(theta > -1.0)) throw std::invalid_argument("halfline_transform: theta must be > -1");
    double fac = std::pow(theta + 1.0, (p - 1.0) / p);
    HalfLineFunction w;
    w.value = [u, fac, theta, R](double t) {
        return fac * u(R * std::exp(-t / (theta + 1.0)));
    };
    w.deriv = [u, fac, theta, R](double t) {
        double r = R * std::exp(-t / (theta + 1.0));
        return -fac * u.deriv(1, r) * r / (theta + 1.0);
    };
    return w;
}

HalflineIdentity halfline_identity(const RadialFunction& u, double theta, double p,
                                   double R, double T) {
    auto w = halfline_transform(u, theta, p, R);
    const double pc = p / (p - 1.0);
    const double rT = R * std::exp(-T / (theta + 1.0));
    HalflineIdentity out;
    out.lhs = integrate_weighted_interval(
        [&](double r) { return std::exp((theta + 1.0) * std::pow(std::abs(u(r)), pc)); },
        theta, rT, R, 1e-12);
    out.rhs = std::pow(R, theta + 1.0) / (theta + 1.0) *
              integrate_adaptive(
                  [&](double t) {
                      return std::exp(std::pow(std::abs(w.value(t)), pc) - t);
                  },
                  0.0, T, 1e-12);
    return out;
}

RampExtension extend_ramp(const HalfLineFunction& w, double A, double theta,
                          double alpha0, double p, double R, double scan_T) {
    if (!(A > 0.0)) throw std::invalid_argument("extend_ramp: A must be positive");
    const double w0 = w.value(0.0);
    for (int i = 0; i <= 400; ++i) {
        double t = scan_T * i / 400.0;
        double wt = w.value(t);
        if (wt < -1e-12 || w0 > A * wt + 1e-9 * (1.0 + std::abs(wt)))
            throw std::invalid_argument("extend_ramp: membership in K_A violated");
    }
    RampExtension out;
    out.C1 = (theta + 1.0) *
             std::pow((alpha0 + 1.0) * std::pow(A, p) / std::pow(R, alpha0 + 1.0),
                      1.0 / (p - 1.0));
    out.ramp_energy = std::pow(std::abs(w0), p) / std::pow(out.C1, p - 1.0);
    double C1 = out.C1;
    out.wtilde.value = [w, w0, C1](double t) {
        return t <= C1 ? w0 * t / C1 : w.value(t - C1);
    };
    out.wtilde.deriv = [w, w0, C1](double t) {
        return t <= C1 ? w0 / C1 : w.deriv(t - C1);
    };
    return out;
}

double luxemburg_norm(const RadialFunction& u, double theta, double p, double R,
                      bool literal_phi) {
    if (!(theta > -1.0)) throw std::invalid_argument("luxemburg_norm: theta must be > -1");
    if (!(p > 1.0)) throw std::invalid_argument("luxemburg_norm: p must be > 1");
    const double pc = p / (p - 1.0);
    double sup = 0.0;
    for (int i = 0; i <= 200; ++i)
        sup = std::max(sup, std::abs(u(R * std::pow(10.0, -8.0 * i / 200.0))));
    if (sup == 0.0) return 0.0;
    auto excess = [&](double delta) {
        auto f = [&](double r) {
            double x = std::pow(std::abs(u(r)) / delta, pc);
            return literal_phi ? std::exp(x) : std::expm1(x);
        };
        auto I = integrate_weighted(f, theta, R, 1e-11);
        if (I.diverging) return std::numeric_limits<double>::infinity();
        return I.value - 1.0;
    };
    double lo = 1e-9, hi = 1e9;
    if (excess(lo) < 0.0) return lo;
    if (excess(hi) > 0.0)
        throw std::runtime_error("luxemburg_norm: no bracket within [1e-9, 1e9]");
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
        double mid = std::sqrt(lo * hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<CriticalSweepRow> critical_k1_sweep(double A, double theta, double alpha0,
                                                double p,
                                                const std::vector<double>& radii) {
    if (!(p >= 2.0)) throw std::invalid_argument("critical_k1_sweep: needs p >= 2");
    std::vector<CriticalSweepRow> rows;
    for (double R : radii) {
        SpaceParams space;
        space.k = 1;
        space.p = p;
        space.R = R;
        space.alpha = {alpha0, p - 1.0};
        space.theta = theta;
        struct Member {
            std::string name;
            RadialFunction u;
            std::vector<double> bps;
        };
        std::vector<Member> corpus;
        corpus.push_back({"zero", RadialFunction::constant(0.0, R), {}});
        corpus.push_back({"const", RadialFunction::constant(1.0, R), {}});
        corpus.push_back({"linear_decay",
                          RadialFunction::polynomial({1.0, -1.0 / R}, R), {}});
        for (double logm : {5.0, 10.0}) {
            MoserSequenceParams mp;
            mp.m = std::exp(logm);
            mp.k = 1;
            mp.R = R;
            mp = with_profile(mp);
            corpus.push_back({"truncated_log_m_e" + std::to_string(int(logm)),
                              moser_sequence(mp, 1), moser_breakpoints(mp)});
        }
        for (auto& mem : corpus) {
            CriticalSweepRow row;
            row.member = mem.name;
            row.R = R;
            double norm = spaces::sobolev_norm(mem.u, space);
            RadialFunction u = norm > 0.0 ? mem.u.scaled(1.0 / norm) : mem.u;
            bool ok = true;
            double uR = u(R);
            for (int i = 0; i <= 300 && ok; ++i) {
                double r = R * std::pow(10.0, -6.0 * i / 300.0);
                ok = uR <= A * u(r) + 1e-9;
            }
            row.admissible = ok;
            if (ok) {
                auto F = moser_functional(u, theta + 1.0, p, theta, R, mem.bps);
                row.normalized_value = F.value / std::pow(R, theta + 1.0);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace radsob::moser
