// Radial functions on (0,R] with derivative access up to a fixed order.
//
// Paper-specified families (Moser sequences, power/log witnesses) are carried
// as analytic closures so that derivatives near the singular origin are exact;
// finite differences exist only for sampled solver output.

#ifndef RADSOB_FUNCTIONS_HPP
#define RADSOB_FUNCTIONS_HPP

#include <functional>
#include <string>
#include <vector>

#include "radsob/quadrature.hpp"

namespace radsob::functions {

using quadrature::Grid;

class RadialFunction {
public:
    using Evaluator = std::function<double(double)>;

    RadialFunction() = default;
    RadialFunction(double radius, std::vector<Evaluator> derivatives);

    double radius() const { return radius_; }
    int order() const { return static_cast<int>(derivs_.size()) - 1; }
    double operator()(double r) const { return derivs_[0](r); }
    double deriv(int j, double r) const;

    RadialFunction scaled(double c) const;
    static RadialFunction sum(double a, const RadialFunction& u, double b,
                              const RadialFunction& v);

    // factories (order = highest derivative exposed)
    static RadialFunction constant(double c, double R, int order = 6);
    static RadialFunction power(double exponent, double R, int order = 6);      // r^s
    static RadialFunction log_power(double exponent, double R, int order = 4);  // (log(R/r))^s
    static RadialFunction polynomial(std::vector<double> coeffs, double R);     // sum c_i r^i

private:
    double radius_ = 1.0;
    std::vector<Evaluator> derivs_;
};

struct GridFunction {
    Grid grid;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
};

GridFunction from_analytic(const RadialFunction& u, const Grid& g);

// j-th derivative by nonuniform finite differences (local polynomial fit),
// one-sided at the ends.  j <= 4 and the grid must have at least j+2 nodes.
GridFunction derivative(const GridFunction& u, int j);

// Finite-difference weights for the m-th derivative at x0 from the given
// stencil nodes (Fornberg's recurrence).
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m);

}  // namespace radsob::functions

#endif
