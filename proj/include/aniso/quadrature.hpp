#pragma once

#include <functional>
#include <vector>

#include "aniso/errors.hpp"

namespace aniso {

struct QuadratureConfig {
    int base_rule = 32;          // Gauss-Legendre nodes per panel
    int panels_per_axis = 4096;  // adaptive splitting limit per axis
    double tail_tol = 1e-12;     // neglected Gaussian tail mass
    double rel_tol = 1e-9;       // target relative error

    void validate() const {
        if (base_rule < 2 || panels_per_axis < 1 || !(tail_tol > 0) || !(rel_tol > 0))
            throw OutOfRange("quadrature config fields must be positive");
        if (!(tail_tol < rel_tol)) throw OutOfRange("quadrature config needs tail_tol < rel_tol");
    }
};

/// Gauss-Legendre rule on [-1,1], computed once per order and cached.
struct GlRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GlRule& gl_rule(int order);

/// Radius R with the mass of e^{-|s|^2/(2 sigma^2)} outside |s| <= R below
/// tail_tol, via R = sigma * sqrt(2 ln(1/tail_tol) + dims ln(2 + R^2))
/// iterated twice.
double truncation_radius(double sigma, int dims, double tail_tol);

/// Result of a vector-valued adaptive integration.
struct VecIntegral {
    std::vector<double> value;
    std::vector<double> error;  // per component
    int panels = 0;
};

/// Adaptive Gauss-Legendre bisection of a vector-valued integrand over
/// [a,b]. Interior breakpoints force initial panel splits (used for the
/// jump locations of sliced sets). Panel acceptance compares one panel
/// against its two halves, componentwise, against rel_tol scaled by a
/// whole-interval first-pass estimate. Throws QuadratureNotConverged once
/// max_panels splits were spent and some panel still fails.
VecIntegral integrate_adaptive(const std::function<void(double, double*)>& f, int ncomp, double a, double b,
                               const std::vector<double>& breakpoints, double rel_tol, int base_rule,
                               int max_panels);

}  // namespace aniso
