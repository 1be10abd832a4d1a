#pragma once

#include <string>

#include "aniso/sets.hpp"

namespace aniso {

enum class Method { closed_form, slice_quadrature, graph_quadrature, monte_carlo };
std::string method_name(Method m);

struct MeasureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    Method method = Method::closed_form;
};

/// gamma_A(H(omega,t)) = phi(t / |(sqrt A)^{-1} omega|).
MeasureResult halfspace_mass(const SpdMatrix& a, const HalfSpaceSet& h);

/// P_{gamma_A}(H(omega,t)) = e^{-t^2/(2 s^2)} / s with s = |(sqrt A)^{-1} omega|.
MeasureResult halfspace_perimeter(const SpdMatrix& a, const HalfSpaceSet& h);

/// b_{gamma_A}(H(omega,t)) = -(2 pi)^{-1/2} e^{-t^2/(2 s^2)} A^{-1} omega / s.
Vector halfspace_barycenter(const SpdMatrix& a, const HalfSpaceSet& h);

/// gamma_A(E): closed form for half-spaces, slicewise adaptive quadrature
/// for polytopes/boxes, grid-cell composite quadrature for subgraphs.
MeasureResult mass(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg);

/// P_{gamma_A}(E): closed form for half-spaces; facet-wise reduction for
/// polytopes/boxes (n <= 4); graph + wall quadrature for subgraphs (n = 2, 3).
MeasureResult perimeter(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg);

/// b_{gamma_A}(E), computed alongside mass from the same slice reduction.
Vector barycenter(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg);

struct SandwichTriple {
    double lhs;  // ||sqrt A||^{-1} P_{gamma_A}(E)
    double mid;  // P_gamma(sqrt(A) E)
    double rhs;  // ||(sqrt A)^{-1}|| P_{gamma_A}(E)
};
SandwichTriple perimeter_sandwich_check(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg);

/// E + eps * closed unit ball. Half-spaces shift exactly; bounded 2D
/// convex polytopes/boxes are circumscribed by support lines with the arc
/// gaps sampled finely enough to keep the overshoot below eps * 1e-4.
SetRegion minkowski_enlarge(const SetRegion& e, double eps);

}  // namespace aniso
