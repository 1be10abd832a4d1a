#pragma once

#include <limits>
#include <vector>

#include "aniso/linalg.hpp"

namespace aniso {

/// Standard normal CDF, phi(x) = (2*pi)^{-1/2} * integral of e^{-t^2/2}
/// up to x. Evaluated through erfc; absolute error below 1e-15.
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf on (0,1). Rational initial guess refined by
/// two Newton steps; |cdf(result) - p| stays below 1e-13.
double std_normal_quantile(double p);

/// One interval of the real line, endpoints possibly +-infinity.
struct Interval {
    double lo;
    double hi;
};

/// Finite disjoint union of intervals, kept sorted and canonical
/// (overlapping or touching pieces merged, empty pieces dropped).
class IntervalUnion {
  public:
    IntervalUnion() = default;
    explicit IntervalUnion(std::vector<Interval> pieces);
    static IntervalUnion empty() { return IntervalUnion(); }
    static IntervalUnion full_line();

    const std::vector<Interval>& intervals() const { return pieces_; }
    bool is_empty() const { return pieces_.empty(); }
    bool contains(double t) const;

    IntervalUnion intersect(const IntervalUnion& other) const;
    IntervalUnion complement() const;
    IntervalUnion symmetric_difference(const IntervalUnion& other) const;

  private:
    std::vector<Interval> pieces_;
};

/// The weight t -> e^{-(alpha t^2 + 2 beta t + gamma0)/2} along a line
/// z + t u, i.e. e^{-|sqrt(A)(z+tu)|^2/2} expanded as a quadratic in t.
class LineGaussian {
  public:
    LineGaussian(double alpha, double beta, double gamma0);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double gamma0() const { return gamma0_; }

    /// e^{-(alpha t^2 + 2 beta t + gamma0)/2}; 0 at t = +-infinity.
    double weight(double t) const;
    /// Total line mass, C * sqrt(2 pi / alpha) with C = e^{-(gamma0 - beta^2/alpha)/2}.
    double total_mass() const { return total_; }
    /// Mass of (-inf, t].
    double mass_below(double t) const { return mass_between(-std::numeric_limits<double>::infinity(), t); }
    /// Mass of [lo, hi], evaluated on whichever tail keeps full relative
    /// precision (no total-minus-tail cancellation).
    double mass_between(double lo, double hi) const;

  private:
    double alpha_, beta_, gamma0_;
    double peak_exponent_;  // (gamma0 - beta^2/alpha)/2, exponent at the mode
    double total_;
};

LineGaussian line_gaussian(const SpdMatrix& a, const Vector& z, const Direction& u);

/// Integral of the line weight over S. Exact up to cdf accuracy.
double line_mass(const LineGaussian& l, const IntervalUnion& s);

/// t with line_mass(l, (-inf,t)) = mass; -inf for mass 0, +inf at total
/// mass. Requests within 1e-12*total of the ends clamp; anything farther
/// outside [0,total] throws MassOutOfRange.
double line_quantile(const LineGaussian& l, double mass);

/// Integral of t * weight(t) over S, by the closed-form antiderivative.
double line_first_moment(const LineGaussian& l, const IntervalUnion& s);

/// Sum of the weight over the finite endpoints of S.
double slice_perimeter(const LineGaussian& l, const IntervalUnion& s);

}  // namespace aniso
