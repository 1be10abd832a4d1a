#include "aniso/gaussline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aniso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double std_normal_cdf(double x) {
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

namespace {

// Acklam's rational approximation to the normal quantile (~1e-9 relative),
// used only as the Newton starting point.
double quantile_initial(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw OutOfRange("std_normal_quantile expects p in (0,1)");
    double x = quantile_initial(p);
    for (int step = 0; step < 2; ++step) {
        const double density = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        if (density < 1e-300) break;  // extreme tail; initial guess already tight there
        x -= (std_normal_cdf(x) - p) / density;
    }
    return x;
}

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
    std::erase_if(pieces, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const Interval& iv : pieces) {
        if (!pieces_.empty() && iv.lo <= pieces_.back().hi)
            pieces_.back().hi = std::max(pieces_.back().hi, iv.hi);
        else
            pieces_.push_back(iv);
    }
}

IntervalUnion IntervalUnion::full_line() { return IntervalUnion({{-kInf, kInf}}); }

bool IntervalUnion::contains(double t) const {
    for (const Interval& iv : pieces_)
        if (t >= iv.lo && t < iv.hi) return true;
    return false;
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
    std::vector<Interval> out;
    size_t i = 0, j = 0;
    while (i < pieces_.size() && j < other.pieces_.size()) {
        const Interval& a = pieces_[i];
        const Interval& b = other.pieces_[j];
        const double lo = std::max(a.lo, b.lo);
        const double hi = std::min(a.hi, b.hi);
        if (lo < hi) out.push_back({lo, hi});
        if (a.hi < b.hi)
            ++i;
        else
            ++j;
    }
    return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::complement() const {
    std::vector<Interval> out;
    double cursor = -kInf;
    for (const Interval& iv : pieces_) {
        if (cursor < iv.lo) out.push_back({cursor, iv.lo});
        cursor = iv.hi;
    }
    if (cursor < kInf) out.push_back({cursor, kInf});
    return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::symmetric_difference(const IntervalUnion& other) const {
    IntervalUnion a_minus_b = intersect(other.complement());
    IntervalUnion b_minus_a = other.intersect(complement());
    std::vector<Interval> all = a_minus_b.intervals();
    all.insert(all.end(), b_minus_a.intervals().begin(), b_minus_a.intervals().end());
    return IntervalUnion(std::move(all));
}

LineGaussian::LineGaussian(double alpha, double beta, double gamma0)
    : alpha_(alpha), beta_(beta), gamma0_(gamma0) {
    if (!(alpha > 0.0)) throw NotPositiveDefinite("line weight needs alpha > 0");
    peak_exponent_ = 0.5 * (gamma0_ - beta_ * beta_ / alpha_);
    total_ = std::exp(-peak_exponent_) * std::sqrt(2.0 * M_PI / alpha_);
}

double LineGaussian::weight(double t) const {
    if (std::isinf(t)) return 0.0;
    return std::exp(-0.5 * (alpha_ * t * t + 2.0 * beta_ * t + gamma0_));
}

double LineGaussian::mass_between(double lo, double hi) const {
    if (!(lo < hi)) return 0.0;
    const double slo = lo == -kInf ? -kInf : std::sqrt(alpha_) * (lo + beta_ / alpha_);
    const double shi = hi == kInf ? kInf : std::sqrt(alpha_) * (hi + beta_ / alpha_);
    // both endpoints on one side: difference of same-side tails keeps
    // relative precision even when the interval sits far out
    if (slo >= 0.0) return total_ * (std_normal_cdf(-slo) - std_normal_cdf(-shi));
    if (shi <= 0.0) return total_ * (std_normal_cdf(shi) - std_normal_cdf(slo));
    return total_ * (std_normal_cdf(shi) - std_normal_cdf(slo));
}

LineGaussian line_gaussian(const SpdMatrix& a, const Vector& z, const Direction& u) {
    if (a.dim() != static_cast<int>(z.size()) || a.dim() != u.dim())
        throw DimensionMismatch("line_gaussian: dimension mismatch");
    const Vector au = a.apply(u.components());
    const Vector az = a.apply(z);
    return LineGaussian(dot(au, u.components()), dot(az, u.components()), dot(az, z));
}

double line_mass(const LineGaussian& l, const IntervalUnion& s) {
    double m = 0.0;
    for (const Interval& iv : s.intervals()) m += l.mass_between(iv.lo, iv.hi);
    return std::max(m, 0.0);
}

double line_quantile(const LineGaussian& l, double mass) {
    const double total = l.total_mass();
    const double slack = 1e-12 * total;
    if (mass < -slack || mass > total + slack) throw MassOutOfRange("line_quantile: mass outside [0, total]");
    if (mass <= slack) return -kInf;
    if (mass >= total - slack) return kInf;
    const double p = mass / total;
    return std_normal_quantile(p) / std::sqrt(l.alpha()) - l.beta() / l.alpha();
}

double line_first_moment(const LineGaussian& l, const IntervalUnion& s) {
    // t * w(t) = -(1/alpha) w'(t) - (beta/alpha) w(t)
    double m = 0.0;
    for (const Interval& iv : s.intervals()) {
        m += -(l.weight(iv.hi) - l.weight(iv.lo)) / l.alpha();
        m -= (l.beta() / l.alpha()) * l.mass_between(iv.lo, iv.hi);
    }
    return m;
}

double slice_perimeter(const LineGaussian& l, const IntervalUnion& s) {
    double p = 0.0;
    for (const Interval& iv : s.intervals()) {
        if (std::isfinite(iv.lo)) p += l.weight(iv.lo);
        if (std::isfinite(iv.hi)) p += l.weight(iv.hi);
    }
    return p;
}

}  // namespace aniso
