#pragma once

#include "aniso/measures.hpp"

namespace aniso {

struct IsoResult {
    double mass = 0.0;
    MeasureResult perimeter;
    double bound = 0.0;    // e^{-[phi^{-1}(mass)]^2/2} * d_min
    double deficit = 0.0;  // perimeter.value - bound
};

/// Lower perimeter bound at a given mass: e^{-[phi^{-1}(m)]^2/2} * d_min,
/// zero at m = 0 and m = 1.
double iso_bound(const SpdMatrix& a, double mass_value);

IsoResult iso_check(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg);

/// The half-space attaining the bound at a given mass: normal = the
/// computed eigenvector of the smallest eigenvalue (sign-normalized so
/// the largest-magnitude component is positive), t = phi^{-1}(mass)/d_min.
HalfSpaceSet extremal_halfspace(const SpdMatrix& a, double mass_value);

}  // namespace aniso
