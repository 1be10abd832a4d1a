#include "aniso/isoperimetry.hpp"

#include <cmath>

#include "aniso/gaussline.hpp"

namespace aniso {

double iso_bound(const SpdMatrix& a, double mass_value) {
    if (!(mass_value >= 0.0 && mass_value <= 1.0)) throw OutOfRange("iso_bound expects mass in [0,1]");
    if (mass_value == 0.0 || mass_value == 1.0) return 0.0;
    const double q = std_normal_quantile(mass_value);
    return std::exp(-0.5 * q * q) * a.d_min();
}

IsoResult iso_check(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg) {
    IsoResult out;
    const MeasureResult m = mass(a, e, cfg);
    out.mass = std::clamp(m.value, 0.0, 1.0);
    out.perimeter = perimeter(a, e, cfg);
    out.bound = iso_bound(a, out.mass);
    out.deficit = out.perimeter.value - out.bound;
    return out;
}

HalfSpaceSet extremal_halfspace(const SpdMatrix& a, double mass_value) {
    if (!(mass_value > 0.0 && mass_value < 1.0)) throw OutOfRange("extremal_halfspace expects mass in (0,1)");
    const Direction omega(a.eigenvector(0));
    const double t = std_normal_quantile(mass_value) / a.d_min();
    return HalfSpaceSet(omega, t);
}

}  // namespace aniso
