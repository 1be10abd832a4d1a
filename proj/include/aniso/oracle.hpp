#pragma once

#include <cstdint>
#include <vector>

#include "aniso/linalg.hpp"
#include "aniso/sets.hpp"

namespace aniso {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// gamma_A(E) by sampling x = (sqrt A)^{-1} g, g standard normal, from a
/// seeded counter-based generator. Bit-identical for a fixed seed.
McEstimate mc_mass(const SpdMatrix& a, const SetRegion& e, std::int64_t n, std::uint64_t seed);

/// Componentwise E[x 1_E(x)] by the same sampler.
std::vector<McEstimate> mc_barycenter(const SpdMatrix& a, const SetRegion& e, std::int64_t n,
                                      std::uint64_t seed);

/// First-order boundary-length oracle: rasterize membership on a
/// resolution^2 lattice over the truncation window, march the boundary,
/// and sum weighted segment lengths. Independent of the quadrature path.
double grid_perimeter_2d(const SpdMatrix& a, const SetRegion& e, int resolution);

}  // namespace aniso
