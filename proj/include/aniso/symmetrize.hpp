#pragma once

#include <vector>

#include "aniso/measures.hpp"
#include "aniso/sets.hpp"

namespace aniso {

/// Base grid request for symmetrization: node count per base axis (odd
/// counts put a node at the grid center) and an optional hard extent cap.
struct GridSpec {
    int nodes_per_axis = 257;
};

/// Everything one symmetrization run asserts about one (E, A, u) triple.
struct SymmetrizationReport {
    double mass_before = 0.0;
    double mass_after = 0.0;
    double mass_error = 0.0;  // combined error estimate of the two masses
    MeasureResult perimeter_before;
    MeasureResult perimeter_after;
    Vector barycenter_before;
    Vector barycenter_after;
    /// sqrt(2 pi) ||Au - <Au,u>u|| <b(E^s) - b(E), u>
    double error_term = 0.0;
    /// perimeter_before + error_term - perimeter_after
    double thm12_slack = 0.0;
    int slice_samples = 0;
    int slice_decrease_violations = 0;
    Vector direction_gradient;  // grad' h(0) in the rotated frame
    bool direction_is_eigen = false;
};

/// Ehrhard symmetrization of E along u: rotate so u becomes -e_n, replace
/// every slice by the lower half-line of equal weighted mass, and return
/// the resulting height-field region (carrying the rotation).
SubgraphRegion ehrhard_symmetrize(const SpdMatrix& a, const SetRegion& e, const Direction& u,
                                  const GridSpec& grid, const QuadratureConfig& cfg);

/// grad' h(0) of the symmetrized thin wedge over direction u: in the
/// rotated frame A'' = O^T A O this is -(2 / A''_nn) times the first n-1
/// entries of column n of A''; zero exactly when u is an eigenvector of A.
Vector direction_gradient(const SpdMatrix& a, const Direction& u);

SymmetrizationReport symmetrization_report(const SpdMatrix& a, const SetRegion& e, const Direction& u,
                                           const QuadratureConfig& cfg, const GridSpec& grid);

/// One row of the thin-box scan at a single alpha.
struct CounterexampleRow {
    double alpha = 0.0;
    double perimeter_e = 0.0;
    double perimeter_es = 0.0;
    double error_term = 0.0;
    double slope1 = 0.0;  // (P(E_a) - P(E^s_a)) / a
    double slope2 = 0.0;  // (error_term + P(E_a) - P(E^s_a)) / a
};

struct CounterexampleScan {
    std::vector<CounterexampleRow> rows;
    double slope1_extrapolated = 0.0;
    double slope2_extrapolated = 0.0;
    double error_term_slope_extrapolated = 0.0;
    double slope1_analytic = 0.0;  // 2 (sqrt(det A)/sqrt(2 pi)) (1 - sqrt(1 + 4 b^2/c^2))
    double slope2_analytic = 0.0;  // 2 (sqrt(det A)/sqrt(2 pi)) ((1 + 2|b|/c) - sqrt(1 + 4 b^2/c^2))
    double error_term_slope_analytic = 0.0;  // 2 (sqrt(det A)/sqrt(2 pi)) (2|b|/c)
    bool strict_increase_everywhere = false;  // P(E_a) < P(E^s_a) for every row
    double h0 = 0.0;                          // grid height at the origin, smallest alpha
    double h_prime_0 = 0.0;                   // central difference at the origin, smallest alpha
};

/// Runs the thin-box family E_alpha = [-alpha,alpha] x (0,inf) against
/// A = 2 [[a,b],[b,c]] and extrapolates the difference quotients.
CounterexampleScan counterexample_scan(double a, double b, double c, const std::vector<double>& alphas,
                                       const QuadratureConfig& cfg, int grid_nodes = 1025);

/// Both sides of the slicewise cross-term identity at base point z:
/// lhs = |integral over E_z of grad'(w) - integral over E^s_z of grad'(w)|,
/// rhs = (first-moment drop) * ||A e_n - <A e_n, e_n> e_n||.
struct CrossTermCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double first_moment_drop = 0.0;
};
CrossTermCheck cross_term_identity_check(const SpdMatrix& a, const SetRegion& e, const Vector& z,
                                         const QuadratureConfig& cfg);

}  // namespace aniso
