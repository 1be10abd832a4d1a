#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "aniso/gaussline.hpp"
#include "aniso/linalg.hpp"
#include "aniso/quadrature.hpp"

namespace aniso {

/// One half-space constraint <x, omega> < t.
struct Constraint {
    Direction omega;
    double t;
};

/// H(omega, t) = {x : <x, omega> < t}.
class HalfSpaceSet {
  public:
    HalfSpaceSet(Direction omega, double t) : omega_(std::move(omega)), t_(t) {}
    const Direction& omega() const { return omega_; }
    double t() const { return t_; }
    int dim() const { return omega_.dim(); }

  private:
    Direction omega_;
    double t_;
};

/// Intersection of half-spaces, possibly unbounded. Construction keeps a
/// strictly interior witness point; near-duplicate constraints are merged.
class PolytopeSet {
  public:
    /// Constraints plus a known interior point (validated strictly).
    PolytopeSet(std::vector<Constraint> constraints, Vector witness, int max_constraints = 64);
    /// Searches for an interior point; throws EmptyInterior on failure.
    static PolytopeSet from_constraints(std::vector<Constraint> constraints, int max_constraints = 64);

    const std::vector<Constraint>& constraints() const { return constraints_; }
    const Vector& witness() const { return witness_; }
    int dim() const { return dim_; }

  private:
    std::vector<Constraint> constraints_;
    Vector witness_;
    int dim_;
};

/// Axis-aligned box with extended-real corners, lo_k < hi_k.
class BoxSet {
  public:
    BoxSet(Vector lo, Vector hi);
    const Vector& lo() const { return lo_; }
    const Vector& hi() const { return hi_; }
    int dim() const { return static_cast<int>(lo_.size()); }

    PolytopeSet to_polytope() const;
    Vector interior_point() const;

  private:
    Vector lo_, hi_;
};

/// Lower subgraph in a rotated frame: the set {O (z, y) : z in the base
/// box, y < h(z)} with h stored on a regular grid and evaluated by
/// multilinear interpolation. Heights may be -inf (empty column) or +inf
/// (full column); a cell with a -inf corner counts as empty, one with a
/// +inf corner (and no -inf) as full.
class SubgraphRegion {
  public:
    SubgraphRegion(Rotation rotation, Vector base_lo, Vector base_hi, std::vector<int> nodes,
                   std::vector<double> heights, std::vector<bool> side_is_true_boundary);

    const Rotation& rotation() const { return rot_; }
    int dim() const { return rot_.dim(); }
    int base_dim() const { return dim() - 1; }
    const Vector& base_lo() const { return base_lo_; }
    const Vector& base_hi() const { return base_hi_; }
    const std::vector<int>& nodes() const { return nodes_; }
    const std::vector<double>& heights() const { return heights_; }
    /// Whether the grid face {axis, side} (side 0 = lo, 1 = hi) is a true
    /// face of the set, as opposed to a tail truncation.
    bool side_is_true_boundary(int axis, int side) const { return side_boundary_[2 * axis + side]; }

    double node_coord(int axis, int k) const;
    double spacing(int axis) const;
    double height_at_node(const std::vector<int>& idx) const;
    /// Interpolated height at base point z (rotated-frame coordinates).
    double height(const Vector& z) const;
    /// World direction of the subgraph's own line axis, O e_n.
    Vector axis_world() const { return rot_.column(dim() - 1); }

    bool in_base_box(const Vector& z) const;

  private:
    Rotation rot_;
    Vector base_lo_, base_hi_;
    std::vector<int> nodes_;
    std::vector<double> heights_;
    std::vector<bool> side_boundary_;
};

/// Tagged union of the supported set families.
class SetRegion {
  public:
    SetRegion(HalfSpaceSet h) : v_(std::move(h)) {}
    SetRegion(PolytopeSet p) : v_(std::move(p)) {}
    SetRegion(BoxSet b) : v_(std::move(b)) {}
    SetRegion(SubgraphRegion s) : v_(std::move(s)) {}

    int dim() const;
    const HalfSpaceSet* as_halfspace() const { return std::get_if<HalfSpaceSet>(&v_); }
    const PolytopeSet* as_polytope() const { return std::get_if<PolytopeSet>(&v_); }
    const BoxSet* as_box() const { return std::get_if<BoxSet>(&v_); }
    const SubgraphRegion* as_subgraph() const { return std::get_if<SubgraphRegion>(&v_); }

  private:
    std::variant<HalfSpaceSet, PolytopeSet, BoxSet, SubgraphRegion> v_;
};

/// Membership test (boundaries resolved by strict inequalities).
bool contains(const SetRegion& e, const Vector& x);

/// The exact parameter set {t : z + t u in E}, canonical.
IntervalUnion slice(const SetRegion& e, const Vector& z, const Direction& u);

/// Image M(E) for an invertible M. Half-spaces map by the normal-vector
/// transport rule, polytopes constraint-wise, boxes become polytopes.
SetRegion transform(const SetRegion& e, const Matrix& m);

/// sup over E of <d, x>; +inf when unbounded in that direction. Polytope
/// support is evaluated inside a +-1e3 clamp box, beyond which the
/// direction is reported unbounded.
double support(const SetRegion& e, const Vector& d);

/// (gamma_A(E delta F), gamma_A(E^s delta F^s)) by slicewise reduction
/// along e_n; symmetrized slices are half-lines so the second component
/// integrates a single interval per base point.
std::pair<double, double> symmetric_difference_mass_pair(const SetRegion& e, const SetRegion& f,
                                                         const SpdMatrix& a, const QuadratureConfig& cfg);

}  // namespace aniso
