#include "aniso/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aniso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSupportClamp = 1e3;

double constraint_scale(const std::vector<Constraint>& cons) {
    double s = 1.0;
    for (const Constraint& c : cons)
        if (std::isfinite(c.t)) s = std::max(s, std::fabs(c.t));
    return s;
}

}  // namespace

PolytopeSet::PolytopeSet(std::vector<Constraint> constraints, Vector witness, int max_constraints)
    : witness_(std::move(witness)) {
    dim_ = static_cast<int>(witness_.size());
    for (const Constraint& c : constraints)
        if (c.omega.dim() != dim_) throw DimensionMismatch("polytope constraint dimension mismatch");
    if (static_cast<int>(constraints.size()) > max_constraints)
        throw OutOfRange("polytope exceeds the constraint cap");

    // Merge near-identical normals, keeping the tighter threshold.
    for (Constraint& c : constraints) {
        bool dup = false;
        for (Constraint& kept : constraints_) {
            if (dot(kept.omega.components(), c.omega.components()) > 1.0 - 1e-12) {
                kept.t = std::min(kept.t, c.t);
                dup = true;
                break;
            }
        }
        if (!dup) constraints_.push_back(c);
    }

    const double scale = constraint_scale(constraints_);
    for (const Constraint& c : constraints_) {
        if (c.t == kInf) continue;  // never-binding marker constraint
        if (!(dot(c.omega.components(), witness_) < c.t - 1e-14 * scale))
            throw EmptyInterior("witness point is not strictly interior");
    }
}

PolytopeSet PolytopeSet::from_constraints(std::vector<Constraint> constraints, int max_constraints) {
    if (constraints.empty()) throw EmptyInterior("from_constraints needs at least one constraint");
    const int n = constraints[0].omega.dim();
    const double scale = constraint_scale(constraints);

    std::vector<Vector> candidates;
    candidates.emplace_back(n, 0.0);
    Vector centroid(n, 0.0);
    for (const Constraint& c : constraints) {
        Vector p = (c.t - 1.0) * c.omega.components();
        centroid = centroid + p;
        candidates.push_back(std::move(p));
    }
    candidates.push_back((1.0 / static_cast<double>(constraints.size())) * centroid);

    // Relaxation sweeps toward the shifted system <omega, x> <= t - margin,
    // with the margin halved until some start converges.
    for (int k = 0; k <= 45; ++k) {
        const double margin = scale * std::ldexp(1.0, -k);
        for (const Vector& start : candidates) {
            Vector x = start;
            bool feasible = false;
            for (int iter = 0; iter < 20000; ++iter) {
                double worst = 0.0;
                int worst_i = -1;
                for (size_t i = 0; i < constraints.size(); ++i) {
                    const double viol = dot(constraints[i].omega.components(), x) - (constraints[i].t - margin);
                    if (viol > worst) {
                        worst = viol;
                        worst_i = static_cast<int>(i);
                    }
                }
                if (worst_i < 0) {
                    feasible = true;
                    break;
                }
                x = x - (1.2 * worst) * constraints[static_cast<size_t>(worst_i)].omega.components();
            }
            if (feasible) return PolytopeSet(std::move(constraints), std::move(x), max_constraints);
        }
    }
    throw EmptyInterior("could not locate an interior point");
}

BoxSet::BoxSet(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) throw DimensionMismatch("box corner length mismatch");
    for (size_t k = 0; k < lo_.size(); ++k)
        if (!(lo_[k] < hi_[k])) throw OutOfRange("box needs lo < hi on every axis");
}

PolytopeSet BoxSet::to_polytope() const {
    const int n = dim();
    std::vector<Constraint> cons;
    for (int k = 0; k < n; ++k) {
        Vector e(n, 0.0);
        if (std::isfinite(hi_[k])) {
            e[k] = 1.0;
            cons.push_back({Direction(e), hi_[k]});
            e[k] = 0.0;
        }
        if (std::isfinite(lo_[k])) {
            e[k] = -1.0;
            cons.push_back({Direction(e), -lo_[k]});
            e[k] = 0.0;
        }
    }
    if (cons.empty()) {
        // whole space: a single never-binding constraint keeps the type honest
        Vector e(n, 0.0);
        e[0] = 1.0;
        cons.push_back({Direction(e), kInf});
        return PolytopeSet(std::move(cons), Vector(n, 0.0), 2 * n + 1);
    }
    return PolytopeSet(std::move(cons), interior_point(), 2 * n);
}

Vector BoxSet::interior_point() const {
    Vector p(lo_.size());
    for (size_t k = 0; k < lo_.size(); ++k) {
        const bool lo_fin = std::isfinite(lo_[k]), hi_fin = std::isfinite(hi_[k]);
        if (lo_fin && hi_fin)
            p[k] = 0.5 * (lo_[k] + hi_[k]);
        else if (lo_fin)
            p[k] = lo_[k] + 1.0;
        else if (hi_fin)
            p[k] = hi_[k] - 1.0;
        else
            p[k] = 0.0;
    }
    return p;
}

SubgraphRegion::SubgraphRegion(Rotation rotation, Vector base_lo, Vector base_hi, std::vector<int> nodes,
                               std::vector<double> heights, std::vector<bool> side_is_true_boundary)
    : rot_(std::move(rotation)),
      base_lo_(std::move(base_lo)),
      base_hi_(std::move(base_hi)),
      nodes_(std::move(nodes)),
      heights_(std::move(heights)),
      side_boundary_(std::move(side_is_true_boundary)) {
    const int bd = rot_.dim() - 1;
    if (static_cast<int>(base_lo_.size()) != bd || static_cast<int>(base_hi_.size()) != bd ||
        static_cast<int>(nodes_.size()) != bd || static_cast<int>(side_boundary_.size()) != 2 * bd)
        throw DimensionMismatch("subgraph grid shape mismatch");
    size_t expect = 1;
    for (int k : nodes_) {
        if (k < 2) throw GridTooCoarse("subgraph grid needs at least 2 nodes per axis");
        expect *= static_cast<size_t>(k);
    }
    if (heights_.size() != expect) throw DimensionMismatch("subgraph height count mismatch");
    for (int ax = 0; ax < bd; ++ax)
        if (!(base_lo_[ax] < base_hi_[ax])) throw OutOfRange("subgraph base box needs lo < hi");
}

double SubgraphRegion::node_coord(int axis, int k) const {
    return base_lo_[axis] + (base_hi_[axis] - base_lo_[axis]) * (static_cast<double>(k) / (nodes_[axis] - 1));
}

double SubgraphRegion::spacing(int axis) const {
    return (base_hi_[axis] - base_lo_[axis]) / (nodes_[axis] - 1);
}

double SubgraphRegion::height_at_node(const std::vector<int>& idx) const {
    size_t flat = 0;
    for (size_t ax = 0; ax < idx.size(); ++ax) flat = flat * static_cast<size_t>(nodes_[ax]) + idx[ax];
    return heights_[flat];
}

bool SubgraphRegion::in_base_box(const Vector& z) const {
    for (int ax = 0; ax < base_dim(); ++ax) {
        const double eps = 1e-9 * (base_hi_[ax] - base_lo_[ax]);
        if (z[ax] < base_lo_[ax] - eps || z[ax] > base_hi_[ax] + eps) return false;
    }
    return true;
}

double SubgraphRegion::height(const Vector& z) const {
    const int bd = base_dim();
    std::vector<int> cell(bd);
    std::vector<double> frac(bd);
    for (int ax = 0; ax < bd; ++ax) {
        const double s = (z[ax] - base_lo_[ax]) / spacing(ax);
        int c = static_cast<int>(std::floor(s));
        c = std::clamp(c, 0, nodes_[ax] - 2);
        cell[ax] = c;
        frac[ax] = std::clamp(s - c, 0.0, 1.0);
    }
    const int corners = 1 << bd;
    bool any_neg_inf = false, any_pos_inf = false;
    double acc = 0.0;
    std::vector<int> idx(bd);
    for (int mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        for (int ax = 0; ax < bd; ++ax) {
            const int bit = (mask >> ax) & 1;
            idx[ax] = cell[ax] + bit;
            w *= bit ? frac[ax] : 1.0 - frac[ax];
        }
        const double h = height_at_node(idx);
        if (h == -kInf)
            any_neg_inf = true;
        else if (h == kInf)
            any_pos_inf = true;
        else
            acc += w * h;
    }
    if (any_neg_inf) return -kInf;
    if (any_pos_inf) return kInf;
    return acc;
}

int SetRegion::dim() const {
    if (const auto* h = as_halfspace()) return h->dim();
    if (const auto* p = as_polytope()) return p->dim();
    if (const auto* b = as_box()) return b->dim();
    return as_subgraph()->dim();
}

bool contains(const SetRegion& e, const Vector& x) {
    if (static_cast<int>(x.size()) != e.dim()) throw DimensionMismatch("membership dimension mismatch");
    if (const auto* h = e.as_halfspace()) return dot(x, h->omega().components()) < h->t();
    if (const auto* p = e.as_polytope()) {
        for (const Constraint& c : p->constraints())
            if (!(dot(x, c.omega.components()) < c.t)) return false;
        return true;
    }
    if (const auto* b = e.as_box()) {
        for (int k = 0; k < b->dim(); ++k)
            if (!(x[k] > b->lo()[k] && x[k] < b->hi()[k])) return false;
        return true;
    }
    const SubgraphRegion* s = e.as_subgraph();
    const Vector xp = s->rotation().apply_inverse(x);
    Vector z(xp.begin(), xp.end() - 1);
    if (!s->in_base_box(z)) return false;
    return xp.back() < s->height(z);
}

namespace {

// Clip the running t-interval against <z + t u, omega> < c, i.e. t*d < r.
// Both inputs come from unit vectors; below 1e-12 the constraint is
// parallel to the line and the quotient r/d would be rounding noise.
bool clip_linear(double d, double r, double& lo, double& hi) {
    if (std::fabs(d) <= 1e-12) return r > 0.0;
    const double bound = r / d;
    if (d > 0.0)
        hi = std::min(hi, bound);
    else
        lo = std::max(lo, bound);
    return lo < hi;
}

IntervalUnion single_interval(double lo, double hi) {
    if (!(lo < hi)) return IntervalUnion::empty();
    return IntervalUnion({{lo, hi}});
}

IntervalUnion clip_constraints(const std::vector<Constraint>& cons, const Vector& z, const Direction& u) {
    double lo = -kInf, hi = kInf;
    for (const Constraint& c : cons) {
        const double d = dot(u.components(), c.omega.components());
        const double r = c.t - dot(z, c.omega.components());
        if (!clip_linear(d, r, lo, hi)) return IntervalUnion::empty();
    }
    return single_interval(lo, hi);
}

}  // namespace

IntervalUnion slice(const SetRegion& e, const Vector& z, const Direction& u) {
    if (static_cast<int>(z.size()) != e.dim() || u.dim() != e.dim())
        throw DimensionMismatch("slice dimension mismatch");
    if (const auto* h = e.as_halfspace()) {
        double lo = -kInf, hi = kInf;
        const double d = dot(u.components(), h->omega().components());
        const double r = h->t() - dot(z, h->omega().components());
        if (!clip_linear(d, r, lo, hi)) return IntervalUnion::empty();
        return single_interval(lo, hi);
    }
    if (const auto* p = e.as_polytope()) return clip_constraints(p->constraints(), z, u);
    if (const auto* b = e.as_box()) {
        double lo = -kInf, hi = kInf;
        for (int k = 0; k < b->dim(); ++k) {
            const double uk = u[k];
            if (std::isfinite(b->hi()[k]) && !clip_linear(uk, b->hi()[k] - z[k], lo, hi))
                return IntervalUnion::empty();
            if (std::isfinite(b->lo()[k]) && !clip_linear(-uk, z[k] - b->lo()[k], lo, hi))
                return IntervalUnion::empty();
        }
        return single_interval(lo, hi);
    }

    const SubgraphRegion* s = e.as_subgraph();
    const Vector axis = s->axis_world();
    const double align = dot(u.components(), axis);
    if (std::fabs(std::fabs(align) - 1.0) > 1e-10)
        throw UnsupportedSliceDirection("subgraph sliced off its own axis");
    const Vector zp_full = s->rotation().apply_inverse(z);
    Vector zb(zp_full.begin(), zp_full.end() - 1);
    if (!s->in_base_box(zb)) return IntervalUnion::empty();
    const double h = s->height(zb);
    const double y0 = zp_full.back();  // y-offset of the base point along the axis
    if (h == -kInf) return IntervalUnion::empty();
    if (align > 0.0) {
        // x = z + t u has rotated height y0 + t
        if (h == kInf) return IntervalUnion::full_line();
        return single_interval(-kInf, h - y0);
    }
    if (h == kInf) return IntervalUnion::full_line();
    return single_interval(y0 - h, kInf);
}

SetRegion transform(const SetRegion& e, const Matrix& m) {
    if (m.rows() != e.dim() || m.cols() != e.dim()) throw DimensionMismatch("transform dimension mismatch");
    const Matrix mt_inv = inverse(m.transpose());

    auto map_constraint = [&](const Direction& omega, double t) -> Constraint {
        Vector w = mt_inv * omega.components();
        const double len = norm(w);
        if (!(len > 1e-300)) throw SingularMatrix("transform maps a normal to zero");
        return {Direction(std::move(w)), t / len};
    };

    if (const auto* h = e.as_halfspace()) {
        Constraint c = map_constraint(h->omega(), h->t());
        return SetRegion(HalfSpaceSet(c.omega, c.t));
    }
    const PolytopeSet* p = e.as_polytope();
    PolytopeSet from_box = p ? *p : (e.as_box() ? e.as_box()->to_polytope() : throw UnsupportedVariant("transform supports half-spaces, polytopes, and boxes"));
    const PolytopeSet& src = p ? *p : from_box;

    std::vector<Constraint> cons;
    cons.reserve(src.constraints().size());
    for (const Constraint& c : src.constraints()) {
        if (std::isinf(c.t)) {
            cons.push_back(c);
            continue;
        }
        cons.push_back(map_constraint(c.omega, c.t));
    }
    return SetRegion(PolytopeSet(std::move(cons), m * src.witness(), 1 << 20));
}

namespace {

double polytope_support(const PolytopeSet& p, const Vector& d) {
    const int n = p.dim();
    if (n > 3) throw UnsupportedDimension("polytope support implemented for n <= 3");

    std::vector<Constraint> cons = p.constraints();
    for (int k = 0; k < n; ++k) {
        Vector e(n, 0.0);
        e[k] = 1.0;
        cons.push_back({Direction(e), kSupportClamp});
        e[k] = -1.0;
        cons.push_back({Direction(e), kSupportClamp});
    }
    const int m = static_cast<int>(cons.size());
    const double feas_tol = 1e-9 * constraint_scale(cons);

    double best = -kInf;
    std::vector<int> pick(n);
    auto try_vertex = [&](const std::vector<int>& sel) {
        Matrix sys(n, n);
        Vector rhs(n);
        for (int r = 0; r < n; ++r) {
            for (int c2 = 0; c2 < n; ++c2) sys(r, c2) = cons[sel[r]].omega[c2];
            rhs[r] = cons[sel[r]].t;
        }
        Vector v;
        try {
            v = solve(sys, rhs);
        } catch (const SingularMatrix&) {
            return;
        }
        for (const Constraint& c : cons)
            if (dot(c.omega.components(), v) > c.t + feas_tol) return;
        best = std::max(best, dot(d, v));
    };

    // all n-subsets of constraints
    std::vector<int> sel(n);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            try_vertex(sel);
            return;
        }
        for (int i = start; i < m; ++i) {
            sel[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);

    if (best == -kInf) throw EmptyInterior("support of an empty polytope");
    if (best >= 0.999 * kSupportClamp * norm(d)) return kInf;
    return best;
}

}  // namespace

double support(const SetRegion& e, const Vector& d) {
    if (static_cast<int>(d.size()) != e.dim()) throw DimensionMismatch("support dimension mismatch");
    if (const auto* h = e.as_halfspace()) {
        const double lambda = dot(d, h->omega().components());
        Vector perp = d - lambda * h->omega().components();
        if (norm(perp) > 1e-12 * (1.0 + norm(d)) || lambda < -1e-12 * norm(d)) return kInf;
        return lambda * h->t();
    }
    if (const auto* b = e.as_box()) {
        double s = 0.0;
        for (int k = 0; k < b->dim(); ++k) {
            if (d[k] > 0.0)
                s += d[k] * b->hi()[k];
            else if (d[k] < 0.0)
                s += d[k] * b->lo()[k];
        }
        return s;
    }
    if (const auto* p = e.as_polytope()) return polytope_support(*p, d);
    throw UnsupportedVariant("support not defined for subgraph regions");
}

std::pair<double, double> symmetric_difference_mass_pair(const SetRegion& e, const SetRegion& f,
                                                         const SpdMatrix& a, const QuadratureConfig& cfg) {
    cfg.validate();
    const int n = e.dim();
    if (f.dim() != n || a.dim() != n) throw DimensionMismatch("symmetric difference dimension mismatch");
    if (n < 2 || n > 3) throw UnsupportedDimension("symmetric difference supports n = 2 or 3");
    if (e.as_subgraph() || f.as_subgraph())
        throw UnsupportedVariant("symmetric difference expects halfspace/polytope/box inputs");

    Vector en(n, 0.0);
    en[n - 1] = 1.0;
    const Direction axis(en);
    const double radius = truncation_radius(a.sqrt_inv_norm(), n, cfg.tail_tol);

    auto eval = [&](const Vector& z_base, double* out) {
        Vector z(n, 0.0);
        for (int k = 0; k < n - 1; ++k) z[k] = z_base[k];
        const LineGaussian line = line_gaussian(a, z, axis);
        const IntervalUnion se = slice(e, z, axis);
        const IntervalUnion sf = slice(f, z, axis);
        out[0] = line_mass(line, se.symmetric_difference(sf));
        const double he = line_quantile(line, std::min(line_mass(line, se), line.total_mass()));
        const double hf = line_quantile(line, std::min(line_mass(line, sf), line.total_mass()));
        const double lo = std::min(he, hf), hi = std::max(he, hf);
        out[1] = lo < hi ? line_mass(line, IntervalUnion({{lo, hi}})) : 0.0;
    };

    VecIntegral total;
    if (n == 2) {
        total = integrate_adaptive(
            [&](double z0, double* out) {
                Vector zb{z0};
                eval(zb, out);
            },
            2, -radius, radius, {}, cfg.rel_tol, cfg.base_rule, cfg.panels_per_axis);
    } else {
        total = integrate_adaptive(
            [&](double z0, double* out) {
                VecIntegral inner = integrate_adaptive(
                    [&](double z1, double* in) {
                        Vector zb{z0, z1};
                        eval(zb, in);
                    },
                    2, -radius, radius, {}, cfg.rel_tol, cfg.base_rule, cfg.panels_per_axis);
                out[0] = inner.value[0];
                out[1] = inner.value[1];
            },
            2, -radius, radius, {}, cfg.rel_tol, cfg.base_rule, cfg.panels_per_axis);
    }

    const double prefactor = a.sqrt_det() / std::pow(2.0 * M_PI, 0.5 * n);
    return {prefactor * total.value[0], prefactor * total.value[1]};
}

}  // namespace aniso
