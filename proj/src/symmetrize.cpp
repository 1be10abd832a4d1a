#include "aniso/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "aniso/parallel.hpp"

namespace aniso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kDustMass = 1e-300;
}  // namespace

namespace {

struct AxisExtent {
    double lo, hi;
    bool lo_true, hi_true;  // genuine set boundary vs. tail truncation
};

AxisExtent axis_extent(const SetRegion& e, const Vector& dir, double radius) {
    double hi = support(e, dir);
    double lo = -support(e, -1.0 * dir);
    AxisExtent out{lo, hi, std::isfinite(lo), std::isfinite(hi)};
    if (!(out.lo > -radius)) {
        out.lo = -radius;
        out.lo_true = false;
    }
    if (!(out.hi < radius)) {
        out.hi = radius;
        out.hi_true = false;
    }
    if (!(out.lo < out.hi)) {
        out.lo -= 1e-6;
        out.hi += 1e-6;
    }
    return out;
}

}  // namespace

SubgraphRegion ehrhard_symmetrize(const SpdMatrix& a, const SetRegion& e, const Direction& u,
                                  const GridSpec& grid, const QuadratureConfig& cfg) {
    cfg.validate();
    const int n = e.dim();
    if (a.dim() != n || u.dim() != n) throw DimensionMismatch("ehrhard_symmetrize: dimension mismatch");
    if (n < 2) throw UnsupportedDimension("ehrhard_symmetrize needs n >= 2");
    if (grid.nodes_per_axis < 17) throw GridTooCoarse("grid spacing exceeds base diameter / 16");

    const Rotation o = rotation_to_minus_en(u);
    const Direction line_axis(o.column(n - 1));  // slices parameterized by the rotated height
    const double radius = truncation_radius(a.sqrt_inv_norm(), n, cfg.tail_tol);

    const int bd = n - 1;
    Vector base_lo(bd), base_hi(bd);
    std::vector<bool> side_true(2 * bd, false);

    if (const SubgraphRegion* s = e.as_subgraph()) {
        const double align = dot(u.components(), s->axis_world());
        if (std::fabs(std::fabs(align) - 1.0) > 1e-10)
            throw UnsupportedSliceDirection("re-symmetrizing a subgraph off its own axis");
        // same deterministic rotation => same base frame; keep extents
        bool same_frame = true;
        for (int i = 0; i < n && same_frame; ++i)
            for (int j = 0; j < n && same_frame; ++j)
                if (std::fabs(o.entries()(i, j) - s->rotation().entries()(i, j)) > 1e-12) same_frame = false;
        if (same_frame) {
            for (int ax = 0; ax < bd; ++ax) {
                base_lo[ax] = s->base_lo()[ax];
                base_hi[ax] = s->base_hi()[ax];
                side_true[2 * ax] = s->side_is_true_boundary(ax, 0);
                side_true[2 * ax + 1] = s->side_is_true_boundary(ax, 1);
            }
        } else {
            // project the old base box corners onto the new base axes
            for (int ax = 0; ax < bd; ++ax) {
                double lo = kInf, hi = -kInf;
                for (int mask = 0; mask < (1 << bd); ++mask) {
                    Vector zp(n, 0.0);
                    for (int k = 0; k < bd; ++k)
                        zp[k] = ((mask >> k) & 1) ? s->base_hi()[k] : s->base_lo()[k];
                    const Vector world = s->rotation().apply(zp);
                    const double coord = dot(world, o.column(ax));
                    lo = std::min(lo, coord);
                    hi = std::max(hi, coord);
                }
                base_lo[ax] = lo;
                base_hi[ax] = hi;
            }
        }
    } else {
        for (int ax = 0; ax < bd; ++ax) {
            const AxisExtent ext = axis_extent(e, o.column(ax), radius);
            base_lo[ax] = ext.lo;
            base_hi[ax] = ext.hi;
            side_true[2 * ax] = ext.lo_true;
            side_true[2 * ax + 1] = ext.hi_true;
        }
    }

    std::vector<int> nodes(bd, grid.nodes_per_axis);
    size_t total_nodes = 1;
    for (int k : nodes) total_nodes *= static_cast<size_t>(k);
    std::vector<double> heights(total_nodes, -kInf);

    const SpdMatrix arot = conjugate(a, o);
    auto node_coord = [&](int ax, int k) {
        return base_lo[ax] + (base_hi[ax] - base_lo[ax]) * (static_cast<double>(k) / (nodes[ax] - 1));
    };

    const int rows = bd == 1 ? 1 : nodes[0];
    const int cols = bd == 1 ? nodes[0] : nodes[1];
    parallel_for(rows, [&](int r) {
        Vector zb(bd);
        for (int c = 0; c < cols; ++c) {
            if (bd == 1) {
                zb[0] = node_coord(0, c);
            } else {
                zb[0] = node_coord(0, r);
                zb[1] = node_coord(1, c);
            }
            Vector z_world(n, 0.0);
            for (int ax = 0; ax < bd; ++ax) z_world = z_world + zb[ax] * o.column(ax);
            IntervalUnion sl = slice(e, z_world, line_axis);
            if (sl.is_empty()) {
                // an exact-edge slice of a closed face is empty under strict
                // inequalities; walls carry the interior limit instead
                bool on_edge = false;
                Vector zb_in = zb;
                for (int ax = 0; ax < bd; ++ax) {
                    const int node = bd == 1 ? c : (ax == 0 ? r : c);
                    const double width = base_hi[ax] - base_lo[ax];
                    if (node == 0 && side_true[2 * ax]) {
                        zb_in[ax] = base_lo[ax] + 1e-9 * width;
                        on_edge = true;
                    } else if (node == nodes[ax] - 1 && side_true[2 * ax + 1]) {
                        zb_in[ax] = base_hi[ax] - 1e-9 * width;
                        on_edge = true;
                    }
                }
                if (on_edge) {
                    Vector zw_in(n, 0.0);
                    for (int ax = 0; ax < bd; ++ax) zw_in = zw_in + zb_in[ax] * o.column(ax);
                    sl = slice(e, zw_in, line_axis);
                }
            }

            double alpha = arot.entries()(n - 1, n - 1), beta = 0.0, gamma = 0.0;
            for (int j = 0; j < bd; ++j) {
                beta += arot.entries()(n - 1, j) * zb[j];
                for (int i = 0; i < bd; ++i) gamma += arot.entries()(i, j) * zb[i] * zb[j];
            }
            const LineGaussian line(alpha, beta, gamma);
            const double m = line_mass(line, sl);

            double h;
            if (m < kDustMass)
                h = -kInf;
            else if (m > line.total_mass() * (1.0 - 1e-12))
                h = kInf;
            else
                h = line_quantile(line, m);
            heights[static_cast<size_t>(r) * cols + c] = h;
        }
    });

    return SubgraphRegion(o, std::move(base_lo), std::move(base_hi), std::move(nodes), std::move(heights),
                          std::move(side_true));
}

Vector direction_gradient(const SpdMatrix& a, const Direction& u) {
    const int n = a.dim();
    if (u.dim() != n) throw DimensionMismatch("direction_gradient: dimension mismatch");
    const SpdMatrix arot = conjugate(a, rotation_to_minus_en(u));
    Vector g(n - 1);
    const double ann = arot.entries()(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i) g[i] = -2.0 * arot.entries()(i, n - 1) / ann;
    return g;
}

SymmetrizationReport symmetrization_report(const SpdMatrix& a, const SetRegion& e, const Direction& u,
                                           const QuadratureConfig& cfg, const GridSpec& grid) {
    const int n = e.dim();
    if (n < 2 || n > 3) throw UnsupportedDimension("symmetrization_report supports n = 2 or 3");

    SymmetrizationReport rep;
    const MeasureResult m_before = mass(a, e, cfg);
    const SubgraphRegion sym = ehrhard_symmetrize(a, e, u, grid, cfg);
    const SetRegion es(sym);
    const MeasureResult m_after = mass(a, es, cfg);
    rep.mass_before = m_before.value;
    rep.mass_after = m_after.value;
    rep.mass_error = m_before.error_estimate + m_after.error_estimate;
    rep.perimeter_before = perimeter(a, e, cfg);
    rep.perimeter_after = perimeter(a, es, cfg);
    rep.barycenter_before = barycenter(a, e, cfg);
    rep.barycenter_after = barycenter(a, es, cfg);

    const Vector au = a.apply(u.components());
    const Vector perp = au - dot(au, u.components()) * u.components();
    rep.error_term = kSqrt2Pi * norm(perp) * dot(rep.barycenter_after - rep.barycenter_before, u.components());
    rep.thm12_slack = rep.perimeter_before.value + rep.error_term - rep.perimeter_after.value;

    // slicewise perimeter comparison on the grid itself
    const Rotation& o = sym.rotation();
    const Direction line_axis(o.column(n - 1));
    const SpdMatrix arot = conjugate(a, o);
    const int bd = n - 1;
    std::vector<int> idx(bd, 0);
    const int stride = std::max<int>(1, bd == 1 ? sym.nodes()[0] / 256 : sym.nodes()[0] / 16);
    int samples = 0, violations = 0;
    bool more = true;
    while (more) {
        Vector zb(bd);
        for (int ax = 0; ax < bd; ++ax) {
            zb[ax] = sym.node_coord(ax, idx[ax]);
            // edge nodes carry interior limits; sample the slice there too
            const double width = sym.base_hi()[ax] - sym.base_lo()[ax];
            if (idx[ax] == 0 && sym.side_is_true_boundary(ax, 0))
                zb[ax] += 1e-9 * width;
            else if (idx[ax] == sym.nodes()[ax] - 1 && sym.side_is_true_boundary(ax, 1))
                zb[ax] -= 1e-9 * width;
        }
        Vector z_world(n, 0.0);
        for (int ax = 0; ax < bd; ++ax) z_world = z_world + zb[ax] * o.column(ax);

        double alpha = arot.entries()(n - 1, n - 1), beta = 0.0, gamma = 0.0;
        for (int j = 0; j < bd; ++j) {
            beta += arot.entries()(n - 1, j) * zb[j];
            for (int i = 0; i < bd; ++i) gamma += arot.entries()(i, j) * zb[i] * zb[j];
        }
        const LineGaussian line(alpha, beta, gamma);
        const double p_e = slice_perimeter(line, slice(e, z_world, line_axis));
        const double h = sym.height_at_node(idx);
        const double p_es = std::isfinite(h) ? line.weight(h) : 0.0;
        ++samples;
        if (p_es > p_e + 1e-10) ++violations;

        int ax = 0;
        while (ax < bd) {
            idx[ax] += stride;
            if (idx[ax] < sym.nodes()[ax]) break;
            idx[ax] = 0;
            ++ax;
        }
        if (ax == bd) more = false;
    }
    rep.slice_samples = samples;
    rep.slice_decrease_violations = violations;

    rep.direction_gradient = direction_gradient(a, u);
    rep.direction_is_eigen = eigenspace_membership(a, u, 1e-9).has_value();
    return rep;
}

namespace {

// two-stage Richardson assuming q(alpha) = s + c1 alpha + c2 alpha^2
double richardson_12(const std::vector<double>& alphas, const std::vector<double>& q) {
    const size_t m = alphas.size();
    std::vector<double> s1(m - 1), g1(m - 1);
    for (size_t i = 0; i + 1 < m; ++i) {
        s1[i] = (q[i + 1] * alphas[i] - q[i] * alphas[i + 1]) / (alphas[i] - alphas[i + 1]);
        g1[i] = alphas[i] * alphas[i + 1];
    }
    if (s1.size() == 1) return s1[0];
    std::vector<double> s2(s1.size() - 1);
    for (size_t i = 0; i + 1 < s1.size(); ++i)
        s2[i] = (s1[i + 1] * g1[i] - s1[i] * g1[i + 1]) / (g1[i] - g1[i + 1]);
    return s2.back();
}

}  // namespace

CounterexampleScan counterexample_scan(double a, double b, double c, const std::vector<double>& alphas,
                                       const QuadratureConfig& cfg, int grid_nodes) {
    Matrix raw(2, 2, {2 * a, 2 * b, 2 * b, 2 * c});
    const SpdMatrix mat = spd_from_entries(raw);  // throws NotPositiveDefinite when ac <= b^2
    if (alphas.size() < 3) throw OutOfRange("counterexample_scan needs at least 3 alphas");
    std::vector<double> sorted = alphas;
    for (double al : sorted)
        if (!(al > 0)) throw OutOfRange("alphas must be positive");
    std::sort(sorted.rbegin(), sorted.rend());

    const Direction u(Vector{0.0, -1.0});
    CounterexampleScan scan;
    std::vector<double> q1, q2, qe;
    std::optional<SubgraphRegion> last_sym;
    for (double alpha : sorted) {
        const SetRegion e(BoxSet({-alpha, 0.0}, {alpha, kInf}));
        const SubgraphRegion sym = ehrhard_symmetrize(mat, e, u, {grid_nodes}, cfg);
        const MeasureResult pe = perimeter(mat, e, cfg);
        const MeasureResult pes = perimeter(mat, SetRegion(sym), cfg);
        const Vector be = barycenter(mat, e, cfg);
        const Vector bes = barycenter(mat, SetRegion(sym), cfg);
        const Vector au = mat.apply(u.components());
        const Vector perp = au - dot(au, u.components()) * u.components();
        const double error_term = kSqrt2Pi * norm(perp) * dot(bes - be, u.components());

        CounterexampleRow row;
        row.alpha = alpha;
        row.perimeter_e = pe.value;
        row.perimeter_es = pes.value;
        row.error_term = error_term;
        row.slope1 = (pe.value - pes.value) / alpha;
        row.slope2 = (error_term + pe.value - pes.value) / alpha;
        scan.rows.push_back(row);
        q1.push_back(row.slope1);
        q2.push_back(row.slope2);
        qe.push_back(error_term / alpha);
        last_sym.emplace(sym);
    }

    scan.slope1_extrapolated = richardson_12(sorted, q1);
    scan.slope2_extrapolated = richardson_12(sorted, q2);
    scan.error_term_slope_extrapolated = richardson_12(sorted, qe);

    const double pref = 2.0 * mat.sqrt_det() / kSqrt2Pi;
    const double ratio = std::sqrt(1.0 + 4.0 * b * b / (c * c));
    scan.slope1_analytic = pref * (1.0 - ratio);
    scan.error_term_slope_analytic = pref * (2.0 * std::fabs(b) / c);
    scan.slope2_analytic = pref * ((1.0 + 2.0 * std::fabs(b) / c) - ratio);

    scan.strict_increase_everywhere = true;
    for (const CounterexampleRow& row : scan.rows)
        if (!(row.perimeter_e < row.perimeter_es)) scan.strict_increase_everywhere = false;

    const int center = (last_sym->nodes()[0] - 1) / 2;
    scan.h0 = last_sym->heights()[center];
    scan.h_prime_0 =
        (last_sym->heights()[center + 1] - last_sym->heights()[center - 1]) / (2.0 * last_sym->spacing(0));
    return scan;
}

CrossTermCheck cross_term_identity_check(const SpdMatrix& a, const SetRegion& e, const Vector& z,
                                         const QuadratureConfig& cfg) {
    (void)cfg;
    const int n = e.dim();
    if (n < 2 || n > 3) throw UnsupportedDimension("cross_term_identity_check supports n = 2 or 3");
    if (static_cast<int>(z.size()) != n - 1) throw DimensionMismatch("z must be a base point in R^{n-1}");

    Vector en(n, 0.0);
    en[n - 1] = 1.0;
    const Direction axis(en);
    Vector zfull(n, 0.0);
    for (int k = 0; k < n - 1; ++k) zfull[k] = z[k];

    const LineGaussian line = line_gaussian(a, zfull, axis);
    const IntervalUnion se = slice(e, zfull, axis);
    const double m = line_mass(line, se);
    IntervalUnion ses;
    if (m >= kDustMass) {
        const double h = line_quantile(line, std::min(m, line.total_mass()));
        ses = std::isinf(h) ? IntervalUnion::full_line() : IntervalUnion({{-kInf, h}});
    }

    const double mass_e = m;
    const double mass_es = line_mass(line, ses);
    const double mom_e = line_first_moment(line, se);
    const double mom_es = line_first_moment(line, ses);

    Vector diff(n - 1);
    double col_norm_sq = 0.0;
    for (int k = 0; k < n - 1; ++k) {
        double lin = 0.0;
        for (int j = 0; j < n - 1; ++j) lin += a.entries()(k, j) * z[j];
        const double ie = -lin * mass_e - a.entries()(k, n - 1) * mom_e;
        const double is = -lin * mass_es - a.entries()(k, n - 1) * mom_es;
        diff[k] = ie - is;
        col_norm_sq += a.entries()(k, n - 1) * a.entries()(k, n - 1);
    }

    CrossTermCheck out;
    out.lhs = norm(diff);
    out.first_moment_drop = mom_e - mom_es;
    out.rhs = out.first_moment_drop * std::sqrt(col_norm_sq);
    return out;
}

}  // namespace aniso
