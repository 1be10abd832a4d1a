#include "aniso/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace aniso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.5066282746310005024;

double pow_2pi(double half_exponent) { return std::pow(2.0 * M_PI, half_exponent); }

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::closed_form: return "closed_form";
        case Method::slice_quadrature: return "slice_quadrature";
        case Method::graph_quadrature: return "graph_quadrature";
        case Method::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

MeasureResult halfspace_mass(const SpdMatrix& a, const HalfSpaceSet& h) {
    if (a.dim() != h.dim()) throw DimensionMismatch("halfspace_mass: dimension mismatch");
    const double s = norm(a.sqrt_inv_entries() * h.omega().components());
    const double value = std_normal_cdf(h.t() / s);
    return {value, 1e-15 * std::fabs(value), Method::closed_form};
}

MeasureResult halfspace_perimeter(const SpdMatrix& a, const HalfSpaceSet& h) {
    if (a.dim() != h.dim()) throw DimensionMismatch("halfspace_perimeter: dimension mismatch");
    const double s = norm(a.sqrt_inv_entries() * h.omega().components());
    const double value = std::exp(-0.5 * h.t() * h.t() / (s * s)) / s;
    return {value, 1e-15 * std::fabs(value), Method::closed_form};
}

Vector halfspace_barycenter(const SpdMatrix& a, const HalfSpaceSet& h) {
    if (a.dim() != h.dim()) throw DimensionMismatch("halfspace_barycenter: dimension mismatch");
    const double s = norm(a.sqrt_inv_entries() * h.omega().components());
    const double factor = -std::exp(-0.5 * h.t() * h.t() / (s * s)) / (kSqrt2Pi * s);
    return factor * (a.inv_entries() * h.omega().components());
}

// ---------------------------------------------------------------------------
// Weighted polytope integrals: integral over {s : <w_j, s> < r_j} of
// e^{-q(s)/2} ds with q(s) = <M s, s> + 2 <b, s> + c, plus first moments.
// Reduction: the last coordinate in closed form, the base coordinates by
// composite Gauss-Legendre panels over the truncation box around the
// mode, split at breakpoints and refined when the dual-rule estimate
// misses the tolerance.
// ---------------------------------------------------------------------------

namespace {

struct LinCon {
    Vector w;
    double r;
};

struct EngineResult {
    double mass = 0.0;
    Vector moment;  // in the s coordinates
    double error = 0.0;
};

class PolytopeIntegrator {
  public:
    PolytopeIntegrator(Matrix m, Vector b, double c, std::vector<LinCon> cons, bool want_moments,
                       const QuadratureConfig& cfg)
        : m_(std::move(m)), b_(std::move(b)), cons_(std::move(cons)), want_moments_(want_moments), cfg_(cfg) {
        k_ = m_.rows();
        // with a single clipping direction, whiten the metric and rotate
        // that direction onto the innermost axis: every base integrand
        // then reduces to a plain Gaussian profile
        int finite_cons = 0, last_finite = -1;
        for (size_t i = 0; i < cons_.size(); ++i)
            if (!std::isinf(cons_[i].r)) {
                ++finite_cons;
                last_finite = static_cast<int>(i);
            }
        if (k_ >= 2 && finite_cons == 1 && norm(cons_[last_finite].w) > 1e-300) {
            const EigenDecomposition eig = jacobi_eigendecomposition(m_);
            Matrix white(k_, k_);  // V diag(lambda^{-1/2})
            double det_t = 1.0;
            for (int j = 0; j < k_; ++j) {
                const double inv_sqrt = 1.0 / std::sqrt(eig.eigenvalues[j]);
                det_t *= inv_sqrt;
                for (int i = 0; i < k_; ++i) white(i, j) = eig.eigenvectors(i, j) * inv_sqrt;
            }
            const Vector w_white = white.transpose() * cons_[last_finite].w;
            const Rotation align = rotation_to_minus_en(Direction(-1.0 * w_white));
            Matrix t = white * align.entries();
            m_ = t.transpose() * m_ * t;
            b_ = t.transpose() * b_;
            Vector wt(k_, 0.0);
            wt[k_ - 1] = norm(w_white);
            cons_[last_finite].w = wt;
            frame_ = std::move(t);
            frame_det_ = std::fabs(det_t);
        }
        Vector neg_b(b_);
        for (double& x : neg_b) x = -x;
        center_ = solve(m_, neg_b);
        qmin_ = c + dot(b_, center_);
        c_norm_ = c - qmin_;
        // normalize rows so parallel-noise thresholds are absolute
        for (LinCon& con : cons_) {
            const double len = norm(con.w);
            if (len > 1e-300) {
                for (double& x : con.w) x /= len;
                con.r /= len;
            }
        }
        const Matrix minv = inverse(m_);
        sigma_.resize(k_);
        radius_.resize(k_);
        width_cap_.assign(k_, kInf);
        const double alpha = m_(k_ - 1, k_ - 1);
        for (int ax = 0; ax < k_; ++ax) {
            sigma_[ax] = std::sqrt(minv(ax, ax));
            radius_[ax] = truncation_radius(sigma_[ax], k_, cfg_.tail_tol);
            if (ax == k_ - 1) continue;
            // the cdf factor of a clipped line ramps along this axis with
            // frequency ~ sqrt(alpha) |w_ax / w_last|; keep it resolved
            double freq = std::fabs(m_(k_ - 1, ax)) / std::sqrt(alpha);
            for (const LinCon& c : cons_) {
                if (std::isinf(c.r) || std::fabs(c.w[k_ - 1]) < 1e-12) continue;
                freq = std::max(freq, std::sqrt(alpha) * std::fabs(c.w[ax] / c.w[k_ - 1]));
            }
            if (freq > 1e-12) width_cap_[ax] = 32.0 / freq;
        }
        ncomp_ = 1 + (want_moments_ ? k_ : 0);
    }

    EngineResult run() {
        EngineResult out;
        out.moment.assign(want_moments_ ? k_ : 0, 0.0);
        if (0.5 * qmin_ > 700.0) return out;  // weight underflows everywhere
        const double factor = std::exp(-0.5 * qmin_);
        const double full_gauss = pow_2pi(0.5 * k_) / std::sqrt(determinant(m_));

        std::vector<double> acc(ncomp_ + 1, 0.0);
        if (k_ == 1) {
            Vector z;
            inner(z, acc.data());
        } else {
            // spectral composite panels resolve piecewise-analytic
            // integrands between breakpoints; when the outermost dual-rule
            // estimate disagrees, retry with split panels
            for (refine_ = 1;; refine_ *= 4) {
                Vector z(k_ - 1, 0.0);
                std::fill(acc.begin(), acc.end(), 0.0);
                eval_level(0, z, acc.data());
                const double scale = std::max(std::fabs(acc[0]), 1e-6 * full_gauss);
                if (acc[ncomp_] <= cfg_.rel_tol * scale) break;
                if (refine_ * 16 > cfg_.panels_per_axis)
                    throw QuadratureNotConverged("panel limit hit with error above rel_tol");
            }
        }
        out.mass = frame_det_ * factor * acc[0];
        for (int j = 0; j < (want_moments_ ? k_ : 0); ++j) out.moment[j] = factor * acc[1 + j];
        if (want_moments_ && frame_) out.moment = *frame_ * out.moment;
        if (want_moments_)
            for (double& x : out.moment) x *= frame_det_;
        // tail of the untruncated Gaussian plus the composite error estimate
        out.error = frame_det_ * factor * (acc[ncomp_] + cfg_.tail_tol * full_gauss);
        return out;
    }

  private:
    // closed-form integral along the last coordinate at base point z
    void inner(const Vector& z, double* out) const {
        std::fill(out, out + ncomp_ + 1, 0.0);
        double lo = -kInf, hi = kInf;
        for (const LinCon& c : cons_) {
            const double d = c.w[k_ - 1];
            double rr = c.r;
            for (int j = 0; j < k_ - 1; ++j) rr -= c.w[j] * z[j];
            if (std::fabs(d) <= 1e-12) {  // rows are unit; smaller is parallel noise
                if (!(rr > 0.0)) return;
                continue;
            }
            const double bound = rr / d;
            if (d > 0.0)
                hi = std::min(hi, bound);
            else
                lo = std::max(lo, bound);
            if (!(lo < hi)) return;
        }
        double alpha = m_(k_ - 1, k_ - 1);
        double beta = b_[k_ - 1];
        double gamma = c_norm_;
        for (int j = 0; j < k_ - 1; ++j) {
            beta += m_(k_ - 1, j) * z[j];
            gamma += 2.0 * b_[j] * z[j];
            for (int i = 0; i < k_ - 1; ++i) gamma += m_(i, j) * z[i] * z[j];
        }
        const LineGaussian line(alpha, beta, gamma);
        const IntervalUnion seg({{lo, hi}});
        const double mass = line_mass(line, seg);
        out[0] = mass;
        if (want_moments_) {
            for (int j = 0; j < k_ - 1; ++j) out[1 + j] = z[j] * mass;
            out[k_] = line_first_moment(line, seg);
        }
        out[ncomp_] = 1e-15 * mass;
    }

    void eval_level(int axis, Vector& z, double* out) const { fixed_level(axis, z, out); }

    // panel edges: truncation box cut at breakpoints, each piece split to
    // at most ~6 marginal widths so a single Gauss-Legendre panel already
    // resolves the analytic factors to machine accuracy
    std::vector<double> panel_edges(int axis, const Vector& z) const {
        const double a0 = center_[axis] - radius_[axis];
        const double b0 = center_[axis] + radius_[axis];
        std::vector<double> edges{a0, b0};
        for (double t : breakpoints(axis, z))
            if (t > a0 && t < b0) edges.push_back(t);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        const double max_width = std::min(6.0 * sigma_[axis], width_cap_[axis]) / refine_;
        std::vector<double> refined;
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            refined.push_back(edges[i]);
            const int splits = static_cast<int>(std::ceil((edges[i + 1] - edges[i]) / max_width));
            for (int s = 1; s < splits; ++s)
                refined.push_back(edges[i] + (edges[i + 1] - edges[i]) * s / splits);
        }
        refined.push_back(edges.back());
        return refined;
    }

    // outer base axes: fixed composite Gauss-Legendre; the outermost axis
    // also runs the half-order rule to expose the composite error
    void fixed_level(int axis, Vector& z, double* out) const {
        const std::vector<double> edges = panel_edges(axis, z);
        const GlRule& rule = gl_rule(cfg_.base_rule);
        const bool estimate = axis == 0 || axis == k_ - 2;
        const GlRule& alt_rule = gl_rule(std::max(4, cfg_.base_rule / 2));

        const bool innermost = axis == k_ - 2;
        std::vector<double> sum(ncomp_ + 1, 0.0), alt(ncomp_ + 1, 0.0), vals(ncomp_ + 1);
        Vector zz = z;
        auto child = [&](double t, double* dst) {
            zz[axis] = t;
            if (innermost)
                inner(zz, dst);
            else
                eval_level(axis + 1, zz, dst);
        };
        for (size_t p = 0; p + 1 < edges.size(); ++p) {
            const double mid = 0.5 * (edges[p] + edges[p + 1]);
            const double halfw = 0.5 * (edges[p + 1] - edges[p]);
            for (size_t i = 0; i < rule.x.size(); ++i) {
                child(mid + halfw * rule.x[i], vals.data());
                for (int c = 0; c <= ncomp_; ++c) sum[c] += halfw * rule.w[i] * vals[c];
            }
            if (estimate) {
                for (size_t i = 0; i < alt_rule.x.size(); ++i) {
                    child(mid + halfw * alt_rule.x[i], vals.data());
                    for (int c = 0; c < ncomp_; ++c) alt[c] += halfw * alt_rule.w[i] * vals[c];
                }
            }
        }
        for (int c = 0; c <= ncomp_; ++c) out[c] = sum[c];
        if (estimate)
            for (int c = 0; c < ncomp_; ++c) out[ncomp_] += std::fabs(sum[c] - alt[c]);
    }

    // jump locations of the integrand along `axis` given the coordinates
    // before it; only worth computing for modest constraint counts
    std::vector<double> breakpoints(int axis, const Vector& z) const {
        std::vector<double> pts;
        const int m = static_cast<int>(cons_.size());
        // constraints that involve no later coordinate than `axis`
        auto pure_up_to = [&](const LinCon& c) {
            for (int j = axis + 1; j < k_; ++j)
                if (c.w[j] != 0.0) return false;
            return true;
        };
        for (const LinCon& c : cons_) {
            if (!pure_up_to(c) || c.w[axis] == 0.0 || std::isinf(c.r)) continue;
            double rr = c.r;
            for (int j = 0; j < axis; ++j) rr -= c.w[j] * z[j];
            pts.push_back(rr / c.w[axis]);
        }
        if (axis == 0 && k_ == 3 && m <= 24) {
            // outer-axis projections of the polytope vertices
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    for (int l = j + 1; l < m; ++l) {
                        if (std::isinf(cons_[i].r) || std::isinf(cons_[j].r) || std::isinf(cons_[l].r))
                            continue;
                        Matrix sys(3, 3);
                        Vector rhs{cons_[i].r, cons_[j].r, cons_[l].r};
                        for (int c2 = 0; c2 < 3; ++c2) {
                            sys(0, c2) = cons_[i].w[c2];
                            sys(1, c2) = cons_[j].w[c2];
                            sys(2, c2) = cons_[l].w[c2];
                        }
                        try {
                            pts.push_back(solve(sys, rhs)[0]);
                        } catch (const SingularMatrix&) {
                        }
                    }
        }
        if (axis == k_ - 2 && m <= (k_ == 2 ? 2048 : 40)) {
            // vertices of constraint pairs in the (z_axis, s_last) plane
            for (int i = 0; i < m; ++i) {
                for (int j = i + 1; j < m; ++j) {
                    if (std::isinf(cons_[i].r) || std::isinf(cons_[j].r)) continue;
                    bool flat = true;
                    for (int t = axis + 1; t < k_ - 1 && flat; ++t)
                        if (cons_[i].w[t] != 0.0 || cons_[j].w[t] != 0.0) flat = false;
                    if (!flat) continue;
                    const double a11 = cons_[i].w[axis], a12 = cons_[i].w[k_ - 1];
                    const double a21 = cons_[j].w[axis], a22 = cons_[j].w[k_ - 1];
                    const double det = a11 * a22 - a12 * a21;
                    if (std::fabs(det) < 1e-14) continue;
                    double r1 = cons_[i].r, r2 = cons_[j].r;
                    for (int t = 0; t < axis; ++t) {
                        r1 -= cons_[i].w[t] * z[t];
                        r2 -= cons_[j].w[t] * z[t];
                    }
                    pts.push_back((r1 * a22 - r2 * a12) / det);
                }
            }
        }
        return pts;
    }

    Matrix m_;
    Vector b_;
    std::vector<LinCon> cons_;
    bool want_moments_;
    QuadratureConfig cfg_;
    int k_ = 0, ncomp_ = 0;
    Vector center_;
    std::optional<Matrix> frame_;
    double frame_det_ = 1.0;
    Vector sigma_, radius_, width_cap_;
    double qmin_ = 0.0, c_norm_ = 0.0;
    mutable int refine_ = 1;
};

std::vector<LinCon> constraints_of(const SetRegion& e) {
    std::vector<LinCon> out;
    auto push = [&](const Constraint& c) { out.push_back({c.omega.components(), c.t}); };
    if (const auto* h = e.as_halfspace())
        push({h->omega(), h->t()});
    else if (const auto* p = e.as_polytope())
        for (const Constraint& c : p->constraints()) push(c);
    else if (const auto* b = e.as_box()) {
        const PolytopeSet poly = b->to_polytope();
        for (const Constraint& c : poly.constraints()) push(c);
    } else
        throw UnsupportedVariant("expected a halfspace/polytope/box");
    return out;
}

// --- subgraph measures (in the subgraph's rotated frame) -------------------

struct SubgraphFrame {
    const SubgraphRegion& s;
    SpdMatrix arot;  // O^T A O

    LineGaussian line_at(const Vector& z) const {
        const int n = s.dim();
        double alpha = arot.entries()(n - 1, n - 1);
        double beta = 0.0, gamma = 0.0;
        for (int j = 0; j < n - 1; ++j) {
            beta += arot.entries()(n - 1, j) * z[j];
            for (int i = 0; i < n - 1; ++i) gamma += arot.entries()(i, j) * z[i] * z[j];
        }
        return LineGaussian(alpha, beta, gamma);
    }
};

struct CellHeights {
    std::vector<double> h;  // corner heights, 2^bd of them
    bool any_neg_inf = false;
    bool any_pos_inf = false;
    bool all_finite = true;
};

CellHeights cell_heights(const SubgraphRegion& s, const std::vector<int>& cell) {
    const int bd = s.base_dim();
    CellHeights out;
    std::vector<int> idx(bd);
    for (int mask = 0; mask < (1 << bd); ++mask) {
        for (int ax = 0; ax < bd; ++ax) idx[ax] = cell[ax] + ((mask >> ax) & 1);
        const double h = s.height_at_node(idx);
        out.h.push_back(h);
        if (h == -kInf) out.any_neg_inf = true;
        if (h == kInf) out.any_pos_inf = true;
        if (!std::isfinite(h)) out.all_finite = false;
    }
    return out;
}

// mass (and first moments) of a subgraph in its rotated frame; the error
// channel carries quadrature refinement differences, interpolation slack
// from the second differences of h, and tail/dust allowances.
EngineResult subgraph_mass_moments(const SubgraphFrame& fr, bool want_moments) {
    const SubgraphRegion& s = fr.s;
    const int bd = s.base_dim();
    const int n = s.dim();
    EngineResult out;
    out.moment.assign(want_moments ? n : 0, 0.0);

    auto column = [&](const Vector& z, double h, double* acc, double weight) {
        const LineGaussian line = fr.line_at(z);
        const double m = h == kInf ? line.total_mass() : line.mass_below(h);
        acc[0] += weight * m;
        if (want_moments) {
            for (int j = 0; j < bd; ++j) acc[1 + j] += weight * z[j] * m;
            const double wh = h == kInf ? 0.0 : line.weight(h);
            acc[1 + bd] += weight * (-wh / line.alpha() - line.beta() / line.alpha() * m);
        }
    };

    const int ncomp = 1 + (want_moments ? n : 0);
    std::vector<double> fine(ncomp, 0.0), cell_fine(ncomp), cell_coarse(ncomp);
    double err = 0.0;

    const GlRule& rule_f = gl_rule(bd == 1 ? 6 : 3);
    const GlRule& rule_c = gl_rule(bd == 1 ? 3 : 2);

    std::vector<int> cell(bd, 0);
    bool done = false;
    while (!done) {
        const CellHeights ch = cell_heights(s, cell);
        if (!ch.any_neg_inf) {
            std::fill(cell_fine.begin(), cell_fine.end(), 0.0);
            std::fill(cell_coarse.begin(), cell_coarse.end(), 0.0);
            double volume = 1.0;
            for (int ax = 0; ax < bd; ++ax) volume *= 0.5 * s.spacing(ax);

            auto run_rule = [&](const GlRule& rule, double* acc) {
                if (bd == 1) {
                    const double za = s.node_coord(0, cell[0]);
                    const double mid = za + 0.5 * s.spacing(0);
                    for (size_t i = 0; i < rule.x.size(); ++i) {
                        const double z0 = mid + 0.5 * s.spacing(0) * rule.x[i];
                        const double frac = (z0 - za) / s.spacing(0);
                        const double h = ch.any_pos_inf ? kInf : ch.h[0] + frac * (ch.h[1] - ch.h[0]);
                        Vector z{z0};
                        column(z, h, acc, rule.w[i] * volume);
                    }
                } else {
                    const double za = s.node_coord(0, cell[0]);
                    const double zb = s.node_coord(1, cell[1]);
                    const double mid0 = za + 0.5 * s.spacing(0);
                    const double mid1 = zb + 0.5 * s.spacing(1);
                    for (size_t i = 0; i < rule.x.size(); ++i) {
                        for (size_t j = 0; j < rule.x.size(); ++j) {
                            const double z0 = mid0 + 0.5 * s.spacing(0) * rule.x[i];
                            const double z1 = mid1 + 0.5 * s.spacing(1) * rule.x[j];
                            const double f0 = (z0 - za) / s.spacing(0);
                            const double f1 = (z1 - zb) / s.spacing(1);
                            double h;
                            if (ch.any_pos_inf) {
                                h = kInf;
                            } else {
                                h = ch.h[0] * (1 - f0) * (1 - f1) + ch.h[1] * f0 * (1 - f1) +
                                    ch.h[2] * (1 - f0) * f1 + ch.h[3] * f0 * f1;
                            }
                            Vector z{z0, z1};
                            column(z, h, acc, rule.w[i] * rule.w[j] * volume);
                        }
                    }
                }
            };
            run_rule(rule_f, cell_fine.data());
            run_rule(rule_c, cell_coarse.data());
            for (int c = 0; c < ncomp; ++c) fine[c] += cell_fine[c];
            err += std::fabs(cell_fine[0] - cell_coarse[0]);
        } else {
            // empty cell; a finite corner means the sliver carried mass
            double hf = -kInf;
            for (double h : ch.h)
                if (std::isfinite(h)) hf = std::max(hf, h);
            if (std::isfinite(hf)) {
                Vector z(bd);
                for (int ax = 0; ax < bd; ++ax) z[ax] = s.node_coord(ax, cell[ax]);
                double width = 0.0;
                for (int ax = 0; ax < bd; ++ax) width = std::max(width, s.spacing(ax));
                err += fr.line_at(z).mass_below(hf) * width;
            }
        }
        // advance multi-index over cells
        int ax = 0;
        while (ax < bd) {
            if (++cell[ax] < s.nodes()[ax] - 1) break;
            cell[ax] = 0;
            ++ax;
        }
        if (ax == bd) done = true;
    }

    // interpolation slack from the curvature of h
    for (int ax = 0; ax < bd; ++ax) {
        std::vector<int> idx(bd, 0);
        bool more = true;
        while (more) {
            if (idx[ax] >= 1 && idx[ax] + 1 < s.nodes()[ax]) {
                std::vector<int> im = idx, ip = idx;
                --im[ax];
                ++ip[ax];
                const double h0 = s.height_at_node(im), h1 = s.height_at_node(idx), h2 = s.height_at_node(ip);
                if (std::isfinite(h0) && std::isfinite(h1) && std::isfinite(h2)) {
                    Vector z(bd);
                    for (int a2 = 0; a2 < bd; ++a2) z[a2] = s.node_coord(a2, idx[a2]);
                    const double d2 = std::fabs(h0 - 2 * h1 + h2);
                    double cellvol = 1.0;
                    for (int a2 = 0; a2 < bd; ++a2)
                        if (a2 != ax) cellvol *= s.spacing(a2);
                    err += 0.125 * d2 * fr.line_at(z).weight(h1) * cellvol * s.spacing(ax);
                }
            }
            int a3 = 0;
            while (a3 < bd) {
                if (++idx[a3] < s.nodes()[a3]) break;
                idx[a3] = 0;
                ++a3;
            }
            if (a3 == bd) more = false;
        }
    }

    for (int ax = 0; ax < bd; ++ax)
        for (int side = 0; side < 2; ++side)
            if (!s.side_is_true_boundary(ax, side)) err += 1e-12;  // truncated tail, relative to unit mass

    out.mass = fine[0];
    if (want_moments) {
        for (int j = 0; j < n; ++j) out.moment[j] = fine[1 + j];
    }
    out.error = err;
    return out;
}

// graph + wall perimeter of a subgraph in its rotated frame (value lacks
// the (2 pi)-prefactor)
std::pair<double, double> subgraph_perimeter_raw(const SubgraphFrame& fr) {
    const SubgraphRegion& s = fr.s;
    const int bd = s.base_dim();
    double value = 0.0, err = 0.0;

    auto wall_mass = [&](const Vector& z, double h) {
        const LineGaussian line = fr.line_at(z);
        return h == kInf ? line.total_mass() : line.mass_below(h);
    };

    if (bd == 1) {
        const int nn = s.nodes()[0];
        // weighted polyline length over nodes 0, stride, 2*stride, ...;
        // the stride-2 pass exposes the interpolation error
        auto graph_at_stride = [&](int stride, double& side_err) {
            double acc = 0.0;
            for (int k = 0; k < nn - 1; k += stride) {
                const int k1 = std::min(k + stride, nn - 1);
                const double z0 = s.node_coord(0, k), z1 = s.node_coord(0, k1);
                const double h0 = s.heights()[k], h1 = s.heights()[k1];
                const bool f0 = std::isfinite(h0), f1 = std::isfinite(h1);
                if (f0 && f1) {
                    const double dx = z1 - z0, dy = h1 - h0;
                    const double len = std::hypot(dx, dy);
                    const Direction dir(Vector{dx / len, dy / len});
                    const LineGaussian seg = line_gaussian(fr.arot, Vector{z0, h0}, dir);
                    acc += seg.mass_between(0.0, len);
                } else if (f0 != f1) {
                    const double zf = f0 ? z0 : z1;
                    const double hf = f0 ? h0 : h1;
                    const double hinf = f0 ? h1 : h0;
                    const LineGaussian lf = fr.line_at(Vector{zf});
                    if (hinf == -kInf)
                        side_err += lf.mass_below(hf) + lf.weight(hf) * std::fabs(z1 - z0);
                    else
                        side_err += (lf.total_mass() - lf.mass_below(hf)) + lf.weight(hf) * std::fabs(z1 - z0);
                } else if (f0 == f1 && !f0 && h0 != h1) {
                    // dust-to-full jump: a full vertical wall between the nodes
                    acc += fr.line_at(Vector{0.5 * (z0 + z1)}).total_mass();
                }
            }
            return acc;
        };
        double dust_err = 0.0, coarse_dust = 0.0;
        value = graph_at_stride(1, dust_err);
        const double coarse = graph_at_stride(2, coarse_dust);
        err += dust_err + std::fabs(value - coarse);

        for (int side = 0; side < 2; ++side) {
            const int k = side == 0 ? 0 : nn - 1;
            const double h = s.heights()[k];
            if (h == -kInf) continue;
            const double w = wall_mass(Vector{s.node_coord(0, k)}, h);
            if (s.side_is_true_boundary(0, side))
                value += w;
            else
                err += w;
        }
        return {value, err};
    }

    // bd == 2: graph patches by cell triangulation with centroid weights,
    // again compared against the stride-2 triangulation
    const int n0 = s.nodes()[0], n1 = s.nodes()[1];
    auto hat = [&](int i, int j) { return s.heights()[static_cast<size_t>(i) * n1 + j]; };
    auto graph_at_stride = [&](int stride, double& side_err) {
        double acc = 0.0;
        for (int i = 0; i < n0 - 1; i += stride) {
            const int i1 = std::min(i + stride, n0 - 1);
            for (int j = 0; j < n1 - 1; j += stride) {
                const int j1 = std::min(j + stride, n1 - 1);
                const double z00 = s.node_coord(0, i), z01 = s.node_coord(0, i1);
                const double w00 = s.node_coord(1, j), w01 = s.node_coord(1, j1);
                const double h00 = hat(i, j), h10 = hat(i1, j), h01 = hat(i, j1), h11 = hat(i1, j1);
                const bool fin =
                    std::isfinite(h00) && std::isfinite(h10) && std::isfinite(h01) && std::isfinite(h11);
                if (fin) {
                    auto tri = [&](double ax, double ay, double ah, double bx, double by, double bh,
                                   double cx, double cy, double chh) {
                        const double ux = bx - ax, uy = by - ay, uh = bh - ah;
                        const double vx = cx - ax, vy = cy - ay, vh = chh - ah;
                        const double cxn = uy * vh - uh * vy;
                        const double cyn = uh * vx - ux * vh;
                        const double czn = ux * vy - uy * vx;
                        const double area = 0.5 * std::sqrt(cxn * cxn + cyn * cyn + czn * czn);
                        Vector centroid{(ax + bx + cx) / 3.0, (ay + by + cy) / 3.0};
                        const double hmid = (ah + bh + chh) / 3.0;
                        acc += area * fr.line_at(centroid).weight(hmid);
                    };
                    tri(z00, w00, h00, z01, w00, h10, z01, w01, h11);
                    tri(z00, w00, h00, z01, w01, h11, z00, w01, h01);
                } else {
                    double hf = -kInf;
                    for (double h : {h00, h10, h01, h11})
                        if (std::isfinite(h)) hf = std::max(hf, h);
                    if (std::isfinite(hf)) {
                        Vector z{0.5 * (z00 + z01), 0.5 * (w00 + w01)};
                        side_err += fr.line_at(z).mass_below(hf) * (std::fabs(z01 - z00) + std::fabs(w01 - w00)) +
                                    fr.line_at(z).weight(hf) * std::fabs(z01 - z00) * std::fabs(w01 - w00);
                    }
                }
            }
        }
        return acc;
    };
    double dust_err = 0.0, coarse_dust = 0.0;
    value = graph_at_stride(1, dust_err);
    const double coarse = graph_at_stride(2, coarse_dust);
    err += dust_err + std::fabs(value - coarse);

    // walls along the four sides of the base rectangle
    for (int ax = 0; ax < 2; ++ax) {
        const int other = 1 - ax;
        for (int side = 0; side < 2; ++side) {
            const int fixed = side == 0 ? 0 : s.nodes()[ax] - 1;
            double strip = 0.0;
            for (int k = 0; k + 1 < s.nodes()[other]; ++k) {
                auto node_h = [&](int kk) {
                    std::vector<int> idx(2);
                    idx[ax] = fixed;
                    idx[other] = kk;
                    return s.height_at_node(idx);
                };
                auto node_z = [&](int kk) {
                    Vector z(2);
                    z[ax] = s.node_coord(ax, fixed);
                    z[other] = s.node_coord(other, kk);
                    return z;
                };
                const double ha = node_h(k), hb = node_h(k + 1);
                const double ma = ha == -kInf ? 0.0 : wall_mass(node_z(k), ha);
                const double mb = hb == -kInf ? 0.0 : wall_mass(node_z(k + 1), hb);
                strip += 0.5 * (ma + mb) * s.spacing(other);
            }
            if (s.side_is_true_boundary(ax, side))
                value += strip;
            else
                err += strip;
        }
    }
    return {value, err};
}

}  // namespace

MeasureResult mass(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg) {
    cfg.validate();
    const int n = e.dim();
    if (a.dim() != n) throw DimensionMismatch("mass: dimension mismatch");
    if (const auto* h = e.as_halfspace()) return halfspace_mass(a, *h);

    if (const auto* s = e.as_subgraph()) {
        const SubgraphFrame fr{*s, conjugate(a, s->rotation())};
        const EngineResult r = subgraph_mass_moments(fr, false);
        const double pre = a.sqrt_det() / pow_2pi(0.5 * n);
        return {pre * r.mass, pre * r.error + cfg.tail_tol, Method::slice_quadrature};
    }

    PolytopeIntegrator engine(a.entries(), Vector(n, 0.0), 0.0, constraints_of(e), false, cfg);
    const EngineResult r = engine.run();
    const double pre = a.sqrt_det() / pow_2pi(0.5 * n);
    return {pre * r.mass, pre * r.error, Method::slice_quadrature};
}

Vector barycenter(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg) {
    cfg.validate();
    const int n = e.dim();
    if (a.dim() != n) throw DimensionMismatch("barycenter: dimension mismatch");
    if (const auto* h = e.as_halfspace()) return halfspace_barycenter(a, *h);

    if (const auto* s = e.as_subgraph()) {
        const SubgraphFrame fr{*s, conjugate(a, s->rotation())};
        const EngineResult r = subgraph_mass_moments(fr, true);
        const double pre = a.sqrt_det() / pow_2pi(0.5 * n);
        return s->rotation().apply(pre * r.moment);
    }

    PolytopeIntegrator engine(a.entries(), Vector(n, 0.0), 0.0, constraints_of(e), true, cfg);
    const EngineResult r = engine.run();
    const double pre = a.sqrt_det() / pow_2pi(0.5 * n);
    return pre * r.moment;
}

MeasureResult perimeter(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg) {
    cfg.validate();
    const int n = e.dim();
    if (a.dim() != n) throw DimensionMismatch("perimeter: dimension mismatch");
    if (const auto* h = e.as_halfspace()) return halfspace_perimeter(a, *h);

    if (const auto* s = e.as_subgraph()) {
        if (n < 2 || n > 3) throw UnsupportedDimension("subgraph perimeter supports n = 2 or 3");
        const SubgraphFrame fr{*s, conjugate(a, s->rotation())};
        const auto [raw, raw_err] = subgraph_perimeter_raw(fr);
        const double pre = a.sqrt_det() / pow_2pi(0.5 * (n - 1));
        return {pre * raw, pre * raw_err + 1e-14 * pre * raw, Method::graph_quadrature};
    }

    if (n > 4) throw UnsupportedDimension("polytope perimeter supports n <= 4");
    const std::vector<LinCon> cons = constraints_of(e);
    double total = 0.0, err = 0.0;
    for (size_t i = 0; i < cons.size(); ++i) {
        if (std::isinf(cons[i].r)) continue;
        const Direction omega{Vector(cons[i].w)};
        const Vector x0 = cons[i].r * omega.components();

        if (n == 1) {
            bool live = true;
            for (size_t j = 0; j < cons.size() && live; ++j) {
                if (j == i) continue;
                if (dot(cons[j].w, x0) > cons[j].r + 1e-12 * (1.0 + std::fabs(cons[j].r))) live = false;
            }
            if (live) {
                const double q = dot(a.apply(x0), x0);
                total += std::exp(-0.5 * q);
            }
            continue;
        }

        // orthonormal basis of the facet plane
        const Rotation o = rotation_to_minus_en(Direction(-1.0 * omega.components()));
        Matrix v(n, n - 1);
        for (int r2 = 0; r2 < n; ++r2)
            for (int c2 = 0; c2 < n - 1; ++c2) v(r2, c2) = o.entries()(r2, c2);

        Matrix mm = v.transpose() * a.entries() * v;
        Vector bb = v.transpose() * a.apply(x0);
        const double cc = dot(a.apply(x0), x0);

        std::vector<LinCon> facet_cons;
        bool facet_empty = false;
        for (size_t j = 0; j < cons.size(); ++j) {
            if (j == i || std::isinf(cons[j].r)) continue;
            Vector w2 = v.transpose() * cons[j].w;
            const double r2 = cons[j].r - dot(cons[j].w, x0);
            if (norm(w2) < 1e-12) {
                if (r2 <= 0.0) facet_empty = true;
                continue;  // redundant on the facet plane
            }
            facet_cons.push_back({std::move(w2), r2});
        }
        if (facet_empty) continue;

        PolytopeIntegrator engine(std::move(mm), std::move(bb), cc, std::move(facet_cons), false, cfg);
        const EngineResult r = engine.run();
        total += r.mass;
        err += r.error;
    }
    const double pre = a.sqrt_det() / pow_2pi(0.5 * (n - 1));
    return {pre * total, pre * err, Method::slice_quadrature};
}

SandwichTriple perimeter_sandwich_check(const SpdMatrix& a, const SetRegion& e, const QuadratureConfig& cfg) {
    const int n = e.dim();
    if (n > 3) throw UnsupportedDimension("sandwich check supports n <= 3");
    const MeasureResult pa = perimeter(a, e, cfg);
    const SetRegion mapped = transform(e, a.sqrt_entries());
    const MeasureResult pi = perimeter(spd_identity(n), mapped, cfg);
    return {pa.value / a.sqrt_norm(), pi.value, a.sqrt_inv_norm() * pa.value};
}

SetRegion minkowski_enlarge(const SetRegion& e, double eps) {
    if (!(eps > 0.0)) throw OutOfRange("minkowski_enlarge needs eps > 0");
    if (const auto* h = e.as_halfspace()) return SetRegion(HalfSpaceSet(h->omega(), h->t() + eps));
    if (e.dim() != 2 || e.as_subgraph())
        throw UnsupportedVariant("minkowski_enlarge supports half-spaces and 2D convex polytopes");

    const PolytopeSet poly = e.as_polytope() ? *e.as_polytope() : e.as_box()->to_polytope();
    std::vector<Constraint> cons;
    for (const Constraint& c : poly.constraints()) cons.push_back({c.omega, c.t + eps});

    // circumscribe the eps-arcs by support lines; the overshoot of a line
    // tangent to a radius-eps arc at angular step theta is
    // eps (sec(theta/2) - 1) <= eps * 1e-4
    const double theta = 2.0 * std::acos(1.0 / (1.0 + 1e-4));
    const int k = static_cast<int>(std::ceil(2.0 * M_PI / theta));
    for (int i = 0; i < k; ++i) {
        const double ang = 2.0 * M_PI * i / k;
        Vector d{std::cos(ang), std::sin(ang)};
        const double h = support(SetRegion(poly), d);
        if (!std::isfinite(h)) continue;
        cons.push_back({Direction(d), h + eps});
    }
    return SetRegion(PolytopeSet(std::move(cons), poly.witness(), 1 << 12));
}

}  // namespace aniso
