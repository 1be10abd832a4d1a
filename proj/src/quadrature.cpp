#include "aniso/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace aniso {

namespace {

GlRule compute_gl_rule(int order) {
    // Newton iteration on Legendre polynomials; nodes symmetric about 0.
    GlRule rule;
    rule.x.resize(order);
    rule.w.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        rule.x[i] = -x;
        rule.x[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.w[i] = w;
        rule.w[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GlRule& gl_rule(int order) {
    static std::mutex mu;
    static std::map<int, GlRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gl_rule(order)).first;
    return it->second;
}

double truncation_radius(double sigma, int dims, double tail_tol) {
    const double base = 2.0 * std::log(1.0 / tail_tol);
    double r = sigma * std::sqrt(base);
    for (int i = 0; i < 2; ++i) r = sigma * std::sqrt(base + dims * std::log(2.0 + r * r));
    return r;
}

namespace {

void gl_panel(const std::function<void(double, double*)>& f, int ncomp, double a, double b, const GlRule& rule,
              std::vector<double>& scratch, double* out) {
    const double mid = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);
    std::fill(out, out + ncomp, 0.0);
    for (size_t i = 0; i < rule.x.size(); ++i) {
        f(mid + halfw * rule.x[i], scratch.data());
        for (int c = 0; c < ncomp; ++c) {
            if (!std::isfinite(scratch[c])) throw QuadratureNotConverged("non-finite integrand value");
            out[c] += rule.w[i] * scratch[c];
        }
    }
    for (int c = 0; c < ncomp; ++c) out[c] *= halfw;
}

}  // namespace

VecIntegral integrate_adaptive(const std::function<void(double, double*)>& f, int ncomp, double a, double b,
                               const std::vector<double>& breakpoints, double rel_tol, int base_rule,
                               int max_panels) {
    VecIntegral out;
    out.value.assign(ncomp, 0.0);
    out.error.assign(ncomp, 0.0);
    if (!(a < b)) return out;

    const GlRule& rule = gl_rule(base_rule);
    std::vector<double> scratch(ncomp);

    std::vector<double> edges;
    edges.push_back(a);
    for (double t : breakpoints)
        if (t > a && t < b) edges.push_back(t);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // First pass fixes the scale each component is judged against.
    std::vector<double> coarse(ncomp, 0.0), panel(ncomp);
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        gl_panel(f, ncomp, edges[i], edges[i + 1], rule, scratch, panel.data());
        for (int c = 0; c < ncomp; ++c) coarse[c] += panel[c];
    }
    double overall = 0.0;
    for (int c = 0; c < ncomp; ++c) overall = std::max(overall, std::fabs(coarse[c]));
    std::vector<double> scale(ncomp);
    for (int c = 0; c < ncomp; ++c) scale[c] = std::max({std::fabs(coarse[c]), 1e-3 * overall, 1e-300});

    struct Segment {
        double a, b;
        int depth;
    };
    std::vector<Segment> stack;
    for (size_t i = 0; i + 1 < edges.size(); ++i) stack.push_back({edges[i], edges[i + 1], 0});

    const double total_width = b - a;
    std::vector<double> whole(ncomp), left(ncomp), right(ncomp);
    int panels = 0;
    bool budget_hit = false;

    while (!stack.empty()) {
        const Segment seg = stack.back();
        stack.pop_back();
        const double midpt = 0.5 * (seg.a + seg.b);
        gl_panel(f, ncomp, seg.a, seg.b, rule, scratch, whole.data());
        gl_panel(f, ncomp, seg.a, midpt, rule, scratch, left.data());
        gl_panel(f, ncomp, midpt, seg.b, rule, scratch, right.data());
        ++panels;

        const double width_frac = (seg.b - seg.a) / total_width;
        bool ok = true;
        for (int c = 0; c < ncomp; ++c) {
            const double diff = std::fabs(whole[c] - (left[c] + right[c]));
            if (diff > rel_tol * scale[c] * width_frac) {
                ok = false;
                break;
            }
        }
        if (ok || seg.depth >= 48 || panels >= max_panels) {
            if (!ok && panels >= max_panels) budget_hit = true;
            for (int c = 0; c < ncomp; ++c) {
                out.value[c] += left[c] + right[c];
                out.error[c] += std::fabs(whole[c] - (left[c] + right[c]));
            }
        } else {
            stack.push_back({seg.a, midpt, seg.depth + 1});
            stack.push_back({midpt, seg.b, seg.depth + 1});
        }
    }
    out.panels = panels;

    if (budget_hit) {
        for (int c = 0; c < ncomp; ++c)
            if (out.error[c] > rel_tol * scale[c] * 16.0)
                throw QuadratureNotConverged("adaptive panel budget exhausted with error above tolerance");
    }
    return out;
}

}  // namespace aniso
