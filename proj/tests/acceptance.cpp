// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Tolerances are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "aniso/gaussline.hpp"
#include "aniso/isoperimetry.hpp"
#include "aniso/measures.hpp"
#include "aniso/oracle.hpp"
#include "aniso/symmetrize.hpp"
#include "test_util.hpp"

using namespace aniso;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.5066282746310005024;

namespace {

const QuadratureConfig cfg;
int g_failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, label, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename Fn>
void guarded(int id, const char* label, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
        fn();
    } catch (const std::exception& err) {
        report(id, label, false, std::string("exception: ") + err.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("      [%.1f s]\n", secs);
}

SetRegion one_constraint_polytope(const HalfSpaceSet& h) {
    Vector inside = (h.t() - 1.0) * h.omega().components();
    return SetRegion(PolytopeSet({{h.omega(), h.t()}}, inside));
}

// --- criterion 1: half-space closed forms vs quadrature and sampling ----

void criterion_1() {
    testutil::Rng rng(1001);
    double worst = 0.0, worst_mc = 0.0;
    bool pass = true;
    for (int c = 0; c < 100; ++c) {
        const int n = 2 + c % 3;
        const SpdMatrix a = testutil::random_spd(rng, n);
        const HalfSpaceSet h(testutil::random_direction(rng, n), rng.uniform(-1.5, 1.5));
        const SetRegion poly = one_constraint_polytope(h);

        const double dm = std::fabs(mass(a, poly, cfg).value - halfspace_mass(a, h).value);
        const double dp = std::fabs(perimeter(a, poly, cfg).value - halfspace_perimeter(a, h).value);
        const Vector db = barycenter(a, poly, cfg) - halfspace_barycenter(a, h);
        worst = std::max({worst, dm, dp, norm(db)});
        if (dm > 1e-8 || dp > 1e-8 || norm(db) > 1e-8) pass = false;

        const McEstimate mc = mc_mass(a, poly, 1000000, 5000 + c);
        const double dmc = std::fabs(mc.value - halfspace_mass(a, h).value);
        worst_mc = std::max(worst_mc, dmc / (mc.std_error + 1e-12));
        if (dmc > 4.0 * mc.std_error + 1e-12) pass = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "worst closed-form gap %.2e (tol 1e-8), worst MC pull %.2f (tol 4)",
                  worst, worst_mc);
    report(1, "half-space closed forms", pass, buf);
}

// --- criterion 2: standard Gaussian specialization ----------------------

void criterion_2() {
    testutil::Rng rng(1002);
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
        const int n = 1 + rng.index(4);
        const SpdMatrix id = spd_identity(n);
        const Direction omega = testutil::random_direction(rng, n);
        const double t = rng.uniform(-2.5, 2.5);
        const HalfSpaceSet h(omega, t);
        worst = std::max(worst, std::fabs(halfspace_mass(id, h).value - std_normal_cdf(t)));
        worst = std::max(worst, std::fabs(halfspace_perimeter(id, h).value - std::exp(-0.5 * t * t)));
        const Vector b = halfspace_barycenter(id, h);
        const Vector expect = (-std::exp(-0.5 * t * t) / kSqrt2Pi) * omega.components();
        worst = std::max(worst, norm(b - expect));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worst gap %.2e (tol 1e-12)", worst);
    report(2, "standard Gaussian specialization", worst <= 1e-12, buf);
}

// --- criterion 3: isoperimetric inequality and equality cases -----------

void criterion_3() {
    testutil::Rng rng(1003);
    bool pass = true;
    double worst_rel = kInf, worst_eq = 0.0;
    std::vector<SpdMatrix> mats;
    for (int i = 0; i < 20; ++i) mats.push_back(testutil::random_spd(rng, 2));

    for (int p = 0; p < 200; ++p) {
        const SetRegion poly(testutil::random_polygon(rng, 3 + rng.index(6), rng.uniform(0.6, 2.0),
                                                      {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)}));
        for (const SpdMatrix& a : mats) {
            const IsoResult res = iso_check(a, poly, cfg);
            const double allowance = 10.0 * res.perimeter.error_estimate;
            if (res.deficit < -allowance) pass = false;
            worst_rel = std::min(worst_rel, res.deficit + allowance);
        }
    }
    for (int p = 0; p < 20; ++p) {
        const SpdMatrix& a = mats[p];
        const SetRegion box(BoxSet({rng.uniform(-2, -0.1), rng.uniform(-2, -0.1)},
                                   {rng.uniform(0.1, 2), rng.uniform(0.1, 2)}));
        const IsoResult bres = iso_check(a, box, cfg);
        if (bres.deficit < -10.0 * bres.perimeter.error_estimate) pass = false;
        const HalfSpaceSet h(testutil::random_direction(rng, 2), rng.uniform(-1, 1));
        const IsoResult hres = iso_check(a, SetRegion(h), cfg);
        if (hres.deficit < -10.0 * hres.perimeter.error_estimate) pass = false;
    }
    for (double m : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const SpdMatrix& a = mats[static_cast<int>(m * 19)];
        const IsoResult res = iso_check(a, SetRegion(extremal_halfspace(a, m)), cfg);
        worst_eq = std::max(worst_eq, std::fabs(res.deficit));
        if (std::fabs(res.deficit) > 1e-9) pass = false;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "4000 polygon checks, min slack %.2e (needs >= 0), extremal |deficit| %.2e (tol 1e-9)",
                  worst_rel, worst_eq);
    report(3, "isoperimetric inequality", pass, buf);
}

// --- criterion 4: epsilon-enlargement lower bound ------------------------

void criterion_4() {
    testutil::Rng rng(1004);
    bool pass = true;
    double min_slack = kInf;
    for (int c = 0; c < 10; ++c) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        for (double eps : {0.05, 0.1, 0.5}) {
            const HalfSpaceSet h(testutil::random_direction(rng, 2), rng.uniform(-1, 1));
            const double g0 = std_normal_quantile(halfspace_mass(a, h).value);
            const double g1 =
                std_normal_quantile(halfspace_mass(a, *minkowski_enlarge(SetRegion(h), eps).as_halfspace()).value);
            const double slack = (g1 - g0) - eps / a.sqrt_inv_norm();
            min_slack = std::min(min_slack, slack);
            if (slack < -1e-7) pass = false;
        }
    }
    for (int c = 0; c < 30; ++c) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        const SetRegion poly(testutil::random_polygon(rng, 4 + rng.index(5), rng.uniform(0.5, 1.5)));
        const double m0 = mass(a, poly, cfg).value;
        for (double eps : {0.05, 0.1, 0.5}) {
            const double m1 = mass(a, minkowski_enlarge(poly, eps), cfg).value;
            const double slack = std_normal_quantile(std::min(m1, 1.0 - 1e-16)) - std_normal_quantile(m0) -
                                 eps / a.sqrt_inv_norm();
            min_slack = std::min(min_slack, slack);
            if (slack < -1e-7) pass = false;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "min quantile-gain slack %.2e (tol -1e-7)", min_slack);
    report(4, "epsilon-enlargement bound", pass, buf);
}

// --- criteria 5-7: the random symmetrization family ---------------------

struct FamilyOutcome {
    bool conservation = true;
    bool slicewise = true;
    bool thm12 = true;
    double worst_drift = 0.0;
    int violations = 0;
    double min_slack = kInf;
    int cases = 0;
};

FamilyOutcome run_family() {
    testutil::Rng rng(1005);
    FamilyOutcome out;
    for (int c = 0; c < 100; ++c) {
        const int n = c % 10 == 9 ? 3 : 2;
        const SpdMatrix a = testutil::random_spd(rng, n);
        const Direction u = testutil::random_direction(rng, n);
        SetRegion e = [&]() -> SetRegion {
            if (n == 3) {
                Vector lo{rng.uniform(-1.5, -0.2), rng.uniform(-1.5, -0.2), rng.uniform(-1.5, -0.2)};
                Vector hi{rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)};
                return SetRegion(BoxSet(lo, hi));
            }
            if (c % 2 == 0) return SetRegion(testutil::random_polygon(rng, 3 + rng.index(6), 1.4));
            return SetRegion(BoxSet({rng.uniform(-1.5, -0.2), rng.uniform(-1.5, -0.2)},
                                    {rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)}));
        }();
        const SymmetrizationReport rep =
            symmetrization_report(a, e, u, cfg, {n == 3 ? 129 : 257});
        ++out.cases;

        const double drift = std::fabs(rep.mass_before - rep.mass_after);
        out.worst_drift = std::max(out.worst_drift, drift - rep.mass_error);
        if (drift > rep.mass_error + 1e-12) out.conservation = false;

        out.violations += rep.slice_decrease_violations;
        if (rep.slice_decrease_violations > 0 || rep.slice_samples < 256) out.slicewise = false;

        const double tol = 10.0 * (rep.perimeter_before.error_estimate +
                                   rep.perimeter_after.error_estimate + rep.mass_error);
        out.min_slack = std::min(out.min_slack, rep.thm12_slack + tol);
        if (rep.thm12_slack < -tol) out.thm12 = false;
    }
    return out;
}

void criteria_5_6_7() {
    const FamilyOutcome fam = run_family();

    // symmetric-difference contraction on box pairs
    testutil::Rng rng(1006);
    bool contraction = true;
    double min_gap = kInf;
    for (int c = 0; c < 30; ++c) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        auto rand_box = [&]() {
            return BoxSet({rng.uniform(-1.5, -0.1), rng.uniform(-1.5, -0.1)},
                          {rng.uniform(0.1, 1.5), rng.uniform(0.1, 1.5)});
        };
        auto [orig, sym] = symmetric_difference_mass_pair(SetRegion(rand_box()), SetRegion(rand_box()), a, cfg);
        min_gap = std::min(min_gap, orig - sym);
        if (orig < sym - 1e-8) contraction = false;
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d cases, worst drift-over-error %.2e, min sym-diff gap %.2e",
                  fam.cases, fam.worst_drift, min_gap);
    report(5, "symmetrization mass conservation + contraction", fam.conservation && contraction, buf);
    std::snprintf(buf, sizeof(buf), "%d slice violations at tol 1e-10 over %d cases (>=256 samples each)",
                  fam.violations, fam.cases);
    report(6, "slicewise perimeter decrease", fam.slicewise, buf);
    std::snprintf(buf, sizeof(buf), "min slack-plus-allowance %.2e (needs >= 0)", fam.min_slack);
    report(7, "perimeter bound with barycenter term", fam.thm12, buf);
}

// --- criterion 8: decrease along eigenvector directions -----------------

void criterion_8() {
    testutil::Rng rng(1008);
    bool pass = true;
    double min_slack = kInf;
    for (int c = 0; c < 50; ++c) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        const Direction u(a.eigenvector(rng.index(2)));
        SetRegion e = c % 2 == 0 ? SetRegion(testutil::random_polygon(rng, 3 + rng.index(5), 1.3))
                                 : SetRegion(BoxSet({rng.uniform(-1.4, -0.2), rng.uniform(-1.4, -0.2)},
                                                    {rng.uniform(0.2, 1.4), rng.uniform(0.2, 1.4)}));
        const SymmetrizationReport rep = symmetrization_report(a, e, u, cfg, {257});
        const double tol =
            10.0 * (rep.perimeter_before.error_estimate + rep.perimeter_after.error_estimate);
        const double slack = rep.perimeter_before.value + tol - rep.perimeter_after.value;
        min_slack = std::min(min_slack, slack);
        if (rep.perimeter_after.value > rep.perimeter_before.value + tol) pass = false;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "min decrease slack %.2e over 50 cases (needs >= 0)", min_slack);
    report(8, "eigen-direction perimeter decrease", pass, buf);
}

// --- criterion 9: thin-strip first-order expansion -----------------------

void criterion_9() {
    const double b = 0.5, c = 1.0;
    const CounterexampleScan scan = counterexample_scan(1.0, b, c, {0.2, 0.1, 0.05, 0.025}, cfg, 801);

    bool strict = true;
    for (const CounterexampleRow& row : scan.rows)
        if (row.alpha <= 0.1 + 1e-12 && !(row.perimeter_e < row.perimeter_es)) strict = false;

    const double rel1 =
        std::fabs(scan.slope1_extrapolated - scan.slope1_analytic) / std::fabs(scan.slope1_analytic);
    const double rele = std::fabs(scan.error_term_slope_extrapolated - scan.error_term_slope_analytic) /
                        std::fabs(scan.error_term_slope_analytic);
    const bool h_ok = std::fabs(scan.h0) < 1e-8 && std::fabs(scan.h_prime_0 - (-2.0 * b / c)) < 1e-5;

    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "strict increase %s, slope1 rel err %.3f%% (tol 5%%), error-term slope rel err %.3f%%, "
                  "h0 %.1e, h'(0)%+.6f",
                  strict ? "yes" : "NO", 100 * rel1, 100 * rele, scan.h0, scan.h_prime_0);
    report(9, "thin-strip expansion", strict && rel1 < 0.05 && rele < 0.05 && h_ok, buf);
}

// --- criterion 10: direction audit ---------------------------------------

void criterion_10() {
    testutil::Rng rng(1010);
    bool equiv = true;
    int eigen_count = 0;
    for (int c = 0; c < 1000; ++c) {
        const int n = 2 + rng.index(2);
        const SpdMatrix a = testutil::random_spd(rng, n);
        const Direction u =
            c % 4 == 0 ? Direction(a.eigenvector(rng.index(n))) : testutil::random_direction(rng, n);
        const bool is_eigen = eigenspace_membership(a, u, 1e-9).has_value();
        const bool grad_zero = norm(direction_gradient(a, u)) <= 1e-10;
        if (is_eigen != grad_zero) equiv = false;
        if (is_eigen) ++eigen_count;
    }

    int strict_hits = 0, probes = 0;
    testutil::Rng rng2(1011);
    while (probes < 20) {
        const int n = probes % 5 == 4 ? 3 : 2;
        const SpdMatrix a = testutil::random_spd(rng2, n);
        const Direction u = testutil::random_direction(rng2, n);
        if (norm(direction_gradient(a, u)) <= 0.1) continue;
        ++probes;
        const double alpha = 0.05;
        Vector lo(n, -alpha), hi(n, alpha);
        lo[n - 1] = 0.0;
        hi[n - 1] = kInf;
        const Rotation o = rotation_to_minus_en(u);
        const SetRegion thin = transform(SetRegion(BoxSet(lo, hi)), o.entries());
        const SymmetrizationReport rep = symmetrization_report(a, thin, u, cfg, {n == 3 ? 129 : 257});
        if (rep.perimeter_after.value > rep.perimeter_before.value) ++strict_hits;
    }

    char buf[128];
    std::snprintf(buf, sizeof(buf), "gradient<->eigen match on 1000 draws (%d eigen), %d/20 strict increases",
                  eigen_count, strict_hits);
    report(10, "direction audit", equiv && strict_hits == 20 && eigen_count >= 100, buf);
}

// --- criterion 11: sandwich bounds ---------------------------------------

void criterion_11() {
    testutil::Rng rng(1012);
    bool pass = true;
    double min_gap = kInf;
    for (int c = 0; c < 50; ++c) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        const SetRegion poly(testutil::random_polygon(rng, 3 + rng.index(6), rng.uniform(0.6, 1.6)));
        const SandwichTriple t = perimeter_sandwich_check(a, poly, cfg);
        min_gap = std::min({min_gap, t.mid - t.lhs, t.rhs - t.mid});
        if (t.lhs > t.mid + 1e-8 || t.mid > t.rhs + 1e-8) pass = false;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "min one-sided gap %.2e over 50 cases (tol -1e-8)", min_gap);
    report(11, "perimeter sandwich bounds", pass, buf);
}

// --- criterion 12: oracle cross-checks ------------------------------------

void criterion_12() {
    testutil::Rng rng(1013);
    bool pass = true;
    double worst_pull = 0.0, worst_perim = 0.0;

    for (int c = 0; c < 8; ++c) {
        const int n = 2 + c % 2;
        const SpdMatrix a = testutil::random_spd(rng, n);
        SetRegion e = [&]() -> SetRegion {
            if (n == 3)
                return SetRegion(BoxSet({rng.uniform(-1.4, -0.2), rng.uniform(-1.4, -0.2), rng.uniform(-1.4, -0.2)},
                                        {rng.uniform(0.2, 1.4), rng.uniform(0.2, 1.4), rng.uniform(0.2, 1.4)}));
            return SetRegion(testutil::random_polygon(rng, 3 + rng.index(6), 1.3));
        }();
        const McEstimate m = mc_mass(a, e, 1000000, 9000 + c);
        const double exact_m = mass(a, e, cfg).value;
        worst_pull = std::max(worst_pull, std::fabs(m.value - exact_m) / (m.std_error + 1e-12));
        if (std::fabs(m.value - exact_m) > 4.0 * m.std_error + 1e-12) pass = false;

        const std::vector<McEstimate> bs = mc_barycenter(a, e, 1000000, 9100 + c);
        const Vector bq = barycenter(a, e, cfg);
        for (int i = 0; i < n; ++i) {
            worst_pull = std::max(worst_pull, std::fabs(bs[i].value - bq[i]) / (bs[i].std_error + 1e-12));
            if (std::fabs(bs[i].value - bq[i]) > 4.0 * bs[i].std_error + 1e-12) pass = false;
        }
    }

    // rasterized 2D perimeter vs the facet/graph paths
    {
        const SpdMatrix a = spd_from_entries(Matrix(2, 2, {2, 1, 1, 2}));
        const SetRegion square(BoxSet({-0.7, -0.4}, {0.6, 0.9}));
        const double rel1 = std::fabs(grid_perimeter_2d(a, square, 4096) - perimeter(a, square, cfg).value) /
                            perimeter(a, square, cfg).value;
        const SetRegion strip(BoxSet({-0.1, 0.0}, {0.1, kInf}));
        const SubgraphRegion sym = ehrhard_symmetrize(a, strip, Direction(Vector{0.0, -1.0}), {513}, cfg);
        const double pg = perimeter(a, SetRegion(sym), cfg).value;
        const double rel2 = std::fabs(grid_perimeter_2d(a, SetRegion(sym), 4096) - pg) / pg;
        testutil::Rng prng(77);
        const SetRegion poly(testutil::random_polygon(prng, 6, 1.2));
        const double pp = perimeter(a, poly, cfg).value;
        const double rel3 = std::fabs(grid_perimeter_2d(a, poly, 4096) - pp) / pp;
        worst_perim = std::max({rel1, rel2, rel3});
        if (worst_perim > 0.03) pass = false;
    }

    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst MC pull %.2f (tol 4), worst raster rel err %.2f%% (tol 3%%)",
                  worst_pull, 100 * worst_perim);
    report(12, "oracle independence cross-checks", pass, buf);
}

}  // namespace

int main() {
    guarded(1, "half-space closed forms", criterion_1);
    guarded(2, "standard Gaussian specialization", criterion_2);
    guarded(3, "isoperimetric inequality", criterion_3);
    guarded(4, "epsilon-enlargement bound", criterion_4);
    guarded(5, "symmetrization family", criteria_5_6_7);
    guarded(8, "eigen-direction perimeter decrease", criterion_8);
    guarded(9, "thin-strip expansion", criterion_9);
    guarded(10, "direction audit", criterion_10);
    guarded(11, "perimeter sandwich bounds", criterion_11);
    guarded(12, "oracle independence cross-checks", criterion_12);

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criterion group(s) failed\n", g_failures);
    return 1;
}
