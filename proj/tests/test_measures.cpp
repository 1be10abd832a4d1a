#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "aniso/measures.hpp"
#include "test_util.hpp"

using namespace aniso;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2Pi = 2.5066282746310005024;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

SetRegion halfspace_as_polytope(const HalfSpaceSet& h) {
    Vector inside = (h.t() - 1.0) * h.omega().components();
    return SetRegion(PolytopeSet({{h.omega(), h.t()}}, inside));
}

}  // namespace

TEST_CASE("half-space closed forms, standard Gaussian") {
    const SpdMatrix id = spd_identity(2);
    for (double t : {-1.3, 0.0, 0.8, 2.5}) {
        const HalfSpaceSet h(Direction(Vector{0.6, 0.8}), t);
        CHECK(std::fabs(halfspace_mass(id, h).value - phi(t)) < 1e-12);
        CHECK(std::fabs(halfspace_perimeter(id, h).value - std::exp(-0.5 * t * t)) < 1e-12);
        const Vector b = halfspace_barycenter(id, h);
        CHECK(std::fabs(b[0] - (-std::exp(-0.5 * t * t) / kSqrt2Pi) * 0.6) < 1e-12);
        CHECK(std::fabs(b[1] - (-std::exp(-0.5 * t * t) / kSqrt2Pi) * 0.8) < 1e-12);
    }
}

TEST_CASE("half-space closed forms, anisotropic") {
    const SpdMatrix a = spd_from_entries(Matrix(2, 2, {4, 0, 0, 1}));
    const HalfSpaceSet h1(Direction(Vector{1.0, 0.0}), 1.0);
    CHECK(halfspace_mass(a, h1).value == doctest::Approx(phi(2.0)).epsilon(1e-13));
    const HalfSpaceSet h0(Direction(Vector{1.0, 0.0}), 0.0);
    CHECK(halfspace_mass(a, h0).value == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(halfspace_perimeter(a, h0).value == doctest::Approx(2.0).epsilon(1e-13));

    // far threshold: the barycenter of nearly the whole space vanishes
    const HalfSpaceSet far(Direction(Vector{0.0, 1.0}), 8.0);
    CHECK(norm(halfspace_barycenter(a, far)) < 1e-13);
}

TEST_CASE("isotropic scaling makes perimeter depend on direction only through mass") {
    const SpdMatrix ai = spd_from_entries(Matrix(3, 3, {2.5, 0, 0, 0, 2.5, 0, 0, 0, 2.5}));
    testutil::Rng rng(3);
    const double t = 0.63;
    const HalfSpaceSet ref(testutil::random_direction(rng, 3), t);
    const double reference = halfspace_perimeter(ai, ref).value;
    const double ref_b = norm(halfspace_barycenter(ai, ref));
    for (int i = 0; i < 10; ++i) {
        const HalfSpaceSet h(testutil::random_direction(rng, 3), t);
        CHECK(std::fabs(halfspace_perimeter(ai, h).value - reference) < 1e-10);
        CHECK(std::fabs(norm(halfspace_barycenter(ai, h)) - ref_b) < 1e-10);
    }

    // distinct eigenvalues: equal mass, visibly different perimeter and |b|
    const SpdMatrix a = spd_from_entries(Matrix(2, 2, {4, 0, 0, 1}));
    const HalfSpaceSet he1(Direction(Vector{1.0, 0.0}), 0.0);
    const HalfSpaceSet he2(Direction(Vector{0.0, 1.0}), 0.0);
    CHECK(halfspace_mass(a, he1).value == doctest::Approx(halfspace_mass(a, he2).value));
    CHECK(std::fabs(halfspace_perimeter(a, he1).value - halfspace_perimeter(a, he2).value) > 1e-3);
    CHECK(std::fabs(norm(halfspace_barycenter(a, he1)) - norm(halfspace_barycenter(a, he2))) > 1e-3);
}

TEST_CASE("mass normalization") {
    QuadratureConfig cfg;
    testutil::Rng rng(71);
    const SetRegion all2(BoxSet({-kInf, -kInf}, {kInf, kInf}));
    for (int trial = 0; trial < 5; ++trial) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        const MeasureResult m = mass(a, all2, cfg);
        CHECK(std::fabs(m.value - 1.0) < 1e-10);
    }
    const SetRegion all3(BoxSet({-kInf, -kInf, -kInf}, {kInf, kInf, kInf}));
    const SpdMatrix a3 = testutil::random_spd(rng, 3);
    CHECK(std::fabs(mass(a3, all3, cfg).value - 1.0) < 1e-10);
}

TEST_CASE("quadrature mass of a half-space matches the closed form") {
    QuadratureConfig cfg;
    testutil::Rng rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + rng.index(2);
        const SpdMatrix a = testutil::random_spd(rng, n);
        const HalfSpaceSet h(testutil::random_direction(rng, n), rng.uniform(-1.5, 1.5));
        const SetRegion poly = halfspace_as_polytope(h);
        CHECK(std::fabs(mass(a, poly, cfg).value - halfspace_mass(a, h).value) < 1e-9);
    }
}

TEST_CASE("box mass against the diagonal product formula") {
    QuadratureConfig cfg;
    const SpdMatrix a = spd_from_entries(Matrix(2, 2, {2.25, 0, 0, 0.49}));
    const SetRegion box(BoxSet({-0.7, 0.1}, {1.2, kInf}));
    const double expected =
        (phi(1.5 * 1.2) - phi(1.5 * -0.7)) * (1.0 - phi(0.7 * 0.1));
    CHECK(std::fabs(mass(a, box, cfg).value - expected) < 1e-9);
}

TEST_CASE("perimeter of a half-space boundary via facets") {
    QuadratureConfig cfg;
    const SpdMatrix id = spd_identity(2);
    const HalfSpaceSet h(Direction(Vector{1.0, 0.0}), 0.0);
    CHECK(halfspace_perimeter(id, h).value == doctest::Approx(1.0).epsilon(1e-13));
    const MeasureResult p = perimeter(id, halfspace_as_polytope(h), cfg);
    CHECK(std::fabs(p.value - 1.0) < 1e-9);
}

TEST_CASE("thin half-strip perimeter reproduces the three boundary integrals") {
    QuadratureConfig cfg;
    const double a = 1.0, b = 0.5, c = 1.0, alpha = 0.35;
    const SpdMatrix mat = spd_from_entries(Matrix(2, 2, {2 * a, 2 * b, 2 * b, 2 * c}));
    const SetRegion strip(BoxSet({-alpha, 0.0}, {alpha, kInf}));

    const double right = testutil::adaptive_simpson(
        [&](double y) { return std::exp(-a * alpha * alpha - 2 * b * alpha * y - c * y * y); }, 0.0, 60.0,
        1e-14);
    const double left = testutil::adaptive_simpson(
        [&](double y) { return std::exp(-a * alpha * alpha + 2 * b * alpha * y - c * y * y); }, 0.0, 60.0,
        1e-14);
    const double bottom = testutil::adaptive_simpson(
        [&](double x) { return std::exp(-a * x * x); }, -alpha, alpha, 1e-14);
    const double expected = mat.sqrt_det() / kSqrt2Pi * (right + left + bottom);

    CHECK(std::fabs(perimeter(mat, strip, cfg).value - expected) < 1e-9);
}

TEST_CASE("square perimeter against the edge closed form") {
    QuadratureConfig cfg;
    const SpdMatrix id = spd_identity(2);
    const SetRegion square(BoxSet({-1.0, -1.0}, {1.0, 1.0}));
    auto edge = [&](double fixed, double lo, double hi) {
        return std::exp(-0.5 * fixed * fixed) * kSqrt2Pi * (phi(hi) - phi(lo));
    };
    const double expected = (2 * edge(1.0, -1.0, 1.0) + 2 * edge(1.0, -1.0, 1.0)) / kSqrt2Pi;
    CHECK(std::fabs(perimeter(id, square, cfg).value - expected) < 1e-9);
}

TEST_CASE("barycenter basics") {
    QuadratureConfig cfg;
    testutil::Rng rng(79);
    const SpdMatrix a = testutil::random_spd(rng, 2);
    const SetRegion all(BoxSet({-kInf, -kInf}, {kInf, kInf}));
    CHECK(norm(barycenter(a, all, cfg)) < 1e-10);

    const HalfSpaceSet h(testutil::random_direction(rng, 2), 0.4);
    const Vector via_quad = barycenter(a, halfspace_as_polytope(h), cfg);
    const Vector closed = halfspace_barycenter(a, h);
    CHECK(norm(via_quad - closed) < 1e-8);
}

TEST_CASE("barycenter transport through sqrt(A)") {
    QuadratureConfig cfg;
    testutil::Rng rng(83);
    const SpdMatrix a = testutil::random_spd(rng, 2);
    const SetRegion e(testutil::random_polygon(rng, 6, 1.4));
    const Vector lhs = barycenter(a, e, cfg);
    const SetRegion mapped = transform(e, a.sqrt_entries());
    const Vector rhs = a.sqrt_inv_entries() * barycenter(spd_identity(2), mapped, cfg);
    CHECK(norm(lhs - rhs) < 1e-7);
}

TEST_CASE("perimeter sandwich") {
    QuadratureConfig cfg;
    const SpdMatrix id = spd_identity(2);
    const SetRegion square(BoxSet({-0.8, -0.5}, {0.6, 0.9}));
    const SandwichTriple t0 = perimeter_sandwich_check(id, square, cfg);
    CHECK(std::fabs(t0.lhs - t0.mid) < 1e-10);
    CHECK(std::fabs(t0.mid - t0.rhs) < 1e-10);

    const SpdMatrix a41 = spd_from_entries(Matrix(2, 2, {4, 0, 0, 1}));
    const SetRegion h(HalfSpaceSet(Direction(Vector{1.0, 0.0}), 0.0));
    const SandwichTriple t1 = perimeter_sandwich_check(a41, h, cfg);
    CHECK(t1.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t1.mid == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t1.rhs == doctest::Approx(2.0).epsilon(1e-12));

    testutil::Rng rng(89);
    for (int trial = 0; trial < 10; ++trial) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        const SetRegion tri(testutil::random_polygon(rng, 3, 1.2));
        const SandwichTriple t = perimeter_sandwich_check(a, tri, cfg);
        CHECK(t.lhs <= t.mid + 1e-8);
        CHECK(t.mid <= t.rhs + 1e-8);
    }
}

TEST_CASE("minkowski enlargement of a half-space") {
    const SetRegion h(HalfSpaceSet(Direction(Vector{0.0, 1.0}), 0.3));
    const SetRegion he = minkowski_enlarge(h, 0.25);
    CHECK(he.as_halfspace()->t() == doctest::Approx(0.55));
}

TEST_CASE("minkowski enlargement area follows the Steiner formula") {
    QuadratureConfig cfg;
    const SetRegion square(BoxSet({-1.0, -1.0}, {1.0, 1.0}));
    const double eps = 0.1;
    const SetRegion enlarged = minkowski_enlarge(square, eps);

    // Lebesgue area by vertex enumeration + shoelace on the support lines
    const PolytopeSet* p = enlarged.as_polytope();
    REQUIRE(p != nullptr);
    std::vector<Vector> verts;
    const auto& cons = p->constraints();
    for (size_t i = 0; i < cons.size(); ++i)
        for (size_t j = i + 1; j < cons.size(); ++j) {
            const double a11 = cons[i].omega[0], a12 = cons[i].omega[1];
            const double a21 = cons[j].omega[0], a22 = cons[j].omega[1];
            const double det = a11 * a22 - a12 * a21;
            if (std::fabs(det) < 1e-12) continue;
            Vector v{(cons[i].t * a22 - cons[j].t * a12) / det, (a11 * cons[j].t - a21 * cons[i].t) / det};
            bool ok = true;
            for (const Constraint& c : cons)
                if (dot(c.omega.components(), v) > c.t + 1e-9) ok = false;
            if (ok) verts.push_back(v);
        }
    // order by angle and apply the shoelace formula
    std::sort(verts.begin(), verts.end(), [](const Vector& a, const Vector& b) {
        return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
    });
    double area = 0.0;
    for (size_t i = 0; i < verts.size(); ++i) {
        const Vector& a = verts[i];
        const Vector& b = verts[(i + 1) % verts.size()];
        area += 0.5 * (a[0] * b[1] - a[1] * b[0]);
    }
    const double steiner = 4.0 + 8.0 * eps + M_PI * eps * eps;
    CHECK(std::fabs(area - steiner) < 4.0 * eps * 1e-4 * 8.0 + 1e-6);

    // mass continuity as eps -> 0
    const SpdMatrix a = spd_from_entries(Matrix(2, 2, {2, 1, 1, 2}));
    const double m0 = mass(a, square, cfg).value;
    const double m1 = mass(a, minkowski_enlarge(square, 1e-6), cfg).value;
    CHECK(std::fabs(m1 - m0) < 1e-4);
    CHECK(m1 >= m0 - 1e-12);
}

TEST_CASE("enlargement quantile gain") {
    QuadratureConfig cfg;
    testutil::Rng rng(97);
    auto quantile = [&](double p) {
        // local inverse via bisection on phi (test-side oracle)
        double lo = -10, hi = 10;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) < p ? lo : hi) = mid;
        }
        return lo;
    };
    for (int trial = 0; trial < 5; ++trial) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        for (double eps : {0.05, 0.1, 0.5}) {
            const HalfSpaceSet h(testutil::random_direction(rng, 2), rng.uniform(-1, 1));
            const double g0 = quantile(halfspace_mass(a, h).value);
            const double g1 = quantile(halfspace_mass(a, *minkowski_enlarge(SetRegion(h), eps).as_halfspace()).value);
            CHECK(g1 - g0 >= eps / a.sqrt_inv_norm() - 1e-7);

            const SetRegion poly(testutil::random_polygon(rng, 6, 1.0));
            const double p0 = quantile(mass(a, poly, cfg).value);
            const double p1 = quantile(mass(a, minkowski_enlarge(poly, eps), cfg).value);
            CHECK(p1 - p0 >= eps / a.sqrt_inv_norm() - 1e-7);
        }
    }
}

TEST_CASE("enlargement against the matched half-space") {
    QuadratureConfig cfg;
    testutil::Rng rng(101);
    auto quantile = [&](double p) {
        double lo = -10, hi = 10;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) < p ? lo : hi) = mid;
        }
        return lo;
    };
    for (int trial = 0; trial < 5; ++trial) {
        const SpdMatrix a = testutil::random_spd(rng, 2);
        const SetRegion e(testutil::random_polygon(rng, 5, 1.1));
        const double me = mass(a, e, cfg).value;
        const Direction omega = testutil::random_direction(rng, 2);
        const double s = norm(a.sqrt_inv_entries() * omega.components());
        const double t = quantile(me) * s;  // gamma_A(H(omega,t)) == gamma_A(E)
        const double eps = 0.2;
        const double lhs = mass(a, minkowski_enlarge(e, eps), cfg).value;
        const double rhs = halfspace_mass(a, HalfSpaceSet(omega, t + eps * s / a.sqrt_inv_norm())).value;
        CHECK(lhs >= rhs - 1e-8);
    }
}

TEST_CASE("flat and tilted height fields against half-space closed forms") {
    QuadratureConfig cfg;
    const SpdMatrix id = spd_identity(2);
    const double radius = 9.0;

    // flat ceiling: the set {y < 0.4}
    {
        const int nn = 257;
        std::vector<double> h(nn, 0.4);
        SubgraphRegion s(Rotation(Matrix::identity(2)), {-radius}, {radius}, {nn}, h, {false, false});
        CHECK(std::fabs(mass(id, SetRegion(s), cfg).value - phi(0.4)) < 1e-8);
        CHECK(std::fabs(perimeter(id, SetRegion(s), cfg).value - std::exp(-0.5 * 0.16)) < 1e-8);
    }

    // tilted ceiling {y < 0.2 + 0.5 z}: a rotated half-space
    {
        const int nn = 513;
        const double slope = 0.5, inter = 0.2;
        std::vector<double> h(nn);
        for (int i = 0; i < nn; ++i) h[i] = inter + slope * (-radius + 2 * radius * i / (nn - 1.0));
        SubgraphRegion s(Rotation(Matrix::identity(2)), {-radius}, {radius}, {nn}, h, {false, false});
        const double t = inter / std::sqrt(1 + slope * slope);
        CHECK(std::fabs(mass(id, SetRegion(s), cfg).value - phi(t)) < 1e-8);
        CHECK(std::fabs(perimeter(id, SetRegion(s), cfg).value - std::exp(-0.5 * t * t)) < 1e-7);
        const HalfSpaceSet href(Direction(Vector{-slope, 1.0}), inter / std::sqrt(1 + slope * slope));
        CHECK(norm(barycenter(id, SetRegion(s), cfg) - halfspace_barycenter(id, href)) < 1e-7);
    }
}

TEST_CASE("three-dimensional tilted height field") {
    QuadratureConfig cfg;
    const SpdMatrix id = spd_identity(3);
    const double radius = 8.5;
    const int nn = 201;
    const double s1 = 0.3, s2 = -0.4, inter = 0.1;
    std::vector<double> h(static_cast<size_t>(nn) * nn);
    for (int i = 0; i < nn; ++i)
        for (int j = 0; j < nn; ++j) {
            const double z1 = -radius + 2 * radius * i / (nn - 1.0);
            const double z2 = -radius + 2 * radius * j / (nn - 1.0);
            h[static_cast<size_t>(i) * nn + j] = inter + s1 * z1 + s2 * z2;
        }
    SubgraphRegion s(Rotation(Matrix::identity(3)), {-radius, -radius}, {radius, radius}, {nn, nn}, h,
                     {false, false, false, false});
    const double t = inter / std::sqrt(1 + s1 * s1 + s2 * s2);
    CHECK(std::fabs(mass(id, SetRegion(s), cfg).value - phi(t)) < 1e-7);
    CHECK(std::fabs(perimeter(id, SetRegion(s), cfg).value - std::exp(-0.5 * t * t)) < 2e-5);
}

TEST_CASE("one-constraint polytopes in dimensions 3 and 4") {
    QuadratureConfig cfg;
    testutil::Rng rng(113);
    for (int n : {3, 4}) {
        const SpdMatrix a = testutil::random_spd(rng, n, 0.5, 3.0);
        const HalfSpaceSet h(testutil::random_direction(rng, n), rng.uniform(-1.0, 1.0));
        const SetRegion poly = halfspace_as_polytope(h);
        CHECK(std::fabs(mass(a, poly, cfg).value - halfspace_mass(a, h).value) < 1e-8);
        CHECK(std::fabs(perimeter(a, poly, cfg).value - halfspace_perimeter(a, h).value) < 1e-8);
        const Vector bq = barycenter(a, poly, cfg);
        CHECK(norm(bq - halfspace_barycenter(a, h)) < 1e-8);
    }
}

TEST_CASE("dimension guards") {
    QuadratureConfig cfg;
    const SpdMatrix a5 = spd_identity(5);
    Vector lo(5, -1.0), hi(5, 1.0);
    CHECK_THROWS_AS(perimeter(a5, SetRegion(BoxSet(lo, hi)), cfg), UnsupportedDimension);
    CHECK_THROWS_AS(minkowski_enlarge(SetRegion(BoxSet(Vector(3, -1.0), Vector(3, 1.0))), 0.1),
                    UnsupportedVariant);
}
