#include <doctest.h>

#include <random>

#include "apollo/inversive.hpp"
#include "apollo/mobius.hpp"

using namespace apollo;

namespace {

ExactQuadruple bounded_root() {
    return make_quadruple(std::vector<ExactSphere>{{-1, 1, {0, 0, 0}}, {2, 0, {1, 0, 0}}, {2, 0, {-1, 0, 0}}, {3, 1, {0, 2, 0}}},
                          2);
}

ExactQuadruple strip_root() {
    return make_quadruple(std::vector<ExactSphere>{{0, 2, {1, 0, 0}}, {0, 2, {-1, 0, 0}}, {1, -1, {0, 0, 0}}, {1, 3, {0, -2, 0}}},
                          2);
}

// Independent tangency check from centers and radii.
bool tangent_geometrically(const OrientedSphere& u, const OrientedSphere& v) {
    double d = std::hypot(center(u)[0] - center(v)[0], center(u)[1] - center(v)[1]);
    double ru = radius(u), rv = radius(v);
    return std::abs(d - (ru + rv)) < 1e-9 || std::abs(d - std::abs(ru - rv)) < 1e-9;
}

}  // namespace

TEST_CASE("circle from center and radius is normalized") {
    auto c = circle_from_center_radius(0.3, -1.7, 0.25);
    CHECK(quadratic_form(c) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(center(c)[0] == doctest::Approx(0.3));
    CHECK(center(c)[1] == doctest::Approx(-1.7));
    CHECK(radius(c) == doctest::Approx(0.25));
    CHECK(power(c, {0.3, -1.7, 0}) < 0.0);
    CHECK(power(c, {1.3, -1.7, 0}) > 0.0);
    auto neg = circle_from_center_radius(0.0, 0.0, 1.0, -1);
    CHECK(power(neg, {0.0, 0.0, 0}) > 0.0);
    CHECK(power(neg, {2.0, 0.0, 0}) < 0.0);
}

TEST_CASE("line interior follows its normal") {
    auto l = line_from_normal_offset({0, 2, 0}, 1.0);
    CHECK(quadratic_form(l) == doctest::Approx(1.0));
    CHECK(power(l, {0, 2, 0}) < 0.0);
    CHECK(power(l, {0, 0, 0}) > 0.0);
}

TEST_CASE("product of unnormalized vectors is rejected") {
    OrientedSphere bad{1.0, 1.0, {2.0, 0.0, 0.0}};
    auto c = circle_from_center_radius(0, 0, 1);
    CHECK_THROWS_AS(inversive_product(bad, c), NormalizationError);
}

TEST_CASE("tangent circles have product -1 and products match geometry") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3, 3), R(0.1, 2);
    for (int k = 0; k < 200; ++k) {
        double x = U(rng), y = U(rng), r = R(rng), s = R(rng), th = U(rng);
        auto a = circle_from_center_radius(x, y, r);
        auto b = circle_from_center_radius(x + (r + s) * std::cos(th), y + (r + s) * std::sin(th), s);
        CHECK(inversive_product(a, b) == doctest::Approx(-1.0).epsilon(1e-10));
        // <u,v> = -(d^2 - r^2 - s^2) / (2 r s) for positively oriented circles.
        double d = U(rng) + 4.0;
        auto c = circle_from_center_radius(x + d, y, s);
        double expect = -(d * d - r * r - s * s) / (2 * r * s);
        CHECK(inversive_product(a, c) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("bounded root is a Descartes quadruple") {
    auto q = bounded_root();
    CHECK_NOTHROW(validate_quadruple(q));
    CHECK(descartes_identity_holds(q));
    auto f = to_float(q);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) CHECK(tangent_geometrically(f[i], f[j]));
}

TEST_CASE("reflecting the outer circle gives curvature 15") {
    auto q = bounded_root();
    auto r = descartes_reflect(q, 0);
    CHECK(r[0].b == 15);
    CHECK(r.incoming == 0);
    CHECK_NOTHROW(validate_quadruple(r));
    CHECK(descartes_identity_holds(r));
    auto v = to_float(r[0]);
    CHECK(radius(v) == doctest::Approx(1.0 / 15));
    // Reflecting twice returns the original circle.
    CHECK(descartes_reflect(r, 0)[0] == q[0]);
}

TEST_CASE("random reflection words keep the invariants") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto q = bounded_root();
        int last = -1;
        for (int step = 0; step < 12; ++step) {
            int i;
            do i = static_cast<int>(rng() % 4);
            while (i == last);
            q = descartes_reflect(q, i);
            last = i;
        }
        CHECK_NOTHROW(validate_quadruple(q));
        CHECK(descartes_identity_holds(q));
        auto f = to_float(q);
        for (int i = 0; i < 4; ++i) CHECK(quadratic_form(f[i]) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("strip dual circles") {
    auto q = to_float(strip_root());
    CHECK_NOTHROW(validate_quadruple(q));
    auto d3 = dual_sphere(q, 3);
    CHECK(d3.b == doctest::Approx(0.0).epsilon(1e-15));
    // Line y = 0.
    CHECK(std::abs(d3.c[1]) == doctest::Approx(1.0));
    CHECK(d3.bhat == doctest::Approx(0.0).epsilon(1e-15));
    auto d0 = dual_sphere(q, 0);
    CHECK(radius(d0) == doctest::Approx(1.0));
    CHECK(center(d0)[0] == doctest::Approx(-1.0));
    CHECK(center(d0)[1] == doctest::Approx(-1.0));
    // Duals are orthogonal to the three circles they pass through.
    for (int i = 0; i < 4; ++i) {
        auto d = dual_sphere(q, i);
        for (int j = 0; j < 4; ++j) {
            if (j == i) continue;
            CHECK(inversive_product(d, q[j]) == doctest::Approx(0.0).epsilon(1e-12));
        }
        if (q[i].b != 0.0) CHECK(power(d, center(q[i])) < 0.0);
    }
}

TEST_CASE("sphere3d root is a Soddy configuration") {
    const double h = std::sqrt(3.0) / 3.0;
    std::vector<OrientedSphere> s{sphere_from_center_radius({0, 0, 0}, 1.0, -1), sphere_from_center_radius({0.5, 0, 0}, 0.5),
                                  sphere_from_center_radius({-0.5, 0, 0}, 0.5),
                                  sphere_from_center_radius({0, h, 1.0 / 3.0}, 1.0 / 3.0),
                                  sphere_from_center_radius({0, h, -1.0 / 3.0}, 1.0 / 3.0)};
    auto q = make_quadruple(s, 3);
    CHECK_NOTHROW(validate_quadruple(q, 1e-12));
    auto r = descartes_reflect(q, 0);
    // Soddy: b' = sum of others - b = 2+2+3+3 - (-1) = 11.
    CHECK(r[0].b == doctest::Approx(11.0));
    CHECK_NOTHROW(validate_quadruple(r, 1e-10));
}

TEST_CASE("inversion maps the quadruple to its reflection") {
    auto q = bounded_root();
    for (int i = 0; i < 4; ++i) {
        auto m = MobiusMap::inversion(dual_direction(q, i));
        CHECK(m.anti_conformal());
        CHECK(m.orthogonality_defect() < 1e-12);
        auto img = apply_exact(m, q[i]);
        REQUIRE(img.has_value());
        CHECK(*img == reflected_slot(q, i));
        for (int j = 0; j < 4; ++j) {
            if (j == i) continue;
            auto fixed = apply_exact(m, q[j]);
            REQUIRE(fixed.has_value());
            CHECK(*fixed == q[j]);
        }
        auto mm = m * m;
        CHECK(apply_exact(mm, q[i]).value() == q[i]);
        CHECK_FALSE(mm.anti_conformal());
    }
}

TEST_CASE("translation and inverse") {
    auto t = MobiusMap::translation({0.5, -2.0, 0.0});
    auto c = circle_from_center_radius(1.0, 1.0, 0.3);
    auto img = apply(t, c);
    CHECK(center(img)[0] == doctest::Approx(1.5));
    CHECK(center(img)[1] == doctest::Approx(-1.0));
    CHECK(radius(img) == doctest::Approx(0.3));
    auto back = apply(t.inverse(), img);
    CHECK(back.b == doctest::Approx(c.b));
    CHECK(back.bhat == doctest::Approx(c.bhat));
    auto te = MobiusMap::translation_exact({0, 2, 0});
    auto s = strip_root();
    auto moved = apply_exact(te, s[2]);
    REQUIRE(moved.has_value());
    CHECK(moved->b == 1);
    CHECK(moved->c[1] == 2);
}
