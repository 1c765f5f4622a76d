#include <doctest.h>

#include <numbers>
#include <random>

#include "apollo/metrics.hpp"

using namespace apollo;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("densities") {
    CHECK(metric_density(ConformalMetric::euclidean(), {3, 4, 0}) == 1.0);
    CHECK(metric_density(ConformalMetric::spherical(), {0, 0, 0}) == 2.0);
    CHECK(metric_density(ConformalMetric::hyperbolic(), {0, 2, 0}) == 0.5);
    CHECK(metric_density(ConformalMetric::power_law(0.5), {0, 4, 0}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(metric_density(ConformalMetric::hyperbolic(), {0, -1, 0}), DomainError);
    CHECK(metric_density(ConformalMetric::hyperbolic(3), {0, 0, 4}) == 0.25);
}

TEST_CASE("closed-form volumes") {
    auto unit = circle_from_center_radius(0, 0, 1);
    CHECK(vol_f(ConformalMetric::euclidean(), unit).value == doctest::Approx(kPi));
    CHECK(vol_f(ConformalMetric::spherical(), unit).value == doctest::Approx(2 * kPi));
    auto c = circle_from_center_radius(0, 2, 1);
    CHECK(vol_f(ConformalMetric::hyperbolic(), c).value == doctest::Approx(2 * kPi * (2 / std::sqrt(3.0) - 1)));
    CHECK(vol_f(ConformalMetric::hyperbolic(), c).value == doctest::Approx(0.972012).epsilon(1e-6));
    CHECK(vol_f(ConformalMetric::euclidean(3), sphere_from_center_radius({0, 0, 0}, 1)).value == doctest::Approx(4 * kPi / 3));
    // Whole sphere S^3 has volume 2 pi^2; a ball of huge radius approaches it.
    CHECK(vol_f(ConformalMetric::spherical(3), sphere_from_center_radius({0, 0, 0}, 1e6)).value ==
          doctest::Approx(2 * kPi * kPi).epsilon(1e-5));
    CHECK(vol_f(ConformalMetric::euclidean(), line_from_normal_offset({1, 0, 0}, 1)).infinite());
    CHECK_THROWS_AS(vol_f(ConformalMetric::hyperbolic(), circle_from_center_radius(0, 0.5, 1)), DomainError);
    CHECK(vol_f(ConformalMetric::hyperbolic(), circle_from_center_radius(0, 1, 1)).infinite());
    // Power law with k = 1 is the hyperbolic metric.
    for (double y0 : {1.2, 2.0, 5.0, 1.01}) {
        auto s = circle_from_center_radius(0.3, y0, 1.0);
        CHECK(vol_f(ConformalMetric::power_law(1.0), s).value ==
              doctest::Approx(vol_f(ConformalMetric::hyperbolic(), s).value).epsilon(1e-9));
    }
    // k = 0: Euclidean area; tangent circles stay finite for k < 3/4.
    CHECK(vol_f(ConformalMetric::power_law(0.0), c).value == doctest::Approx(kPi));
    auto tangent = circle_from_center_radius(0, 1, 1);
    auto v = vol_f(ConformalMetric::power_law(0.5), tangent);
    CHECK_FALSE(v.infinite());
    // Integral of 1/y over the unit disk resting on the axis is 4 B(1/2, 3/2) = 2 pi.
    CHECK(v.value == doctest::Approx(2 * kPi).epsilon(1e-10));
}

TEST_CASE("euclidean scaling law") {
    for (double lam : {0.5, 2.0, 3.0}) {
        auto s = circle_from_center_radius(0.1, 0.2, 0.3);
        auto t = circle_from_center_radius(0.1 * lam, 0.2 * lam, 0.3 * lam);
        CHECK(vol_f(ConformalMetric::euclidean(), t).value ==
              doctest::Approx(lam * lam * vol_f(ConformalMetric::euclidean(), s).value).epsilon(1e-14));
    }
}

TEST_CASE("quadrature agrees with closed forms") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-2, 2), R(0.05, 1.5), Rho(0.05, 0.9);
    for (int i = 0; i < 10; ++i) {
        auto s = circle_from_center_radius(U(rng), U(rng), R(rng));
        for (auto m : {ConformalMetric::euclidean(), ConformalMetric::spherical()}) {
            CHECK(vol_quadrature(m, s).value == doctest::Approx(vol_f(m, s).value).epsilon(1e-8));
        }
        double y0 = std::abs(U(rng)) + 0.5;
        auto h = circle_from_center_radius(U(rng), y0, Rho(rng) * y0);
        for (auto m : {ConformalMetric::hyperbolic(), ConformalMetric::power_law(0.5), ConformalMetric::power_law(1.7)}) {
            CHECK(vol_quadrature(m, h).value == doctest::Approx(vol_f(m, h).value).epsilon(1e-8));
        }
    }
    auto sp = sphere_from_center_radius({0.2, -0.1, 1.5}, 0.7);
    for (auto m : {ConformalMetric::euclidean(3), ConformalMetric::spherical(3), ConformalMetric::hyperbolic(3)}) {
        CHECK(vol_quadrature(m, sp).value == doctest::Approx(vol_f(m, sp).value).epsilon(1e-8));
    }
}

TEST_CASE("power law near-boundary fallback") {
    auto s = circle_from_center_radius(0, 1.0, 0.97);
    auto v = vol_f(ConformalMetric::power_law(0.8), s);
    CHECK(v.method == VolResult::Method::quadrature);
    CHECK(v.value == doctest::Approx(vol_quadrature(ConformalMetric::power_law(0.8), s).value).epsilon(1e-8));
}

TEST_CASE("monotone under inclusion") {
    auto big = circle_from_center_radius(0, 2, 1);
    auto small = circle_from_center_radius(0.2, 2.1, 0.5);
    for (auto m : {ConformalMetric::euclidean(), ConformalMetric::spherical(), ConformalMetric::hyperbolic(),
                   ConformalMetric::power_law(0.5)})
        CHECK(vol_f(m, small).value <= vol_f(m, big).value);
}

TEST_CASE("circle-region intersection") {
    auto rect = Region::rectangle(-1, 1, 0, 1);
    CHECK(intersects(circle_from_center_radius(0, 2, 1), rect));
    CHECK_FALSE(intersects(circle_from_center_radius(0, 10, 1), rect));
    CHECK_FALSE(intersects(circle_from_center_radius(0, 0.5, 5), rect));
    CHECK(intersects(circle_from_center_radius(0, 0.5, 0.2), rect));
    CHECK(intersects(circle_from_center_radius(0, 0.5, 0.6), rect));
    CHECK(intersects(line_from_normal_offset({1, 0, 0}, 1), rect));
    CHECK_FALSE(intersects(line_from_normal_offset({1, 0, 0}, 1.5), rect));
    auto tri = Region::triangle();
    CHECK(intersects(line_from_normal_offset({1, 0, 0}, 1), tri));
    CHECK(intersects(circle_from_center_radius(0, 0, 1), tri));
    CHECK(intersects(circle_from_center_radius(0, 2, 1), tri));
    CHECK_FALSE(intersects(circle_from_center_radius(0, -2, 1), tri));
    CHECK_FALSE(intersects(circle_from_center_radius(0, 0, 0.5), tri));
    CHECK(intersects(circle_from_center_radius(0.5, 0.2, 0.05), tri) == false);
    CHECK(intersects(circle_from_center_radius(0.9, 0.5, 0.2), tri));
    // Mirror symmetry of bands.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-3, 3), R(0.01, 2);
    for (int i = 0; i < 500; ++i) {
        double x = U(rng), y = U(rng) + 3, r = R(rng);
        for (const auto& e : {Region::band(2), Region::triangle(4.0), Region::half_strip(1.5)})
            CHECK(intersects(circle_from_center_radius(x, y, r), e) == intersects(circle_from_center_radius(-x, y, r), e));
    }
}

TEST_CASE("region intersection agrees with boundary sampling") {
    // Oracle: sample the circle densely and test membership.
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2.5, 2.5), R(0.05, 2.0);
    int agree = 0, total = 0;
    for (int i = 0; i < 400; ++i) {
        double x = U(rng), y = U(rng) + 1.5, r = R(rng);
        for (const auto& e : {Region::rectangle(-1, 0.5, 0.2, 1.7), Region::triangle(3.0), Region::disk({0.3, 1, 0}, 0.8)}) {
            bool hit = false;
            for (int k = 0; k < 20000 && !hit; ++k) {
                double a = 2 * std::numbers::pi * k / 20000;
                hit = e.contains({x + r * std::cos(a), y + r * std::sin(a), 0});
            }
            bool pred = intersects(circle_from_center_radius(x, y, r), e);
            // Sampling can only miss grazing contacts.
            if (hit) CHECK(pred);
            agree += hit == pred;
            ++total;
        }
    }
    CHECK(agree >= total - 3);
}

TEST_CASE("parsing") {
    CHECK(metric_from_string("power_law:0.5").k == 0.5);
    CHECK(region_from_string("rectangle:-1,1,0,2").name() == "rectangle:-1,1,0,2");
    CHECK(region_from_string("triangle").bounded() == false);
    CHECK_THROWS_AS(region_from_string("blob:1"), ConfigError);
    CHECK_THROWS_AS(metric_from_string("taxicab"), ConfigError);
}
