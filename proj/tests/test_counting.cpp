#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "apollo/counting.hpp"

using namespace apollo;

namespace {

const PackingStore& bounded_store(double T) {
    static std::map<double, PackingStore> cache;
    auto it = cache.find(T);
    if (it == cache.end()) it = cache.emplace(T, generate(PackingSpec::bounded(), GenerationCutoff::curvature(T), 4)).first;
    return it->second;
}

// Independent Euclidean oracle: the circle of radius r about p, as a curve, meets the rectangle.
bool circle_meets_rect(double px, double py, double r, double x0, double x1, double y0, double y1) {
    double dx = std::max({x0 - px, 0.0, px - x1});
    double dy = std::max({y0 - py, 0.0, py - y1});
    double fx = std::max(std::abs(px - x0), std::abs(px - x1));
    double fy = std::max(std::abs(py - y0), std::abs(py - y1));
    return dx * dx + dy * dy <= r * r && r * r <= fx * fx + fy * fy;
}

std::uint64_t brute_count(const PackingStore& s, const ConformalMetric& m, const Region& e, double t) {
    std::uint64_t n = 0;
    for (const auto& r : s.records) {
        if (!intersects(r, e)) continue;
        if (r.b == 0.0) {
            ++n;
            continue;
        }
        double cy = r.c[1] / r.b, rad = 1.0 / std::abs(r.b);
        if (m.half_space() && rad >= cy * (1 - 1e-12)) {
            ++n;
            continue;
        }
        if (vol_f(m, r).value > t) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("power-law fit recovers a synthetic exponent") {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(std::pow(10.0, 0.1 * i));
        y.push_back(3.0 * std::pow(x.back(), 1.3));
    }
    auto f = fit_power_law(x, y);
    CHECK(f.exponent == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(std::exp(f.log_const) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.stderr_ < 1e-10);
    CHECK(f.n_points == 20);

    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 0.05);
    for (auto& v : y) v *= std::exp(noise(rng));
    auto g = fit_power_law(x, y);
    CHECK(std::abs(g.exponent - 1.3) < 4 * g.stderr_ + 1e-3);
    CHECK(g.stderr_ > 0.0);

    CHECK_THROWS_AS(fit_power_law({1, 2, 3}, {1, 2, 3}), FitError);
}

TEST_CASE("geometric grid") {
    auto g = geometric_grid(1.0, 1e-2, 16);
    CHECK(g.size() == 33);
    CHECK(g.front() == doctest::Approx(1.0));
    CHECK(g.back() == doctest::Approx(1e-2));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
    CHECK_THROWS_AS(geometric_grid(1e-2, 1.0), DomainError);
}

TEST_CASE("small counts on the enclosing disk") {
    const auto& s = generate(PackingSpec::bounded(), GenerationCutoff::curvature(3));
    auto e = Region::disk({0, 0, 0}, 1.0);
    CHECK(validity_floor(s, ConformalMetric::euclidean(), e) == doctest::Approx(std::numbers::pi / 9));
    auto c = count_curve(s, ConformalMetric::euclidean(), e, {4.0, 3.0, 1.0, 0.5, 0.35, 0.1});
    REQUIRE(c.t.size() == 5);
    CHECK(c.count == std::vector<std::uint64_t>{0, 1, 1, 3, 3});
    CHECK_THROWS_AS(count_curve(s, ConformalMetric::euclidean(), e, {0.2, 0.1}), CutoffError);
}

TEST_CASE("counts agree with a deeper store on the validity window") {
    const auto& small = bounded_store(2000);
    const auto& big = bounded_store(20000);
    const double x0 = -0.3, x1 = 0.7, y0 = 0.1, y1 = 0.6;
    auto e = Region::rectangle(x0, x1, y0, y1);
    auto m = ConformalMetric::euclidean();
    auto grid = geometric_grid(1e-1, 1e-8, 8);
    auto c = count_curve(small, m, e, grid, 3);
    CHECK(c.t.back() >= c.t_valid_min);
    CHECK(c.t.size() < grid.size());
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        std::uint64_t n = 0;
        for (const auto& r : big.records) {
            double rad = 1.0 / std::abs(r.b);
            if (circle_meets_rect(r.c[0] / r.b, r.c[1] / r.b, rad, x0, x1, y0, y1) && std::numbers::pi * rad * rad > c.t[i]) ++n;
        }
        CHECK(c.count[i] == n);
    }
    auto c1 = count_curve(small, m, e, grid, 1);
    CHECK(c1.count == c.count);
}

TEST_CASE("periodic extension matches a tall window") {
    auto tall = generate(PackingSpec::strip(-1.0, 14.0), GenerationCutoff::curvature(300), 4);
    auto base = generate(PackingSpec::strip(0.0, 2.0), GenerationCutoff::curvature(300), 4);
    auto h = ConformalMetric::hyperbolic();
    SUBCASE("band") {
        auto e = Region::band(5);
        auto grid = geometric_grid(10.0, 1e-3, 8);
        auto c = count_curve(base, h, e, grid);
        REQUIRE(!c.t.empty());
        for (std::size_t i = 0; i < c.t.size(); ++i) CHECK(c.count[i] == brute_count(tall, h, e, c.t[i]));
    }
    SUBCASE("triangle") {
        // Members above height 14 have hyperbolic area below 2pi(1/sqrt(1-1/196)-1) < 0.017.
        auto e = Region::triangle();
        auto grid = geometric_grid(10.0, 0.02, 8);
        auto c = count_curve(base, h, e, grid);
        REQUIRE(!c.t.empty());
        for (std::size_t i = 0; i < c.t.size(); ++i) CHECK(c.count[i] == brute_count(tall, h, e, c.t[i]));
        CHECK(c.infinite_members == 3);
        CHECK(c.count.front() == 3);
    }
}

TEST_CASE("ideal triangle requires the strip") {
    CHECK_THROWS_AS(ideal_triangle_count(bounded_store(2000), {1.0}), DomainError);
    auto s = generate(PackingSpec::strip(0.0, 2.0), GenerationCutoff::curvature(100));
    auto c = ideal_triangle_count(s, geometric_grid(100.0, 0.1, 4));
    CHECK(c.infinite_members == 3);
}

TEST_CASE("band table against direct counts") {
    auto tall = generate(PackingSpec::strip(0.0, 9.0), GenerationCutoff::curvature(800), 4);
    auto base = generate(PackingSpec::strip(0.0, 2.0), GenerationCutoff::curvature(800), 4);
    const double k = 1.0, t = 1e-2;
    auto table = band_tail_experiment(base, k, t, 1, 6, 2);
    REQUIRE(table.rows.size() == 6);
    auto m = ConformalMetric::power_law(k);
    std::uint64_t cum = 0;
    for (int n = 1; n <= 6; ++n) {
        const auto& row = table.row(n);
        std::uint64_t all = brute_count(tall, m, Region::band(n), t);
        // x = +-1, plus the unit circle touching E_1 at i.
        CHECK(row.infinite == (n == 1 ? 3u : 2u));
        CHECK(row.count + row.infinite == all);
        cum += row.count;
        CHECK(row.cumulative == cum);
        std::uint64_t cmp = brute_count(tall, m, Region::band(1), t * std::pow(n, -2 * k)) - 3;
        CHECK(row.comparison == cmp);
    }
    CHECK(table.injection_violations().empty());
    CHECK(table.tail_fraction(6) == 0.0);
    auto again = band_tail_experiment(base, k, t, 1, 6, 1);
    for (int n = 1; n <= 6; ++n) CHECK(again.row(n).count == table.row(n).count);
    CHECK_THROWS_AS(band_tail_experiment(base, k, 1e-7, 1, 6), CutoffError);
}

TEST_CASE("c_A plateau on a synthetic curve") {
    CountCurve c;
    for (double t : geometric_grid(1.0, 1e-6, 16)) {
        c.t.push_back(t);
        c.count.push_back(static_cast<std::uint64_t>(std::llround(50.0 * std::pow(t, -0.65))));
    }
    auto est = estimate_ca(c, 2.0, 1.3);
    CHECK(est.c_a == doctest::Approx(25.0).epsilon(1e-3));
    CHECK(std::abs(est.plateau_slope) < 1e-3);
    CHECK_THROWS_AS(estimate_ca(c, 2.0, 1.0), FitError);
    auto f = fit_exponent(c);
    CHECK(f.exponent == doctest::Approx(0.65).epsilon(1e-4));
}
