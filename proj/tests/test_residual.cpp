#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "apollo/residual.hpp"

using namespace apollo;

namespace {

const Region kUnit = Region::disk({0, 0, 0}, 1.0);

bool meets(const CoverDisk& d, const Region& e) {
    return distance_range(e, {d.center[0], d.center[1], 0.0}).first <= d.diameter / 2 * (1 + 1e-12) + 1e-12;
}

}  // namespace

TEST_CASE("level zero cover is the root's dual circles") {
    auto c = gap_cover(PackingSpec::bounded(), kUnit, 0);
    REQUIRE(c.disks.size() == 4);
    auto duals = dual_circles(make_quadruple(PackingSpec::bounded().root_float(), 2));
    int matched = 0;
    for (const auto& w : duals) {
        OrientedSphere g = -1.0 * w;
        bool hit = false;
        for (const auto& d : c.disks) {
            if (g.b > 0 && std::abs(d.diameter - 2 / g.b) < 1e-12 && std::abs(d.center[0] - g.c[0] / g.b) < 1e-12 &&
                std::abs(d.center[1] - g.c[1] / g.b) < 1e-12)
                hit = true;
            // the half-plane gap below the two curvature-2 circles is clipped to the unit disk
            if (g.b == 0 && d.diameter == 2.0 && d.center == Vec2{0, 0}) hit = true;
        }
        matched += hit;
    }
    CHECK(matched == 4);
}

TEST_CASE("cover sizes and refinement") {
    double prev = 1e300;
    for (int L = 0; L <= 8; ++L) {
        auto c = gap_cover(PackingSpec::bounded(), kUnit, L);
        CHECK(c.disks.size() == static_cast<std::size_t>(4 * std::pow(3, L)));
        CHECK(c.max_diameter() <= prev);
        prev = c.max_diameter();
    }
    CHECK(hausdorff_sum(GapCover{0, "", {{{0, 0}, 0.3}}}, 1.0) == doctest::Approx(0.3));
    CHECK_THROWS_AS(gap_cover(PackingSpec::bounded(), kUnit, -1), DomainError);
    CHECK_THROWS_AS(gap_cover(PackingSpec::sphere3d(), kUnit, 2), DomainError);
}

TEST_CASE("sums bracket the dimension") {
    std::vector<double> s1, s2;
    for (int L = 4; L <= 10; ++L) {
        auto c = gap_cover(PackingSpec::bounded(), kUnit, L);
        s1.push_back(hausdorff_sum(c, 1.0));
        s2.push_back(hausdorff_sum(c, 2.0));
    }
    for (std::size_t i = 1; i < s1.size(); ++i) {
        CHECK(s1[i] > s1[i - 1]);
        CHECK(s2[i] < s2[i - 1]);
    }
}

TEST_CASE("region pruning equals filtering the full cover") {
    auto full = gap_cover(PackingSpec::bounded(), kUnit, 7);
    auto a = Region::rectangle(-1, 0, -1, 1);
    auto pruned = gap_cover(PackingSpec::bounded(), a, 7, 3);
    std::vector<std::pair<double, double>> x, y;
    for (const auto& d : full.disks)
        if (meets(d, a)) x.emplace_back(d.center[0] + d.center[1] * 1e3, d.diameter);
    for (const auto& d : pruned.disks) y.emplace_back(d.center[0] + d.center[1] * 1e3, d.diameter);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    CHECK(x == y);
    auto serial = gap_cover(PackingSpec::bounded(), a, 7, 1);
    CHECK(serial.disks.size() == pruned.disks.size());
    CHECK(hausdorff_sum(serial, 1.3) == hausdorff_sum(pruned, 1.3));
}

TEST_CASE("residual samples are covered") {
    auto spec = PackingSpec::bounded();
    auto pts = residual_samples(spec, 10000, 24, 7);
    for (int L : {3, 6, 9}) {
        auto c = gap_cover(spec, kUnit, L, 4);
        CoverIndex idx(c);
        std::size_t missed = 0;
        for (const auto& p : pts)
            if (!idx.covers(p)) ++missed;
        CHECK(missed == 0);
        // centers of members are interior points, never in a gap disk
        CHECK_FALSE(idx.covers({0.5, 0.0}));
        CHECK_FALSE(idx.covers({0.0, 2.0 / 3.0}));
    }
    auto strip = PackingSpec::strip(0.0, 2.0);
    auto box = Region::rectangle(-1, 1, -1, 3);
    auto c = gap_cover(strip, box, 8, 4);
    CoverIndex idx(c);
    std::size_t inside = 0, missed = 0;
    for (const auto& p : residual_samples(strip, 5000, 20, 11)) {
        if (distance_range(box, {p[0], p[1], 0}).first > 0) continue;
        ++inside;
        if (!idx.covers(p)) ++missed;
    }
    CHECK(inside > 100);
    CHECK(missed == 0);
}

TEST_CASE("dimension estimates") {
    std::vector<GapCover> dust;
    for (int l = 2; l <= 8; ++l) dust.push_back(cantor_dust_cover(l));
    CHECK(std::abs(estimate_dimension(dust).s_star - std::log(4.0) / std::log(3.0)) < 0.02);

    std::vector<int> levels{6, 7, 8, 9, 10};
    auto a = estimate_dimension(PackingSpec::bounded(), Region::rectangle(-1, 0, -1, 1), levels, 4);
    auto b = estimate_dimension(PackingSpec::bounded(), Region::rectangle(0, 1, -1, 1), levels, 4);
    CHECK(a.s_star > 1.25);
    CHECK(a.s_star < 1.36);
    CHECK(std::abs(a.s_star - b.s_star) < 0.01);
    CHECK(a.sums_at_star.size() == levels.size());
    CHECK_THROWS_AS(estimate_dimension(std::vector<GapCover>(dust.begin(), dust.begin() + 3)), DomainError);
    CHECK_THROWS_AS(estimate_dimension(dust, 1.5, 2.0), RangeError);
}

TEST_CASE("weighted measures") {
    auto spec = PackingSpec::bounded();
    auto a = Region::rectangle(-1, 0, -1, 1);
    auto c = gap_cover(spec, a, 8);
    CHECK(weighted_sum(c, ConformalMetric::euclidean(), 1.3) == hausdorff_sum(c, 1.3));
    std::vector<double> ratio;
    for (int L : {10, 11, 12}) {
        double x = estimate_weighted_measure(spec, a, ConformalMetric::spherical(), 1.3057, L, 4);
        double y = estimate_weighted_measure(spec, Region::rectangle(0.2, 1, 0, 1), ConformalMetric::euclidean(), 1.3057, L, 4);
        ratio.push_back(x / y);
    }
    CHECK(std::abs(ratio[2] / ratio[0] - 1) < 0.05);
    CHECK(std::abs(ratio[2] / ratio[1] - 1) < 0.05);

    auto strip = PackingSpec::strip(0.0, 2.0);
    double h9 = estimate_weighted_measure(strip, Region::half_strip(1.0), ConformalMetric::hyperbolic(), 1.3057, 9, 4);
    double h10 = estimate_weighted_measure(strip, Region::half_strip(1.0), ConformalMetric::hyperbolic(), 1.3057, 10, 4);
    CHECK(std::isfinite(h10));
    CHECK(std::abs(h10 / h9 - 1) < 0.05);
    CHECK_THROWS_AS(estimate_weighted_measure(strip, Region::half_strip(1.0), ConformalMetric::power_law(0.5), 1.3057, 6), DomainError);
}
