#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "apollo/metrics.hpp"
#include "apollo/packing.hpp"

namespace apollo {

using Vec2 = std::array<double, 2>;

/// Closed disk covering one curvilinear gap, clipped to the region's diameter.
struct CoverDisk {
    Vec2 center{};
    double diameter = 0.0;
};

struct GapCover {
    int level = 0;
    std::string region;
    std::vector<CoverDisk> disks;

    double max_diameter() const;
};

/// Gap disks of every depth-`level` node of the reflection tree whose gap meets the region.
/// The gap opposite slot j of a quadruple is the interior of the negated dual circle.
GapCover gap_cover(const PackingSpec& spec, const Region& region, int level, int workers = 1);

/// Level-L cover of the planar middle-thirds dust (4 similarities of ratio 1/3).
GapCover cantor_dust_cover(int level);

double hausdorff_sum(const GapCover& cover, double s);

/// Sum of f(center)^s diam^s over the cover.
double weighted_sum(const GapCover& cover, const ConformalMetric& metric, double s);

double estimate_weighted_measure(const PackingSpec& spec, const Region& region, const ConformalMetric& metric,
                                 double s, int level, int workers = 1);

struct DimensionEstimate {
    double s_star = 0.0;
    std::vector<int> levels;
    std::vector<double> sums_at_star;                   // per level, at s*
    std::vector<std::pair<double, double>> slope_curve;  // (s, d log S_L / dL)
    double slope_stderr = 0.0;                           // regression stderr at s*
};

/// Zero of the per-level growth rate of log S_L(s), by bisection over [s_lo, s_hi].
DimensionEstimate estimate_dimension(const std::vector<GapCover>& covers, double s_lo = 0.5, double s_hi = 2.5);
DimensionEstimate estimate_dimension(const PackingSpec& spec, const Region& region, const std::vector<int>& levels,
                                     int workers = 1);

/// Points of Res(P): tangency points of quadruples reached by random reduced words.
std::vector<Vec2> residual_samples(const PackingSpec& spec, std::size_t count, int depth, std::uint64_t seed);

/// Grid-bucketed point membership in the union of closed cover disks.
class CoverIndex {
public:
    explicit CoverIndex(const GapCover& cover, double cell = 1.0 / 64.0);
    bool covers(const Vec2& p, double tol = 1e-9) const;

private:
    const GapCover* cover_;
    double cell_;
    std::vector<std::size_t> unbounded_;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> entries_;  // (cell key, disk index), sorted
};

}  // namespace apollo
