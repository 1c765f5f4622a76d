#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apollo/metrics.hpp"
#include "apollo/packing.hpp"

namespace apollo {

/// N_t(P, f, E) sampled on a grid, restricted to the window where the store makes it exact.
struct CountCurve {
    std::string metric;
    std::string region;
    Fingerprint store{};
    std::vector<double> t;                // descending
    std::vector<std::uint64_t> count;     // N_t at each t
    double t_valid_min = 0.0;             // counts are exact for t >= t_valid_min
    std::uint64_t infinite_members = 0;   // members of infinite volume meeting E (counted at every t)
};

struct FitResult {
    double exponent = 0.0;
    double log_const = 0.0;  // log N = log_const + exponent * log(1/t)
    double stderr_ = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    std::size_t n_points = 0;
};

struct CAEstimate {
    double c_a = 0.0;
    double plateau = 0.0;
    double hausdorff = 0.0;
    double alpha = 0.0;
    double uncertainty = 0.0;
    double plateau_slope = 0.0;                       // d log(N t^{alpha/2}) / d log10 t over the last decade
    std::vector<std::pair<double, double>> series;    // (t, N_t t^{alpha/2})
};

/// Descending geometric grid from hi to lo inclusive with `per_decade` points per decade.
std::vector<double> geometric_grid(double hi, double lo, int per_decade = 16);

/// Threshold below which the store's cutoff no longer guarantees exact counts on E.
double validity_floor(const PackingStore& store, const ConformalMetric& metric, const Region& region);

/// Volumes of the packing members meeting E (periodic stores are extended by translation),
/// keeping finite volumes above `t_floor`. Returns the number of infinite-volume members.
std::uint64_t collect_volumes(const PackingStore& store, const ConformalMetric& metric, const Region& region,
                              double t_floor, std::vector<double>& finite, int workers = 1);

CountCurve count_curve(const PackingStore& store, const ConformalMetric& metric, const Region& region,
                       const std::vector<double>& t_grid, int workers = 1);

/// Least-squares slope of log y against log x.
FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log N_t against log(1/t) over [t_lo, t_hi]; defaults to the smallest two valid decades.
FitResult fit_exponent(const CountCurve& curve, std::optional<std::pair<double, double>> window = std::nullopt);

std::pair<double, double> default_fit_window(const CountCurve& curve);

/// #{b <= x} on a geometric grid over [x_lo, x_hi], fitted in log-log.
FitResult curvature_growth_fit(const PackingStore& store, double x_lo, double x_hi, int per_decade = 16);

/// Circles of the ideal-triangle packing counted by hyperbolic area (strip store).
CountCurve ideal_triangle_count(const PackingStore& strip, const std::vector<double>& t_grid, int workers = 1);

struct BandRow {
    int n = 0;
    std::uint64_t count = 0;        // #F_t(E_n), finite-volume members
    std::uint64_t cumulative = 0;   // sum over bands n_lo..n
    std::uint64_t comparison = 0;   // #F_{t n^-2k}(E_1)
    std::uint64_t infinite = 0;     // infinite-volume members meeting E_n (not in `count`)
};

struct BandTable {
    double k = 0.0;
    double t = 0.0;
    std::vector<BandRow> rows;

    const BandRow& row(int n) const;
    /// Share of the total (through the last band) contributed by bands beyond n.
    double tail_fraction(int n) const;
    /// Bands where #F_t(E_n) > #F_{t n^-2k}(E_1).
    std::vector<int> injection_violations() const;
};

/// Per-band counts for f = y^-k on E_n = {|x| <= 1, n <= y <= n+1}, n in [n_lo, n_hi].
BandTable band_tail_experiment(const PackingStore& strip, double k, double t, int n_lo, int n_hi, int workers = 1);

/// c_A = plateau of N_t t^{alpha/2} divided by the Hausdorff-measure estimate.
/// Throws FitError when the series has not flattened (slope >= 0.02 per decade over the last decade).
CAEstimate estimate_ca(const CountCurve& curve, double hausdorff, double alpha, double plateau_tol = 0.02);

}  // namespace apollo
