#include "apollo/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

namespace apollo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

OrientedSphere translate_y(const OrientedSphere& s, double a) {
    OrientedSphere t = s;
    t.bhat = s.bhat + 2.0 * a * s.c[1] + a * a * s.b;
    t.c[1] = s.c[1] + s.b * a;
    return t;
}

// Volume with members whose ball leaves the half-space domain treated as infinite.
double volume_or_inf(const ConformalMetric& m, const OrientedSphere& s) {
    if (is_flat(s)) return kInf;
    if (m.half_space()) {
        double h = m.dim == 2 ? s.c[1] / s.b : s.c[2] / s.b;
        double r = 1.0 / std::abs(s.b);
        if (r > h * (1.0 + 1e-12)) return kInf;
    }
    return vol_f(m, s).value;
}

// Volume decreases as a ball moves up: needed to stop periodic extension.
bool decays_upward(const ConformalMetric& m) { return m.half_space() && m.k > 0.0; }

// Members of the store to be extended by the period, or every record for ordinary stores.
std::vector<std::size_t> representatives(const PackingStore& store) {
    std::vector<std::size_t> reps;
    const double period = store.spec.period();
    if (period <= 0.0) {
        reps.resize(store.size());
        for (std::size_t i = 0; i < reps.size(); ++i) reps[i] = i;
        return reps;
    }
    if (!store.spec.window || store.spec.window->y1 - store.spec.window->y0 < period) {
        throw CutoffError("periodic store window does not cover a full period");
    }
    const double y0 = store.spec.window->y0;
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& r = store.records[i];
        if (is_flat(r)) {
            // Lines parallel to the period direction are invariant and kept once.
            if (r.c[1] != 0.0) throw DomainError("periodic store holds a line transverse to the period");
            reps.push_back(i);
            continue;
        }
        double cy = r.c[1] / r.b;
        if (cy >= y0 && cy < y0 + period) reps.push_back(i);
    }
    return reps;
}

template <class Work>
void parallel_chunks(std::size_t n, int workers, Work&& work) {
    int w = std::max(1, std::min<int>(workers, static_cast<int>(n / 1024 + 1)));
    if (w == 1) {
        work(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) {
        std::size_t lo = n * k / w, hi = n * (k + 1) / w;
        pool.emplace_back([&, k, lo, hi] { work(k, lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<double> geometric_grid(double hi, double lo, int per_decade) {
    if (!(hi > 0.0 && lo > 0.0 && hi >= lo) || per_decade < 1) throw DomainError("invalid grid bounds");
    std::vector<double> g;
    const double step = 1.0 / per_decade;
    const double top = std::log10(hi), bottom = std::log10(lo);
    for (int i = 0;; ++i) {
        double e = top - i * step;
        if (e < bottom - 1e-9) break;
        g.push_back(std::pow(10.0, e));
    }
    return g;
}

double validity_floor(const PackingStore& store, const ConformalMetric& metric, const Region& region) {
    const double big_t = store.curvature_bound();
    if (!std::isfinite(big_t)) throw CutoffError("counting needs a store generated with a curvature cutoff");
    if (metric.dim != store.dim()) throw DomainError("metric and store dimensions differ");
    const double r = 1.0 / big_t;
    if (region.kind == Region::Kind::triangle && metric.half_space()) {
        // Inside the triangle a circle of radius r has center height >= 2 sqrt(r).
        double y = 2.0 * std::sqrt(r);
        if (!(r < y)) return kInf;
        if (metric.kind == ConformalMetric::Kind::hyperbolic) {
            double rho = r / y;
            double q = std::sqrt((1.0 - rho) * (1.0 + rho));
            return 2.0 * std::numbers::pi * rho * rho / (q * (1.0 + q));
        }
        return std::numbers::pi * r * r * std::pow(y - r, -2.0 * metric.k);
    }
    double sup = sup_density(metric, region, 2.0 * r);
    if (!std::isfinite(sup)) return kInf;
    return unit_ball_volume(metric.dim) * std::pow(r * sup, metric.dim);
}

std::uint64_t collect_volumes(const PackingStore& store, const ConformalMetric& metric, const Region& region,
                              double t_floor, std::vector<double>& finite, int workers) {
    const auto reps = representatives(store);
    const double period = store.spec.period();
    const Box2 rb = region.bounding_box();
    const bool unbounded = !std::isfinite(rb.y1);
    if (!region.bounded() && !(period > 0.0 && decays_upward(metric))) {
        throw DomainError("unbounded regions need a periodic store and a metric decaying upward");
    }
    std::vector<std::vector<double>> parts(static_cast<std::size_t>(std::max(1, workers)));
    std::vector<std::uint64_t> infinite(parts.size(), 0);

    parallel_chunks(reps.size(), workers, [&](int k, std::size_t lo, std::size_t hi) {
        auto& out = parts[static_cast<std::size_t>(k)];
        auto& inf = infinite[static_cast<std::size_t>(k)];
        auto take = [&](const OrientedSphere& s, double v) {
            if (!intersects(s, region)) return;
            if (std::isinf(v)) {
                ++inf;
            } else if (v > t_floor) {
                out.push_back(v);
            }
        };
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& s = store.records[reps[i]];
            if (is_flat(s) || period <= 0.0) {
                take(s, volume_or_inf(metric, s));
                continue;
            }
            const double cy = s.c[1] / s.b, r = 1.0 / std::abs(s.b);
            long long m = static_cast<long long>(std::ceil((rb.y0 - r - cy) / period));
            long long m_hi = unbounded ? std::numeric_limits<long long>::max()
                                       : static_cast<long long>(std::floor((rb.y1 + r - cy) / period));
            for (; m <= m_hi; ++m) {
                OrientedSphere t = translate_y(s, m * period);
                double v = volume_or_inf(metric, t);
                take(t, v);
                if (unbounded && v <= t_floor && cy + m * period - r > rb.y0) break;
            }
        }
    });
    std::uint64_t inf_total = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        finite.insert(finite.end(), parts[k].begin(), parts[k].end());
        inf_total += infinite[k];
    }
    return inf_total;
}

CountCurve count_curve(const PackingStore& store, const ConformalMetric& metric, const Region& region,
                       const std::vector<double>& t_grid, int workers) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) throw DomainError("t grid must be positive");
        if (i > 0 && !(t_grid[i] < t_grid[i - 1])) throw DomainError("t grid must be strictly descending");
    }
    CountCurve curve;
    curve.metric = metric.name();
    curve.region = region.name();
    curve.store = store.fingerprint();
    curve.t_valid_min = validity_floor(store, metric, region);
    for (double t : t_grid)
        if (t >= curve.t_valid_min) curve.t.push_back(t);
    if (curve.t.empty()) {
        throw CutoffError("validity window is empty: store cutoff guarantees exact counts only for t >= " +
                          fmt(curve.t_valid_min));
    }
    std::vector<double> vols;
    curve.infinite_members = collect_volumes(store, metric, region, curve.t.back(), vols, workers);
    std::sort(vols.begin(), vols.end());
    for (double t : curve.t) {
        auto above = static_cast<std::uint64_t>(vols.end() - std::upper_bound(vols.begin(), vols.end(), t));
        curve.count.push_back(curve.infinite_members + above);
    }
    return curve;
}

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw FitError("mismatched fit data");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    const std::size_t n = lx.size();
    if (n < 8) throw FitError("fit needs at least 8 positive points, got " + std::to_string(n));
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
    mx /= n, my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("degenerate fit window");
    FitResult f;
    f.exponent = sxy / sxx;
    f.log_const = my - f.exponent * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = ly[i] - f.log_const - f.exponent * lx[i];
        ssr += e * e;
    }
    f.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    f.n_points = n;
    return f;
}

std::pair<double, double> default_fit_window(const CountCurve& curve) {
    if (curve.t.empty()) throw FitError("empty count curve");
    double lo = curve.t.back();
    return {lo, lo * 100.0};
}

FitResult fit_exponent(const CountCurve& curve, std::optional<std::pair<double, double>> window) {
    auto [lo, hi] = window ? *window : default_fit_window(curve);
    if (lo < curve.t_valid_min * (1.0 - 1e-12)) throw FitError("fit window extends below the validity window");
    std::vector<double> x, y;
    double tl = kInf, th = 0.0;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        double t = curve.t[i];
        if (t < lo * (1.0 - 1e-12) || t > hi * (1.0 + 1e-12) || curve.count[i] == 0) continue;
        x.push_back(1.0 / t);
        y.push_back(static_cast<double>(curve.count[i]));
        tl = std::min(tl, t), th = std::max(th, t);
    }
    FitResult f = fit_power_law(x, y);
    f.t_lo = tl, f.t_hi = th;
    return f;
}

FitResult curvature_growth_fit(const PackingStore& store, double x_lo, double x_hi, int per_decade) {
    if (x_hi > store.curvature_bound()) throw CutoffError("curvature range exceeds the store cutoff");
    std::vector<double> bs;
    for (const auto& r : store.records)
        if (r.b > 0.0) bs.push_back(r.b);
    std::sort(bs.begin(), bs.end());
    std::vector<double> xs = geometric_grid(x_hi, x_lo, per_decade), ys;
    for (double x : xs) ys.push_back(static_cast<double>(std::upper_bound(bs.begin(), bs.end(), x) - bs.begin()));
    FitResult f = fit_power_law(xs, ys);
    f.t_lo = x_lo, f.t_hi = x_hi;
    return f;
}

CountCurve ideal_triangle_count(const PackingStore& strip, const std::vector<double>& t_grid, int workers) {
    if (strip.spec.kind != PackingKind::strip_p0) throw DomainError("ideal-triangle counting needs the strip packing");
    return count_curve(strip, ConformalMetric::hyperbolic(), Region::triangle(), t_grid, workers);
}

const BandRow& BandTable::row(int n) const {
    for (const auto& r : rows)
        if (r.n == n) return r;
    throw DomainError("band " + std::to_string(n) + " not in table");
}

double BandTable::tail_fraction(int n) const {
    if (rows.empty()) return 0.0;
    double total = static_cast<double>(rows.back().cumulative);
    if (total == 0.0) return 0.0;
    return (total - static_cast<double>(row(n).cumulative)) / total;
}

std::vector<int> BandTable::injection_violations() const {
    std::vector<int> v;
    for (const auto& r : rows)
        if (r.count > r.comparison) v.push_back(r.n);
    return v;
}

BandTable band_tail_experiment(const PackingStore& strip, double k, double t, int n_lo, int n_hi, int workers) {
    if (!(k > 0.0)) throw DomainError("band experiment needs k > 0");
    if (n_lo < 1 || n_hi < n_lo) throw DomainError("band range must satisfy 1 <= n_lo <= n_hi");
    if (strip.spec.period() <= 0.0) throw DomainError("band experiment needs a periodic store");
    const ConformalMetric metric = ConformalMetric::power_law(k);
    for (int n : {n_lo, n_hi}) {
        if (t < validity_floor(strip, metric, Region::band(n))) throw CutoffError("store cutoff too small for band " + std::to_string(n));
    }
    const double t_cmp_min = t * std::pow(static_cast<double>(n_hi), -2.0 * k);
    if (t_cmp_min < validity_floor(strip, metric, Region::band(1))) {
        throw CutoffError("store cutoff too small for the comparison counts on E_1");
    }

    const auto reps = representatives(strip);
    const double period = strip.spec.period();
    const std::size_t nb = static_cast<std::size_t>(n_hi - n_lo + 1);
    std::vector<std::vector<std::uint64_t>> cnt(static_cast<std::size_t>(std::max(1, workers)), std::vector<std::uint64_t>(nb, 0));
    auto inf = cnt;
    parallel_chunks(reps.size(), workers, [&](int w, std::size_t lo, std::size_t hi) {
        auto& c = cnt[static_cast<std::size_t>(w)];
        auto& f = inf[static_cast<std::size_t>(w)];
        auto visit = [&](const OrientedSphere& s, double v, double ybot, double ytop) {
            int first = std::max(n_lo, static_cast<int>(std::floor(ybot)) - 1);
            int last = std::min(n_hi, static_cast<int>(std::floor(ytop)));
            for (int n = first; n <= last; ++n) {
                if (!intersects(s, Region::band(n))) continue;
                auto idx = static_cast<std::size_t>(n - n_lo);
                if (std::isinf(v)) {
                    ++f[idx];
                } else if (v > t) {
                    ++c[idx];
                }
            }
        };
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& s = strip.records[reps[i]];
            if (is_flat(s)) {
                visit(s, kInf, n_lo, n_hi + 1.0);
                continue;
            }
            const double cy = s.c[1] / s.b, r = 1.0 / std::abs(s.b);
            long long m = static_cast<long long>(std::ceil((n_lo - r - cy) / period));
            long long m_hi = static_cast<long long>(std::floor((n_hi + 1.0 + r - cy) / period));
            for (; m <= m_hi; ++m) {
                OrientedSphere tr = translate_y(s, m * period);
                double y = cy + m * period;
                double v = volume_or_inf(metric, tr);
                if (v <= t && y - r > n_lo) break;
                visit(tr, v, y - r, y + r);
            }
        }
    });

    std::vector<double> e1;
    collect_volumes(strip, metric, Region::band(1), t_cmp_min, e1, workers);
    std::sort(e1.begin(), e1.end());

    BandTable table;
    table.k = k;
    table.t = t;
    std::uint64_t cum = 0;
    for (int n = n_lo; n <= n_hi; ++n) {
        BandRow row;
        row.n = n;
        auto idx = static_cast<std::size_t>(n - n_lo);
        for (std::size_t w = 0; w < cnt.size(); ++w) row.count += cnt[w][idx], row.infinite += inf[w][idx];
        cum += row.count;
        row.cumulative = cum;
        double tc = t * std::pow(static_cast<double>(n), -2.0 * k);
        row.comparison = static_cast<std::uint64_t>(e1.end() - std::upper_bound(e1.begin(), e1.end(), tc));
        table.rows.push_back(row);
    }
    return table;
}

CAEstimate estimate_ca(const CountCurve& curve, double hausdorff, double alpha, double plateau_tol) {
    if (!(hausdorff > 0.0)) throw DomainError("Hausdorff estimate must be positive");
    CAEstimate est;
    est.hausdorff = hausdorff;
    est.alpha = alpha;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        double t = curve.t[i];
        est.series.emplace_back(t, static_cast<double>(curve.count[i]) * std::pow(t, 0.5 * alpha));
    }
    if (est.series.empty()) throw FitError("empty count curve");
    const double t_min = curve.t.back();
    std::vector<double> lx, ly;
    for (auto [t, s] : est.series) {
        if (t <= 10.0 * t_min * (1.0 + 1e-12) && s > 0.0) {
            lx.push_back(std::log10(t));
            ly.push_back(std::log(s));
        }
    }
    if (lx.size() < 3) throw FitError("fewer than three points in the last decade");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size(), my /= lx.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
    est.plateau_slope = sxy / sxx;
    double mean = 0.0, var = 0.0;
    for (double v : ly) mean += std::exp(v);
    mean /= ly.size();
    for (double v : ly) var += (std::exp(v) - mean) * (std::exp(v) - mean);
    var /= ly.size();
    est.plateau = mean;
    est.c_a = mean / hausdorff;
    est.uncertainty = est.c_a * std::sqrt(var) / mean;
    if (!(std::abs(est.plateau_slope) < plateau_tol)) {
        throw FitError("no plateau: N_t t^(alpha/2) changes by " + fmt(est.plateau_slope) +
                       " (log) per decade over the last decade, limit " + fmt(plateau_tol));
    }
    return est;
}

}  // namespace apollo
