#include "apollo/residual.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace apollo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
    FloatQuadruple q;
    int incoming = -1;
    int depth = 0;
};

class CoverBuilder {
public:
    CoverBuilder(const Region& region, int level) : region_(region), level_(level) {
        Box2 b = region.bounding_box();
        center_ = {(b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2};
        region_diameter_ = region.kind == Region::Kind::disk ? 2.0 * region.r : std::hypot(b.x1 - b.x0, b.y1 - b.y0);
    }

    // Gap opposite slot j as a cover disk; false when it misses the region.
    bool gap(const FloatQuadruple& q, int j, CoverDisk& out) const {
        // Q(dual_direction) = 4 for every planar Descartes quadruple; recomputing it loses all
        // digits once curvatures pass 1e7.
        OrientedSphere g = -0.5 * dual_direction(q, j);
        if (g.b > 0.0) {
            double r = 1.0 / g.b;
            Vec3 c{g.c[0] / g.b, g.c[1] / g.b, 0.0};
            if (distance_range(region_, c).first > r * (1.0 + 1e-12) + 1e-12) return false;
            if (2.0 * r <= region_diameter_) {
                out = {{c[0], c[1]}, 2.0 * r};
                return true;
            }
        } else if (!interior_meets_box(g, region_.bounding_box())) {
            return false;
        }
        out = {center_, region_diameter_};
        return true;
    }

    void walk(const Node& n, std::vector<CoverDisk>& out) const {
        for (int j = 0; j < n.q.size(); ++j) {
            if (j == n.incoming) continue;
            CoverDisk d;
            if (!gap(n.q, j, d)) continue;
            if (n.depth == level_) {
                out.push_back(d);
            } else {
                walk(Node{descartes_reflect(n.q, j), j, n.depth + 1}, out);
            }
        }
    }

    // Nodes at the given depth (or leaves above it) in tree order, for splitting work.
    void frontier(const Node& n, int depth, std::vector<Node>& out) const {
        if (n.depth == depth || n.depth == level_) {
            out.push_back(n);
            return;
        }
        for (int j = 0; j < n.q.size(); ++j) {
            if (j == n.incoming) continue;
            CoverDisk d;
            if (gap(n.q, j, d)) frontier(Node{descartes_reflect(n.q, j), j, n.depth + 1}, depth, out);
        }
    }

private:
    const Region& region_;
    int level_;
    Vec2 center_{};
    double region_diameter_ = 0.0;
};

double log_sum(const std::vector<double>& logd, double s) {
    double m = -kInf;
    for (double l : logd) m = std::max(m, s * l);
    if (!std::isfinite(m)) return -kInf;
    double acc = 0.0;
    for (double l : logd) acc += std::exp(s * l - m);
    return m + std::log(acc);
}

// Least-squares slope of y against x, and its standard error.
std::pair<double, double> slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    double b = sxy / sxx, ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - my - b * (x[i] - mx);
        ssr += e * e;
    }
    return {b, x.size() > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0};
}

template <class Q>
Vec2 random_tangency(Q q, int depth, std::mt19937_64& rng) {
    int incoming = -1;
    const int size = q.size();
    for (int step = 0; step < depth; ++step) {
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(incoming < 0 ? size : size - 1));
        if (incoming >= 0 && j >= incoming) ++j;
        q = descartes_reflect(q, j);
        incoming = j;
    }
    int a = incoming < 0 ? 0 : incoming;
    int b = static_cast<int>(rng() % static_cast<std::uint64_t>(size - 1));
    if (b >= a) ++b;
    FloatQuadruple f;
    if constexpr (std::is_same_v<Q, ExactQuadruple>) {
        f = to_float(q);
    } else {
        f = q;
    }
    Vec3 p = tangency_point(f[a], f[b]);
    return {p[0], p[1]};
}

}  // namespace

double GapCover::max_diameter() const {
    double m = 0.0;
    for (const auto& d : disks) m = std::max(m, d.diameter);
    return m;
}

GapCover gap_cover(const PackingSpec& spec, const Region& region, int level, int workers) {
    if (level < 0) throw DomainError("cover level must be nonnegative");
    if (spec.dim != 2 || spec.dual_group()) throw DomainError("gap covers are defined for planar Apollonian packings");
    if (!region.bounded()) throw DomainError("gap covers need a bounded region");
    CoverBuilder builder(region, level);
    GapCover cover;
    cover.level = level;
    cover.region = region.name();

    std::vector<Node> seeds;
    builder.frontier(Node{make_quadruple(spec.root_float(), 2), -1, 0}, std::min(level, 4), seeds);
    std::vector<std::vector<CoverDisk>> parts(seeds.size());
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) builder.walk(seeds[i], parts[i]);
    };
    int w = std::max(1, std::min<int>(workers, static_cast<int>(seeds.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < w; ++k) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    for (auto& p : parts) cover.disks.insert(cover.disks.end(), p.begin(), p.end());
    return cover;
}

GapCover cantor_dust_cover(int level) {
    if (level < 0 || level > 12) throw DomainError("dust level must lie in [0, 12]");
    GapCover cover;
    cover.level = level;
    cover.region = "cantor_dust";
    std::vector<Vec2> corners{{0.0, 0.0}};
    double side = 1.0;
    for (int l = 0; l < level; ++l) {
        side /= 3.0;
        std::vector<Vec2> next;
        for (const auto& c : corners)
            for (double dx : {0.0, 2.0})
                for (double dy : {0.0, 2.0}) next.push_back({c[0] + dx * side, c[1] + dy * side});
        corners = std::move(next);
    }
    for (const auto& c : corners) cover.disks.push_back({{c[0] + side / 2, c[1] + side / 2}, side * std::sqrt(2.0)});
    return cover;
}

double hausdorff_sum(const GapCover& cover, double s) {
    if (!(s > 0.0)) throw DomainError("Hausdorff exponent must be positive");
    double acc = 0.0;
    for (const auto& d : cover.disks) acc += std::pow(d.diameter, s);
    return acc;
}

double weighted_sum(const GapCover& cover, const ConformalMetric& metric, double s) {
    if (!(s > 0.0)) throw DomainError("Hausdorff exponent must be positive");
    double acc = 0.0;
    for (const auto& d : cover.disks) {
        double f = metric_density(metric, {d.center[0], d.center[1], 0.0});
        acc += std::pow(f * d.diameter, s);
    }
    return acc;
}

double estimate_weighted_measure(const PackingSpec& spec, const Region& region, const ConformalMetric& metric,
                                 double s, int level, int workers) {
    if (region.kind != Region::Kind::half_strip) return weighted_sum(gap_cover(spec, region, level, workers), metric, s);
    // U_eta of a periodic packing: one period cell, summed over its upward translates.
    const double period = spec.period();
    if (period <= 0.0) throw DomainError("half-strip measures need a periodic packing");
    if (!metric.half_space() || !(metric.k * s > 1.0)) throw DomainError("half-strip measure diverges unless k s > 1");
    const double eta = region.eta;
    GapCover cell = gap_cover(spec, Region::rectangle(-1.0, 1.0, eta, eta + period), level, workers);
    constexpr int kTranslates = 256;
    double total = 0.0;
    for (int m = 0; m < kTranslates; ++m) {
        for (const auto& d : cell.disks) {
            // A disk straddling y = eta on the first cell is kept with its full weight.
            double y = d.center[1] + m * period;
            double f = metric_density(metric, {d.center[0], std::max(y, eta + 1e-300), 0.0});
            total += std::pow(f * d.diameter, s);
        }
    }
    // Remaining translates: f is nearly constant on each cell.
    double base = hausdorff_sum(cell, s), ks = metric.k * s;
    double y_tail = eta + period * (kTranslates - 0.5) + period / 2;
    total += base * std::pow(y_tail, 1.0 - ks) / (period * (ks - 1.0));
    return total;
}

DimensionEstimate estimate_dimension(const std::vector<GapCover>& covers, double s_lo, double s_hi) {
    if (covers.size() < 4) throw DomainError("dimension estimate needs at least 4 levels");
    std::vector<std::vector<double>> logd(covers.size());
    std::vector<double> levels;
    for (std::size_t i = 0; i < covers.size(); ++i) {
        if (covers[i].disks.empty()) throw RangeError("cover at level " + std::to_string(covers[i].level) + " is empty");
        for (const auto& d : covers[i].disks) {
            if (!std::isfinite(d.diameter)) throw RangeError("cover contains an unbounded disk");
            logd[i].push_back(std::log(d.diameter));
        }
        levels.push_back(covers[i].level);
    }
    auto growth = [&](double s) {
        std::vector<double> y;
        for (const auto& l : logd) y.push_back(log_sum(l, s));
        return slope(levels, y);
    };
    DimensionEstimate est;
    for (const auto& c : covers) est.levels.push_back(c.level);
    for (double s = s_lo; s <= s_hi + 1e-12; s += (s_hi - s_lo) / 40) est.slope_curve.emplace_back(s, growth(s).first);
    double lo = s_lo, hi = s_hi;
    if (!(growth(lo).first > 0.0 && growth(hi).first < 0.0)) {
        throw RangeError("growth rate of the covering sums does not change sign on [" + std::to_string(s_lo) + ", " +
                         std::to_string(s_hi) + "]");
    }
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        (growth(mid).first > 0.0 ? lo : hi) = mid;
    }
    est.s_star = 0.5 * (lo + hi);
    est.slope_stderr = growth(est.s_star).second;
    for (const auto& l : logd) est.sums_at_star.push_back(std::exp(log_sum(l, est.s_star)));
    return est;
}

DimensionEstimate estimate_dimension(const PackingSpec& spec, const Region& region, const std::vector<int>& levels,
                                     int workers) {
    std::vector<GapCover> covers;
    for (int l : levels) covers.push_back(gap_cover(spec, region, l, workers));
    return estimate_dimension(covers);
}

std::vector<Vec2> residual_samples(const PackingSpec& spec, std::size_t count, int depth, std::uint64_t seed) {
    if (spec.dim != 2 || spec.dual_group()) throw DomainError("residual samples are defined for planar Apollonian packings");
    std::mt19937_64 rng(seed);
    std::vector<Vec2> out;
    out.reserve(count);
    if (spec.exact()) {
        ExactQuadruple root = make_quadruple(spec.exact_root, 2);
        for (std::size_t i = 0; i < count; ++i) out.push_back(random_tangency(root, depth, rng));
    } else {
        FloatQuadruple root = make_quadruple(spec.root_float(), 2);
        for (std::size_t i = 0; i < count; ++i) out.push_back(random_tangency(root, depth, rng));
    }
    return out;
}

namespace {
std::uint64_t cell_key(long long ix, long long iy) {
    return (static_cast<std::uint64_t>(ix + (1LL << 31)) << 32) | static_cast<std::uint64_t>(iy + (1LL << 31));
}
}  // namespace

CoverIndex::CoverIndex(const GapCover& cover, double cell) : cover_(&cover), cell_(cell) {
    for (std::size_t i = 0; i < cover.disks.size(); ++i) {
        const auto& d = cover.disks[i];
        double r = d.diameter / 2;
        if (!std::isfinite(r) || r > 16 * cell_) {
            unbounded_.push_back(i);
            continue;
        }
        auto x0 = static_cast<long long>(std::floor((d.center[0] - r) / cell_));
        auto x1 = static_cast<long long>(std::floor((d.center[0] + r) / cell_));
        auto y0 = static_cast<long long>(std::floor((d.center[1] - r) / cell_));
        auto y1 = static_cast<long long>(std::floor((d.center[1] + r) / cell_));
        for (long long x = x0; x <= x1; ++x)
            for (long long y = y0; y <= y1; ++y) entries_.emplace_back(cell_key(x, y), static_cast<std::uint32_t>(i));
    }
    std::sort(entries_.begin(), entries_.end());
}

bool CoverIndex::covers(const Vec2& p, double tol) const {
    auto inside = [&](std::size_t i) {
        const auto& d = cover_->disks[i];
        if (!std::isfinite(d.diameter)) return true;
        double r = d.diameter / 2;
        return std::hypot(p[0] - d.center[0], p[1] - d.center[1]) <= r * (1 + tol) + tol;
    };
    for (auto i : unbounded_)
        if (inside(i)) return true;
    // A point on a cell edge may belong to a disk registered only in the neighbouring cell.
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            auto key = cell_key(static_cast<long long>(std::floor(p[0] / cell_)) + dx,
                                static_cast<long long>(std::floor(p[1] / cell_)) + dy);
            auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(key, std::uint32_t{0}));
            for (; it != entries_.end() && it->first == key; ++it)
                if (inside(it->second)) return true;
        }
    }
    return false;
}

}  // namespace apollo
