#include "apollo/orbits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace apollo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 conj(const Mat2& a) { return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2]), std::conj(a[3])}; }

// Running log-sum-exp.
struct LogSum {
    double m = -kInf, acc = 0.0;
    void add(double logv) {
        if (logv <= m) {
            acc += std::exp(logv - m);
        } else {
            acc = acc * std::exp(m - logv) + 1.0;
            m = logv;
        }
    }
    void merge(const LogSum& o) {
        if (o.acc == 0.0) return;
        if (acc == 0.0) {
            *this = o;
        } else if (o.m <= m) {
            acc += o.acc * std::exp(o.m - m);
        } else {
            acc = acc * std::exp(m - o.m) + o.acc;
            m = o.m;
        }
    }
    double value() const { return acc == 0.0 ? -kInf : m + std::log(acc); }
};

using Mat4 = std::array<std::array<double, 4>, 4>;

// The generators act on (b, bhat, c0, c1); c2 is untouched for planar circles.
Mat4 block(const MobiusMap& g) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i][j] = g.matrix()[i][j];
    return out;
}

HPoint apply4(const Mat4& m, const HPoint& p) {
    const std::array<double, 4> v{p.b, p.bhat, p.c0, p.c1};
    std::array<double, 4> r{};
    for (int i = 0; i < 4; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] + m[i][3] * v[3];
    return {r[0], r[1], r[2], r[3]};
}

int task_depth(int L) { return std::min(L, 3); }

struct Walker {
    const GroupPresentation& pres;
    std::vector<Mat4> gens;
    int L;
    const std::function<void(std::size_t, const WordVisit&)>& visit;

    void dfs(std::size_t task, const WordVisit& w, std::size_t& count) const {
        visit(task, w);
        ++count;
        if (w.length == L) return;
        for (int s = 0; s < pres.size(); ++s) {
            if (s == w.first) continue;
            dfs(task, child(w, s), count);
        }
    }

    WordVisit child(const WordVisit& w, int s) const {
        WordVisit c;
        c.length = w.length + 1;
        c.first = s;
        c.point = apply4(gens[static_cast<std::size_t>(s)], w.point);
        const Mobius2& g = pres.planar[static_cast<std::size_t>(s)];
        c.planar.m = mul(g.m, conj(w.planar.m));
        c.planar.anti = !w.planar.anti;
        return c;
    }

    // Words shorter than the split depth (task 0) and the roots of the subtrees (tasks 1..).
    void split(const WordVisit& w, int depth, std::vector<WordVisit>& shallow, std::vector<WordVisit>& roots) const {
        if (w.length == depth) {
            roots.push_back(w);
            return;
        }
        shallow.push_back(w);
        for (int s = 0; s < pres.size(); ++s)
            if (s != w.first) split(child(w, s), depth, shallow, roots);
    }
};

}  // namespace

double Mobius2::frobenius2() const {
    double det = std::abs(m[0] * m[3] - m[1] * m[2]);
    return (std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3])) / det;
}

Mobius2 planar_inversion(const OrientedCircle& s) {
    Mobius2 g;
    g.anti = true;
    if (s.b == 0.0) {
        // Reflection in {n.x = h}: z -> -nu^2 conj(z) + 2 h nu.
        Complex nu(s.c[0], s.c[1]);
        nu /= std::abs(nu);
        double h = s.bhat / 2.0;
        g.m = {-nu * nu, 2.0 * h * nu, Complex(0), Complex(1)};
        return g;
    }
    Complex c(s.c[0] / s.b, s.c[1] / s.b);
    double r = 1.0 / std::abs(s.b);
    // z -> c + r^2 / (conj(z) - conj(c))
    g.m = {c / r, Complex(r * r - std::norm(c)) / r, Complex(1.0 / r), -std::conj(c) / r};
    return g;
}

HPoint HPoint::from_coords(double x, double y, double h) {
    if (!(h > 0.0)) throw DomainError("points of H^3 need positive height");
    return {1.0 / h, (x * x + y * y + h * h) / h, x / h, y / h};
}

double distance(const HPoint& p, const HPoint& q) {
    double dx = p.x() - q.x(), dy = p.y() - q.y(), dh = p.height() - q.height();
    double e = std::sqrt(dx * dx + dy * dy + dh * dh);
    return 2.0 * std::asinh(e / (2.0 * std::sqrt(p.height() * q.height())));
}

HPoint act(const MobiusMap& g, const HPoint& p) {
    auto r = g.apply_raw({p.b, p.bhat, p.c0, p.c1, 0.0});
    return {r[0], r[1], r[2], r[3]};
}

GroupPresentation GroupPresentation::from_spec(const PackingSpec& spec) {
    if (spec.dim != 2) throw DomainError("orbit computations are implemented for planar packings");
    GroupPresentation p;
    auto q = make_quadruple(spec.root_float(), 2);
    for (int i = 0; i < q.size(); ++i) p.circles.push_back(spec.dual_group() ? q[i] : dual_sphere(q, i));
    for (const auto& c : p.circles) {
        p.generators.push_back(MobiusMap::inversion(c));
        p.planar.push_back(planar_inversion(c));
    }
    return p;
}

std::vector<ReducedWord> enumerate_words(const GroupPresentation& pres, int L) {
    if (L < 0) throw DomainError("word length must be nonnegative");
    std::vector<ReducedWord> out{ReducedWord{{}, MobiusMap::identity()}};
    std::size_t begin = 0;
    for (int len = 1; len <= L; ++len) {
        std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i) {
            for (int s = 0; s < pres.size(); ++s) {
                if (!out[i].letters.empty() && out[i].letters.front() == s) continue;
                ReducedWord w;
                w.letters.push_back(static_cast<std::uint8_t>(s));
                w.letters.insert(w.letters.end(), out[i].letters.begin(), out[i].letters.end());
                w.element = pres.generators[static_cast<std::size_t>(s)] * out[i].element;
                out.push_back(std::move(w));
            }
        }
        begin = end;
    }
    return out;
}

std::size_t distinct_elements(const std::vector<ReducedWord>& words) {
    std::set<std::array<long long, 25>> seen;
    for (const auto& w : words) {
        std::array<long long, 25> key{};
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) key[static_cast<std::size_t>(5 * i + j)] = std::llround(w.element.matrix()[i][j] * 1e6);
        seen.insert(key);
    }
    return seen.size();
}

std::size_t word_task_count(const GroupPresentation& pres, int L) {
    int d = task_depth(L);
    std::size_t n = 1;
    if (d > 0) {
        std::size_t roots = static_cast<std::size_t>(pres.size());
        for (int i = 1; i < d; ++i) roots *= static_cast<std::size_t>(pres.size() - 1);
        n += roots;
    }
    return n;
}

std::size_t for_each_word(const GroupPresentation& pres, int L, int workers,
                          const std::function<void(std::size_t, const WordVisit&)>& visit) {
    if (L < 0) throw DomainError("word length must be nonnegative");
    Walker walker{pres, {}, L, visit};
    for (const auto& g : pres.generators) walker.gens.push_back(block(g));
    std::vector<WordVisit> shallow, roots;
    walker.split(WordVisit{}, task_depth(L), shallow, roots);
    if (task_depth(L) == 0) {
        roots.clear();
        shallow = {WordVisit{}};
    }
    for (const auto& w : shallow) visit(0, w);
    std::vector<std::size_t> counts(roots.size(), 0);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < roots.size();) walker.dfs(i + 1, roots[i], counts[i]);
    };
    int w = std::max(1, std::min<int>(workers, static_cast<int>(roots.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < w; ++k) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    std::size_t total = shallow.size();
    for (auto c : counts) total += c;
    return total;
}

double displacement(const MobiusMap& g) { return distance(origin(), act(g, origin())); }

double PoincareSeries::partial(int L) const { return std::exp(log_partial.at(static_cast<std::size_t>(L))); }

double PoincareSeries::increment_ratio(int l) const {
    return std::exp(log_level.at(static_cast<std::size_t>(l + 1)) - log_level.at(static_cast<std::size_t>(l)));
}

PoincareSeries poincare_partial(const GroupPresentation& pres, double s, int L, int workers) {
    if (!(s > 0.0)) throw DomainError("Poincare exponent must be positive");
    const std::size_t tasks = word_task_count(pres, L);
    std::vector<std::vector<LogSum>> acc(tasks, std::vector<LogSum>(static_cast<std::size_t>(L + 1)));
    for_each_word(pres, L, workers, [&](std::size_t task, const WordVisit& w) {
        acc[task][static_cast<std::size_t>(w.length)].add(-s * distance(origin(), w.point));
    });
    PoincareSeries out;
    out.s = s;
    LogSum running;
    for (int l = 0; l <= L; ++l) {
        LogSum level;
        for (std::size_t t = 0; t < tasks; ++t) level.merge(acc[t][static_cast<std::size_t>(l)]);
        out.log_level.push_back(level.value());
        running.merge(level);
        out.log_partial.push_back(running.value());
    }
    return out;
}

double TruncatedPattersonMeasure::total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.weight;
    return m;
}

double TruncatedPattersonMeasure::ball_mass(double cx, double cy, double r) const {
    double m = 0.0;
    for (const auto& a : atoms)
        if (std::hypot(a.x - cx, a.y - cy) <= r) m += a.weight;
    return m;
}

TruncatedPattersonMeasure patterson_truncated(const GroupPresentation& pres, const HPoint& x, double s, int L,
                                              double delta_estimate, int workers) {
    if (!(s > 0.0)) throw DomainError("Patterson exponent must be positive");
    const std::size_t tasks = word_task_count(pres, L);
    std::vector<std::vector<PattersonAtom>> parts(tasks);
    std::vector<LogSum> norm(tasks);
    for_each_word(pres, L, workers, [&](std::size_t task, const WordVisit& w) {
        norm[task].add(-s * distance(origin(), w.point));
        // weight holds log e^{-s d(x, gamma o)} until normalization
        parts[task].push_back({w.point.x(), w.point.y(), w.point.height(), -s * distance(x, w.point)});
    });
    TruncatedPattersonMeasure mu;
    mu.s = s;
    mu.L = L;
    mu.base = x;
    mu.below_critical = s <= delta_estimate;
    LogSum z;
    for (const auto& n : norm) z.merge(n);
    mu.log_normalizer = z.value();
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    mu.atoms.reserve(total);
    for (auto& p : parts) {
        for (auto& a : p) {
            a.weight = std::exp(a.weight - mu.log_normalizer);
            mu.atoms.push_back(a);
        }
        std::vector<PattersonAtom>().swap(p);
    }
    return mu;
}

namespace {
std::uint64_t cell_key(long long ix, long long iy) {
    return (static_cast<std::uint64_t>(ix + (1LL << 31)) << 32) | static_cast<std::uint64_t>(iy + (1LL << 31));
}
}  // namespace

ResidualLocator::ResidualLocator(const PackingStore& store, double cell) : cell_(cell) {
    if (store.dim() != 2) throw DomainError("residual distances are planar");
    period_ = store.spec.period();
    if (period_ > 0.0) {
        if (!store.spec.window || store.spec.window->y1 - store.spec.window->y0 < period_)
            throw DomainError("periodic store window does not cover a period");
        y0_ = store.spec.window->y0;
    }
    for (const auto& r : store.records) {
        if (is_flat(r)) {
            lines_.push_back(r);
            continue;
        }
        Disk d{r.c[0] / r.b, r.c[1] / r.b, 1.0 / std::abs(r.b), r.b > 0 ? 1 : -1};
        for (int m : period_ > 0.0 ? std::vector<int>{-1, 0, 1} : std::vector<int>{0}) {
            Disk t = d;
            t.cy += m * period_;
            disks_.push_back(t);
        }
    }
    for (std::size_t i = 0; i < disks_.size(); ++i) {
        const auto& d = disks_[i];
        if (d.orientation < 0 || d.r > 8 * cell_) {
            wide_.push_back(i);
            continue;
        }
        auto x0 = static_cast<long long>(std::floor((d.cx - d.r) / cell_));
        auto x1 = static_cast<long long>(std::floor((d.cx + d.r) / cell_));
        auto y0 = static_cast<long long>(std::floor((d.cy - d.r) / cell_));
        auto y1 = static_cast<long long>(std::floor((d.cy + d.r) / cell_));
        for (long long x = x0; x <= x1; ++x)
            for (long long y = y0; y <= y1; ++y) grid_.emplace_back(cell_key(x, y), static_cast<std::uint32_t>(i));
    }
    std::sort(grid_.begin(), grid_.end());
}

double ResidualLocator::distance(double x, double y) const {
    if (period_ > 0.0) y = y0_ + std::fmod(std::fmod(y - y0_, period_) + period_, period_);
    double best = kInf;
    for (const auto& l : lines_) {
        double v = l.c[0] * x + l.c[1] * y - l.bhat / 2.0;
        if (v > 0.0) return v;
        best = std::min(best, -v);
    }
    auto check = [&](std::size_t i, double& out) {
        const auto& d = disks_[i];
        double dc = std::hypot(x - d.cx, y - d.cy);
        double depth = d.orientation > 0 ? d.r - dc : dc - d.r;
        if (depth > 0.0) {
            out = depth;
            return true;
        }
        best = std::min(best, -depth);
        return false;
    };
    double inside = 0.0;
    for (auto i : wide_)
        if (check(i, inside)) return inside;
    auto key = cell_key(static_cast<long long>(std::floor(x / cell_)), static_cast<long long>(std::floor(y / cell_)));
    auto it = std::lower_bound(grid_.begin(), grid_.end(), std::make_pair(key, std::uint32_t{0}));
    for (; it != grid_.end() && it->first == key; ++it)
        if (check(it->second, inside)) return inside;
    return best;
}

NormCount norm_ball_count(const GroupPresentation& pres, int L, int per_decade, int workers) {
    if (L < 2) throw DomainError("norm counts need words of length >= 2");
    const int top = L % 2 == 0 ? L : L - 1;
    const std::size_t tasks = word_task_count(pres, top);
    std::vector<std::vector<double>> norms(tasks);
    std::vector<double> defect(tasks, 0.0), sat(tasks, kInf);
    for_each_word(pres, top, workers, [&](std::size_t task, const WordVisit& w) {
        if (w.length % 2 != 0) return;
        double f2 = w.planar.frobenius2();
        double cosh2 = w.point.b + w.point.bhat;  // 2 cosh d(j, gamma j)
        defect[task] = std::max(defect[task], std::abs(f2 - cosh2) / cosh2);
        double n = std::sqrt(f2);
        norms[task].push_back(n);
        if (w.length == top) sat[task] = std::min(sat[task], n);
    });
    NormCount out;
    std::vector<double> all;
    for (std::size_t t = 0; t < tasks; ++t) {
        all.insert(all.end(), norms[t].begin(), norms[t].end());
        out.max_bridge_defect = std::max(out.max_bridge_defect, defect[t]);
        out.t_saturation = std::min(out.t_saturation == 0.0 ? kInf : out.t_saturation, sat[t]);
    }
    std::sort(all.begin(), all.end());
    // Grid from just above the identity's norm sqrt(2) up to saturation.
    const double t_lo = std::sqrt(2.0) * (1.0 + 1e-9);
    if (!(out.t_saturation > t_lo)) throw FitError("norm counts saturate immediately; increase L");
    out.T = geometric_grid(out.t_saturation, t_lo, per_decade);
    std::reverse(out.T.begin(), out.T.end());
    for (double t : out.T) out.count.push_back(static_cast<std::uint64_t>(std::upper_bound(all.begin(), all.end(), t) - all.begin()));
    // Fit over the upper decade of the window, where counts are large.
    std::vector<double> x, y;
    for (std::size_t i = 0; i < out.T.size(); ++i) {
        if (out.T[i] >= out.t_saturation / 10.0) {
            x.push_back(out.T[i]);
            y.push_back(static_cast<double>(out.count[i]));
        }
    }
    out.fit = fit_power_law(x, y);
    out.fit.t_lo = x.empty() ? 0.0 : x.front();
    out.fit.t_hi = out.t_saturation;
    return out;
}

}  // namespace apollo
