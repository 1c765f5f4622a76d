#include "apollo/packing.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace apollo {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Int128 parse_int128(const std::string& s) {
    if (s.empty()) throw ConfigError("empty integer");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw ConfigError("malformed integer '" + s + "'");
    Int128 v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw ConfigError("malformed integer '" + s + "'");
        v = checked::add(checked::mul(v, 10), s[i] - '0');
    }
    return neg ? -v : v;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("malformed number '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("malformed number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

ExactSphere ex(long long b, long long bhat, long long c0, long long c1, long long c2 = 0) {
    return {b, bhat, {c0, c1, c2}};
}

double to_double(double v) { return v; }
double to_double(Int128 v) { return static_cast<double>(v); }

OrientedSphere as_float(const OrientedSphere& v) { return v; }
OrientedSphere as_float(const ExactSphere& v) { return to_float(v); }

// v + 2 w, the inversion of v in w when <v, w> = -1.
OrientedSphere plus_twice(const OrientedSphere& v, const OrientedSphere& w) { return v + 2.0 * w; }

ExactSphere plus_twice(const ExactSphere& v, const ExactSphere& w) {
    using namespace checked;
    ExactSphere r;
    r.b = add(v.b, mul(2, w.b));
    r.bhat = add(v.bhat, mul(2, w.bhat));
    for (int a = 0; a < 3; ++a) r.c[a] = add(v.c[a], mul(2, w.c[a]));
    return r;
}

// Total order used for canonical stores: (|b|, c0, c1, c2, b, bhat).
template <class T>
bool canonical_less(const Inversive<T>& u, const Inversive<T>& v) {
    T au = u.b < 0 ? -u.b : u.b;
    T av = v.b < 0 ? -v.b : v.b;
    if (au != av) return au < av;
    for (int a = 0; a < 3; ++a)
        if (u.c[a] != v.c[a]) return u.c[a] < v.c[a];
    if (u.b != v.b) return u.b < v.b;
    return u.bhat < v.bhat;
}

struct ExactKeyHash {
    std::size_t operator()(const ExactSphere& v) const {
        std::uint64_t h = 0;
        auto feed = [&h](Int128 x) {
            h = mix64(h ^ static_cast<std::uint64_t>(x));
            h = mix64(h ^ static_cast<std::uint64_t>(x >> 64));
        };
        feed(v.b);
        feed(v.bhat);
        for (Int128 x : v.c) feed(x);
        return static_cast<std::size_t>(h);
    }
};

using QuantKey = std::array<std::int64_t, 5>;

struct QuantKeyHash {
    std::size_t operator()(const QuantKey& k) const {
        std::uint64_t h = 0;
        for (auto x : k) h = mix64(h ^ static_cast<std::uint64_t>(x));
        return static_cast<std::size_t>(h);
    }
};

// Float-mode canonical key: radius and center (or offset and normal for lines)
// quantized to a fixed grid, probing the neighbouring cell near cell boundaries.
class FloatIndex {
public:
    bool contains(const OrientedSphere& v) const {
        bool found = false;
        probe(v, [&](const QuantKey& k) {
            if (set_.count(k)) found = true;
        });
        return found;
    }

    bool insert(const OrientedSphere& v) {
        if (contains(v)) return false;
        set_.insert(base_key(v));
        return true;
    }

private:
    static std::array<double, 4> coords(const OrientedSphere& v) {
        if (v.b == 0.0) return {0.5 * v.bhat, v.c[0], v.c[1], v.c[2]};
        return {1.0 / std::abs(v.b), v.c[0] / v.b, v.c[1] / v.b, v.c[2] / v.b};
    }

    static std::int64_t tag(const OrientedSphere& v) { return v.b > 0.0 ? 1 : (v.b < 0.0 ? 2 : 3); }

    static double scaled(double x) {
        double s = x / kTol.dedup_grid;
        if (!(std::abs(s) < 9.0e18)) throw DomainError("coordinate too large for the float canonical key");
        return s;
    }

    static QuantKey base_key(const OrientedSphere& v) {
        auto x = coords(v);
        QuantKey k{tag(v), 0, 0, 0, 0};
        for (int a = 0; a < 4; ++a) k[a + 1] = static_cast<std::int64_t>(std::floor(scaled(x[a])));
        return k;
    }

    template <class F>
    static void probe(const OrientedSphere& v, F&& visit) {
        auto x = coords(v);
        QuantKey k = base_key(v);
        std::array<int, 4> step{};
        for (int a = 0; a < 4; ++a) {
            double s = scaled(x[a]);
            double frac = s - std::floor(s);
            step[a] = frac < 0.01 ? -1 : (frac > 0.99 ? 1 : 0);
        }
        for (int mask = 0; mask < 16; ++mask) {
            bool valid = true;
            QuantKey kk = k;
            for (int a = 0; a < 4; ++a) {
                if (mask & (1 << a)) {
                    if (step[a] == 0) {
                        valid = false;
                        break;
                    }
                    kk[a + 1] += step[a];
                }
            }
            if (valid) visit(kk);
        }
    }

    std::unordered_set<QuantKey, QuantKeyHash> set_;
};

// ---------------------------------------------------------------------------
// Generation engine

struct Limits {
    double max_curvature = std::numeric_limits<double>::infinity();
    int max_depth = std::numeric_limits<int>::max();
    std::size_t max_circles = std::numeric_limits<std::size_t>::max();
};

constexpr std::size_t kNewbornBudget = 200'000'000;

template <class T>
struct Node {
    DescartesQuadruple<T> q;
    int depth = 0;
};

template <class T>
struct Expansion {
    std::vector<Inversive<T>> newborns;
    std::vector<Node<T>> children;
    std::uint64_t pruned = 0;
};

template <class T>
class Engine {
public:
    Engine(const PackingSpec& spec, const Limits& limits) : spec_(spec), limits_(limits) {}

    bool keep(const Inversive<T>& v) const {
        OrientedSphere f = as_float(v);
        if (std::abs(f.b) > limits_.max_curvature) return false;
        if (spec_.window && !interior_meets_box(f, *spec_.window)) return false;
        return true;
    }

    // Children of one node, in slot order.
    void expand(const Node<T>& node, Expansion<T>& out) const {
        const auto& q = node.q;
        const bool last_level = node.depth + 1 > limits_.max_depth;
        if (last_level) return;
        for (int i = 0; i < q.size(); ++i) {
            if (i == q.incoming) continue;
            if (spec_.dual_group()) {
                expand_dual(node, i, out);
            } else {
                expand_apollonian(node, i, out);
            }
        }
    }

private:
    void check_monotone(double born, double floor_b) const {
        double tol = 1e-9 * std::max(1.0, std::abs(floor_b));
        if (born < floor_b - tol) {
            throw InvariantError("curvature decreased along a non-backtracking reflection (" + format_double(born) +
                                 " < " + format_double(floor_b) + "); cutoff pruning would be unsound");
        }
    }

    void expand_apollonian(const Node<T>& node, int i, Expansion<T>& out) const {
        const auto& q = node.q;
        Inversive<T> v = reflected_slot(q, i);
        double born = to_double(v.b);
        if (q.dim == 2) {
            if (q.incoming >= 0) check_monotone(born, to_double(q[q.incoming].b));
        } else if (!(born > to_double(q[i].b) + 1e-9 * std::max(1.0, std::abs(born)))) {
            // Sphere reflections satisfy braid relations, so words are not free; only
            // curvature-increasing moves are followed (from every root quintuple).
            return;
        }
        if (born > limits_.max_curvature) {
            ++out.pruned;
            return;
        }
        if (spec_.window) {
            // Descendants stay inside the gap: the side of the dual sphere away from slot i.
            OrientedSphere gap = -as_float(dual_direction(q, i));
            if (!interior_meets_box(gap, *spec_.window)) {
                ++out.pruned;
                return;
            }
        }
        Node<T> child{q, node.depth + 1};
        child.q[i] = v;
        child.q.incoming = i;
        if (!spec_.window || interior_meets_box(as_float(v), *spec_.window)) out.newborns.push_back(v);
        out.children.push_back(std::move(child));
    }

    void expand_dual(const Node<T>& node, int k, Expansion<T>& out) const {
        const auto& q = node.q;
        OrientedSphere mirror = as_float(q[k]);
        double mirror_b = std::abs(mirror.b);
        if (mirror_b > limits_.max_curvature) {
            ++out.pruned;
            return;
        }
        if (spec_.window && mirror.b != 0.0) {
            OrientedSphere disk = mirror.b > 0.0 ? mirror : -mirror;
            if (!interior_meets_box(disk, *spec_.window)) {
                ++out.pruned;
                return;
            }
        }
        Node<T> child{q, node.depth + 1};
        child.q.incoming = k;
        for (int j = 0; j < q.size(); ++j) {
            if (j == k) {
                child.q[j] = -q[k];
                continue;
            }
            child.q[j] = plus_twice(q[j], q[k]);
            double born = std::abs(to_double(child.q[j].b));
            if (mirror.b != 0.0) check_monotone(born, mirror_b);
            if (keep(child.q[j])) out.newborns.push_back(child.q[j]);
        }
        out.children.push_back(std::move(child));
    }

    const PackingSpec& spec_;
    Limits limits_;
};

template <class T>
DescartesQuadruple<T> root_quadruple(const PackingSpec& spec);

template <>
DescartesQuadruple<Int128> root_quadruple<Int128>(const PackingSpec& spec) {
    auto q = make_quadruple(spec.exact_root, spec.dim);
    validate_quadruple(q);
    return q;
}

template <>
DescartesQuadruple<double> root_quadruple<double>(const PackingSpec& spec) {
    auto q = make_quadruple(spec.float_root, spec.dim);
    validate_quadruple(q, kTol.normalization * 100);
    return q;
}

// Quintuples reachable from the root by curvature-preserving reflections. In three
// dimensions each of them is a starting point of the increasing search.
template <class T>
std::vector<Node<T>> root_class(const DescartesQuadruple<T>& root) {
    std::vector<Node<T>> out{{root, 0}};
    if (root.dim == 2) return out;
    auto key = [](const DescartesQuadruple<T>& q) {
        std::vector<long long> k;
        for (int i = 0; i < q.size(); ++i) {
            OrientedSphere f = as_float(q[i]);
            for (double x : {f.b, f.bhat, f.c[0], f.c[1], f.c[2]}) k.push_back(std::llround(x * 1e8));
        }
        return k;
    };
    std::set<std::vector<long long>> seen{key(root)};
    for (std::size_t head = 0; head < out.size(); ++head) {
        for (int i = 0; i < root.size(); ++i) {
            auto q = out[head].q;
            Inversive<T> v = reflected_slot(q, i);
            double b0 = to_double(q[i].b), b1 = to_double(v.b);
            if (std::abs(b1 - b0) > 1e-9 * std::max(1.0, std::abs(b0))) continue;
            q[i] = v;
            q.incoming = -1;
            if (seen.insert(key(q)).second) out.push_back({q, 0});
            if (out.size() > 10000) throw InvariantError("root class of the configuration is not finite");
        }
    }
    return out;
}

template <class T>
struct RawOutput {
    std::vector<Inversive<T>> circles;
    GenerationStats stats;
};

template <class T>
void run_dfs(const Engine<T>& engine, const Node<T>& seed, std::vector<Inversive<T>>& out, GenerationStats& stats) {
    std::vector<Node<T>> stack{seed};
    Expansion<T> ex;
    while (!stack.empty()) {
        Node<T> node = std::move(stack.back());
        stack.pop_back();
        ex.newborns.clear();
        ex.children.clear();
        ex.pruned = 0;
        engine.expand(node, ex);
        ++stats.nodes_expanded;
        stats.pruned += ex.pruned;
        out.insert(out.end(), ex.newborns.begin(), ex.newborns.end());
        if (out.size() > kNewbornBudget) throw CutoffError("generation exceeded the circle budget");
        // Reverse push keeps pre-order in slot order.
        for (auto it = ex.children.rbegin(); it != ex.children.rend(); ++it) stack.push_back(std::move(*it));
        stats.peak_frontier = std::max<std::uint64_t>(stats.peak_frontier, stack.size());
    }
}

// Three-dimensional search. Increasing moves raise the curvature sum, and every path to a
// quintuple passes only through quintuples of smaller sum, so processing buckets of equal sum
// in increasing order sees all copies of a quintuple together and expands it once.
template <class T>
void enumerate_by_sum(const Engine<T>& engine, const std::vector<Node<T>>& roots, int workers, RawOutput<T>& raw) {
    using Key = std::array<std::int64_t, 30>;
    auto sum_of = [](const DescartesQuadruple<T>& q) {
        double s = 0.0;
        for (int i = 0; i < q.size(); ++i) s += to_double(q[i].b);
        return s;
    };
    auto key_of = [](const DescartesQuadruple<T>& q) {
        std::array<std::array<std::int64_t, 6>, 5> parts{};
        for (int i = 0; i < q.size(); ++i) {
            OrientedSphere f = as_float(q[i]);
            if (f.b == 0.0) {
                parts[static_cast<std::size_t>(i)] = {3, std::llround(f.bhat * 1e8), std::llround(f.c[0] * 1e8),
                                                      std::llround(f.c[1] * 1e8), std::llround(f.c[2] * 1e8), 0};
            } else {
                parts[static_cast<std::size_t>(i)] = {f.b > 0 ? 1 : 2, std::llround(1e8 / std::abs(f.b)),
                                                      std::llround(f.c[0] / f.b * 1e8), std::llround(f.c[1] / f.b * 1e8),
                                                      std::llround(f.c[2] / f.b * 1e8), 0};
            }
        }
        std::sort(parts.begin(), parts.end());
        Key k{};
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 6; ++j) k[6 * i + j] = parts[i][j];
        return k;
    };
    // Sums are compared after rounding so float noise cannot split a bucket.
    auto bucket_of = [](double s) { return std::llround(s * 1e6); };

    std::map<long long, std::vector<Node<T>>> buckets;
    for (const auto& r : roots) buckets[bucket_of(sum_of(r.q))].push_back(r);
    while (!buckets.empty()) {
        std::vector<Node<T>> nodes = std::move(buckets.begin()->second);
        buckets.erase(buckets.begin());
        std::vector<std::pair<Key, std::size_t>> keyed;
        keyed.reserve(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) keyed.emplace_back(key_of(nodes[i].q), i);
        std::sort(keyed.begin(), keyed.end());
        std::vector<Node<T>> unique;
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
            Node<T> n = nodes[keyed[i].second];
            n.q.incoming = -1;
            unique.push_back(std::move(n));
        }
        std::vector<Node<T>>().swap(nodes);

        std::vector<Expansion<T>> ex(unique.size());
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < unique.size();) engine.expand(unique[i], ex[i]);
        };
        int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(unique.size() / 64)));
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();

        raw.stats.nodes_expanded += unique.size();
        for (auto& e : ex) {
            raw.stats.pruned += e.pruned;
            raw.circles.insert(raw.circles.end(), e.newborns.begin(), e.newborns.end());
            for (auto& c : e.children) buckets[bucket_of(sum_of(c.q))].push_back(std::move(c));
        }
        if (raw.circles.size() > kNewbornBudget) throw CutoffError("generation exceeded the circle budget");
        std::uint64_t pending = 0;
        for (const auto& [k, v] : buckets) pending += v.size();
        raw.stats.peak_frontier = std::max<std::uint64_t>(raw.stats.peak_frontier, pending);
    }
}

template <class T>
RawOutput<T> enumerate(const PackingSpec& spec, const Limits& limits, int workers) {
    Engine<T> engine(spec, limits);
    RawOutput<T> raw;
    Node<T> root{root_quadruple<T>(spec), 0};
    std::vector<Node<T>> roots = spec.dual_group() ? std::vector<Node<T>>{root} : root_class(root.q);
    for (const auto& r : roots)
        for (int i = 0; i < r.q.size(); ++i)
            if (engine.keep(r.q[i])) raw.circles.push_back(r.q[i]);

    if (limits.max_circles != std::numeric_limits<std::size_t>::max()) {
        if (raw.circles.size() > limits.max_circles)
            throw DomainError("max_circles is smaller than the root configuration");
        // Whole breadth-first levels only.
        std::vector<Node<T>> level = roots;
        while (!level.empty()) {
            Expansion<T> ex;
            for (const auto& node : level) {
                engine.expand(node, ex);
                ++raw.stats.nodes_expanded;
            }
            raw.stats.pruned += ex.pruned;
            if (raw.circles.size() + ex.newborns.size() > limits.max_circles) break;
            raw.circles.insert(raw.circles.end(), ex.newborns.begin(), ex.newborns.end());
            level = std::move(ex.children);
            raw.stats.peak_frontier = std::max<std::uint64_t>(raw.stats.peak_frontier, level.size());
        }
        return raw;
    }

    if (root.q.dim == 3 && !spec.dual_group()) {
        enumerate_by_sum(engine, roots, workers, raw);
        return raw;
    }

    // Seed frontier by breadth-first levels; seeds are then completed depth-first.
    std::vector<Node<T>> frontier = roots;
    while (!frontier.empty() && frontier.size() < 256) {
        Expansion<T> ex;
        for (const auto& node : frontier) {
            engine.expand(node, ex);
            ++raw.stats.nodes_expanded;
        }
        raw.stats.pruned += ex.pruned;
        raw.circles.insert(raw.circles.end(), ex.newborns.begin(), ex.newborns.end());
        frontier = std::move(ex.children);
        raw.stats.peak_frontier = std::max<std::uint64_t>(raw.stats.peak_frontier, frontier.size());
    }

    std::vector<std::vector<Inversive<T>>> parts(frontier.size());
    std::vector<GenerationStats> part_stats(frontier.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= frontier.size() || failed.load()) return;
            try {
                run_dfs(engine, frontier[k], parts[k], part_stats[k]);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(frontier.size())));
    if (nthreads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::uint64_t peak = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        raw.circles.insert(raw.circles.end(), parts[k].begin(), parts[k].end());
        raw.stats.nodes_expanded += part_stats[k].nodes_expanded;
        raw.stats.pruned += part_stats[k].pruned;
        peak = std::max(peak, part_stats[k].peak_frontier);
        std::vector<Inversive<T>>().swap(parts[k]);
    }
    raw.stats.peak_frontier = std::max(raw.stats.peak_frontier, peak);
    return raw;
}

Limits make_limits(const PackingSpec& spec, const GenerationCutoff& cutoff) {
    if (!(cutoff.value >= 0.0) || !std::isfinite(cutoff.value)) throw DomainError("generation cutoff must be non-negative");
    Limits lim;
    switch (cutoff.kind) {
        case GenerationCutoff::Kind::max_abs_curvature:
            lim.max_curvature = cutoff.value;
            if (spec.exact() && cutoff.value > 4.0e18) {
                throw OverflowError("curvature cutoff " + format_double(cutoff.value) +
                                    " exceeds the exact 128-bit integer width");
            }
            if (spec.kind == PackingKind::strip_p0 && !spec.window) {
                throw DomainError("the strip packing needs a window for a curvature cutoff");
            }
            break;
        case GenerationCutoff::Kind::max_word_length:
            lim.max_depth = static_cast<int>(cutoff.value);
            break;
        case GenerationCutoff::Kind::max_circles:
            lim.max_circles = static_cast<std::size_t>(cutoff.value);
            break;
    }
    return lim;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(PackingKind kind) {
    switch (kind) {
        case PackingKind::bounded_integral: return "bounded_integral";
        case PackingKind::strip_p0: return "strip_p0";
        case PackingKind::custom_float: return "custom_float";
        case PackingKind::sphere3d: return "sphere3d";
        case PackingKind::dual_cluster: return "dual_cluster";
    }
    return "unknown";
}

PackingKind packing_kind_from_string(const std::string& s) {
    for (auto k : {PackingKind::bounded_integral, PackingKind::strip_p0, PackingKind::custom_float,
                   PackingKind::sphere3d, PackingKind::dual_cluster}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown packing kind '" + s + "'");
}

std::string to_string(const GenerationCutoff& c) {
    switch (c.kind) {
        case GenerationCutoff::Kind::max_abs_curvature: return "curvature:" + format_double(c.value);
        case GenerationCutoff::Kind::max_word_length: return "word_length:" + format_double(c.value);
        case GenerationCutoff::Kind::max_circles: return "circles:" + format_double(c.value);
    }
    return "unknown";
}

std::vector<OrientedSphere> PackingSpec::root_float() const {
    if (!exact()) return float_root;
    std::vector<OrientedSphere> out;
    for (const auto& v : exact_root) out.push_back(to_float(v));
    return out;
}

std::string PackingSpec::canonical_text() const {
    std::string s = "kind=" + to_string(kind) + ";dim=" + std::to_string(dim) + ";mode=" + (exact() ? "exact" : "float") +
                    ";root=";
    bool first = true;
    auto sep = [&]() {
        if (!first) s += '|';
        first = false;
    };
    if (exact()) {
        for (const auto& v : exact_root) {
            sep();
            s += to_string(v.b) + "," + to_string(v.bhat) + "," + to_string(v.c[0]) + "," + to_string(v.c[1]) + "," +
                 to_string(v.c[2]);
        }
    } else {
        for (const auto& v : float_root) {
            sep();
            s += format_double(v.b) + "," + format_double(v.bhat) + "," + format_double(v.c[0]) + "," +
                 format_double(v.c[1]) + "," + format_double(v.c[2]);
        }
    }
    if (window) {
        s += ";window=" + format_double(window->x0) + "," + format_double(window->x1) + "," + format_double(window->y0) +
             "," + format_double(window->y1);
    }
    return s;
}

PackingSpec PackingSpec::from_text(const std::string& text) {
    PackingSpec spec;
    std::string mode;
    std::string root;
    for (const auto& field : split(text, ';')) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed spec field '" + field + "'");
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "kind") {
            spec.kind = packing_kind_from_string(val);
        } else if (key == "dim") {
            spec.dim = static_cast<int>(parse_double(val));
        } else if (key == "mode") {
            mode = val;
        } else if (key == "root") {
            root = val;
        } else if (key == "window") {
            auto v = split(val, ',');
            if (v.size() != 4) throw ConfigError("window needs four numbers");
            spec.window = Box2{parse_double(v[0]), parse_double(v[1]), parse_double(v[2]), parse_double(v[3])};
        } else {
            throw ConfigError("unknown spec field '" + key + "'");
        }
    }
    if (mode != "exact" && mode != "float") throw ConfigError("spec mode must be exact or float");
    for (const auto& item : split(root, '|')) {
        auto v = split(item, ',');
        if (v.size() != 5) throw ConfigError("root sphere needs five coordinates");
        if (mode == "exact") {
            spec.exact_root.push_back(
                {parse_int128(v[0]), parse_int128(v[1]), {parse_int128(v[2]), parse_int128(v[3]), parse_int128(v[4])}});
        } else {
            spec.float_root.push_back(
                {parse_double(v[0]), parse_double(v[1]), {parse_double(v[2]), parse_double(v[3]), parse_double(v[4])}});
        }
    }
    if (spec.dim != 2 && spec.dim != 3) throw ConfigError("spec dimension must be 2 or 3");
    if (static_cast<int>(spec.root_size()) != spec.dim + 2) throw ConfigError("root has the wrong number of spheres");
    return spec;
}

PackingSpec PackingSpec::bounded() {
    return bounded({ex(-1, 1, 0, 0), ex(2, 0, 1, 0), ex(2, 0, -1, 0), ex(3, 1, 0, 2)});
}

PackingSpec PackingSpec::bounded(std::vector<ExactSphere> root) {
    PackingSpec s;
    s.kind = PackingKind::bounded_integral;
    s.dim = 2;
    s.exact_root = std::move(root);
    validate_quadruple(make_quadruple(s.exact_root, 2));
    return s;
}

PackingSpec PackingSpec::strip(double y_lo, double y_hi) {
    if (!(y_hi - y_lo >= 2.0)) throw DomainError("strip window must span at least one period");
    PackingSpec s;
    s.kind = PackingKind::strip_p0;
    s.dim = 2;
    s.exact_root = {ex(0, 2, 1, 0), ex(0, 2, -1, 0), ex(1, -1, 0, 0), ex(1, 3, 0, -2)};
    s.window = Box2{-1.0, 1.0, y_lo, y_hi};
    return s;
}

PackingSpec PackingSpec::custom(std::vector<OrientedSphere> root, int dim) {
    PackingSpec s;
    s.kind = PackingKind::custom_float;
    s.dim = dim;
    s.float_root = std::move(root);
    validate_quadruple(make_quadruple(s.float_root, dim), kTol.normalization * 100);
    return s;
}

PackingSpec PackingSpec::sphere3d() {
    const double h = std::sqrt(3.0) / 3.0;
    PackingSpec s;
    s.kind = PackingKind::sphere3d;
    s.dim = 3;
    s.float_root = {sphere_from_center_radius({0, 0, 0}, 1.0, -1), sphere_from_center_radius({0.5, 0, 0}, 0.5),
                    sphere_from_center_radius({-0.5, 0, 0}, 0.5), sphere_from_center_radius({0, h, 1.0 / 3.0}, 1.0 / 3.0),
                    sphere_from_center_radius({0, h, -1.0 / 3.0}, 1.0 / 3.0)};
    validate_quadruple(make_quadruple(s.float_root, 3), kTol.normalization * 100);
    return s;
}

PackingSpec PackingSpec::dual_cluster() {
    PackingSpec s;
    s.kind = PackingKind::dual_cluster;
    s.dim = 2;
    s.exact_root = {ex(2, 0, 1, 0), ex(2, 0, -1, 0), ex(3, 1, 0, 2), ex(15, 1, 0, 4)};
    validate_quadruple(make_quadruple(s.exact_root, 2));
    return s;
}

PackingSpec PackingSpec::dual_cluster(std::vector<OrientedSphere> root, int dim) {
    PackingSpec s;
    s.kind = PackingKind::dual_cluster;
    s.dim = dim;
    s.float_root = std::move(root);
    validate_quadruple(make_quadruple(s.float_root, dim), kTol.normalization * 100);
    return s;
}

double PackingStore::curvature_bound() const {
    return cutoff.kind == GenerationCutoff::Kind::max_abs_curvature ? cutoff.value
                                                                     : std::numeric_limits<double>::infinity();
}

bool operator==(const PackingStore& a, const PackingStore& b) {
    return a.spec.canonical_text() == b.spec.canonical_text() && a.cutoff == b.cutoff &&
           a.exact_records == b.exact_records && a.records == b.records && a.stats == b.stats;
}

bool interior_meets_box(const OrientedSphere& g, const Box2& box) {
    const double slack = 1e-9;
    const std::array<std::array<double, 2>, 4> corners{
        {{box.x0, box.y0}, {box.x1, box.y0}, {box.x0, box.y1}, {box.x1, box.y1}}};
    if (g.b == 0.0) {
        double h = 0.5 * g.bhat;
        for (const auto& p : corners)
            if (g.c[0] * p[0] + g.c[1] * p[1] >= h - slack * std::max(1.0, std::abs(h))) return true;
        return false;
    }
    double px = g.c[0] / g.b, py = g.c[1] / g.b, r = 1.0 / std::abs(g.b);
    if (g.b > 0.0) {
        double dx = std::max({box.x0 - px, 0.0, px - box.x1});
        double dy = std::max({box.y0 - py, 0.0, py - box.y1});
        return std::hypot(dx, dy) <= r * (1.0 + slack) + slack;
    }
    for (const auto& p : corners)
        if (std::hypot(p[0] - px, p[1] - py) >= r * (1.0 - slack) - slack) return true;
    return false;
}

PackingStore generate(const PackingSpec& spec, const GenerationCutoff& cutoff, int workers) {
    Limits limits = make_limits(spec, cutoff);
    PackingStore store;
    store.spec = spec;
    store.cutoff = cutoff;
    if (spec.exact()) {
        auto raw = enumerate<Int128>(spec, limits, workers);
        store.stats = raw.stats;
        auto& v = raw.circles;
        std::sort(v.begin(), v.end(), canonical_less<Int128>);
        auto last = std::unique(v.begin(), v.end());
        store.stats.dedup_hits = static_cast<std::uint64_t>(v.end() - last);
        v.erase(last, v.end());
        store.exact_records = std::move(v);
        store.records.reserve(store.exact_records.size());
        for (const auto& e : store.exact_records) store.records.push_back(to_float(e));
    } else {
        auto raw = enumerate<double>(spec, limits, workers);
        store.stats = raw.stats;
        FloatIndex index;
        std::vector<OrientedSphere> kept;
        kept.reserve(raw.circles.size());
        for (const auto& c : raw.circles) {
            if (index.insert(c)) {
                kept.push_back(c);
            } else {
                ++store.stats.dedup_hits;
            }
        }
        std::sort(kept.begin(), kept.end(), canonical_less<double>);
        store.records = std::move(kept);
    }
    return store;
}

std::size_t circle_count_by_curvature(const PackingStore& store, double x) {
    if (x > store.curvature_bound()) {
        throw CutoffError("curvature bound " + format_double(x) + " exceeds the store cutoff " +
                          format_double(store.curvature_bound()));
    }
    // Records are sorted by |b|; negative curvatures and lines are skipped.
    std::size_t n = 0;
    for (const auto& r : store.records) {
        if (std::abs(r.b) > x) break;
        if (r.b > 0.0) ++n;
    }
    return n;
}

std::vector<MobiusMap> packing_generators(const PackingSpec& spec) {
    std::vector<MobiusMap> gens;
    if (spec.exact()) {
        auto q = make_quadruple(spec.exact_root, spec.dim);
        for (int i = 0; i < q.size(); ++i)
            gens.push_back(MobiusMap::inversion(spec.dual_group() ? q[i] : dual_direction(q, i)));
    } else {
        auto q = make_quadruple(spec.float_root, spec.dim);
        for (int i = 0; i < q.size(); ++i)
            gens.push_back(MobiusMap::inversion(spec.dual_group() ? q[i] : dual_sphere(q, i)));
    }
    return gens;
}

InvarianceReport verify_gamma_invariance(const PackingStore& store, const MobiusMap& m) {
    InvarianceReport report;
    const double bound = store.curvature_bound();
    auto covered = [&](const OrientedSphere& img) {
        if (std::abs(img.b) > bound * (1.0 + 1e-12)) return false;
        if (store.spec.window && !interior_meets_box(img, *store.spec.window)) return false;
        return true;
    };
    if (store.exact() && m.exact()) {
        std::unordered_set<ExactSphere, ExactKeyHash> index(store.exact_records.begin(), store.exact_records.end());
        for (std::size_t k = 0; k < store.exact_records.size(); ++k) {
            OrientedSphere img_f = apply(m, store.records[k]);
            if (!covered(img_f)) continue;
            ++report.checked;
            auto img = apply_exact(m, store.exact_records[k]);
            bool found = img && (index.count(*img) || (store.spec.dual_group() && index.count(-*img)));
            if (!found) report.violations.push_back(k);
        }
        return report;
    }
    FloatIndex index;
    for (const auto& r : store.records) index.insert(r);
    for (std::size_t k = 0; k < store.records.size(); ++k) {
        OrientedSphere img = apply(m, store.records[k]);
        if (!covered(img)) continue;
        ++report.checked;
        if (!index.contains(img) && !(store.spec.dual_group() && index.contains(-img))) report.violations.push_back(k);
    }
    return report;
}

}  // namespace apollo
