// Runs the twelve acceptance criteria and prints one PASS/FAIL line for each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/resource.h>
#include <unistd.h>

#include "apollo/counting.hpp"
#include "apollo/orbits.hpp"
#include "apollo/residual.hpp"
#include "cli.hpp"

using namespace apollo;
namespace fs = std::filesystem;

namespace {

constexpr double kAlpha = 1.30568;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string f(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

long peak_rss_mb() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return ru.ru_maxrss / 1024;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Shared {
    PackingStore bounded;
    PackingStore strip;
    double alpha = 0.0;
};

Outcome descartes_exactness() {
    auto t0 = std::chrono::steady_clock::now();
    auto spec = PackingSpec::bounded();
    const ExactQuadruple root = make_quadruple(spec.exact_root, 2);
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> len(0, 40), slot(0, 3);
    long long bad = 0, steps = 0;
    for (int w = 0; w < 10000; ++w) {
        ExactQuadruple q = root;
        int last = -1, n = len(rng);
        for (int k = 0; k < n; ++k) {
            int i;
            do i = slot(rng);
            while (i == last);
            q = descartes_reflect(q, i);
            last = i;
            ++steps;
            Int128 sum = 0, sq = 0;
            for (int j = 0; j < 4; ++j) sum += q[j].b, sq += q[j].b * q[j].b;
            if (sum * sum != 2 * sq) ++bad;
        }
    }
    double dt = seconds_since(t0);
    return {bad == 0 && dt < 5.0, f("%lld reflections, %lld identity failures, %.2f s (limit 5 s)", steps, bad, dt)};
}

Outcome curvature_growth(Shared& sh) {
    auto t0 = std::chrono::steady_clock::now();
    sh.bounded = generate(PackingSpec::bounded(), GenerationCutoff::curvature(1e5), workers());
    auto fit = curvature_growth_fit(sh.bounded, 1e2, 1e5);
    double dt = seconds_since(t0);
    long mb = peak_rss_mb();
    sh.alpha = fit.exponent;
    bool ok = fit.exponent >= 1.27 && fit.exponent <= 1.34 && dt < 60.0 && mb < 2048;
    return {ok, f("alpha = %.4f +- %.4f on [1e2, 1e5] (accept [1.27, 1.34]), %zu circles, %.1f s, peak RSS %ld MB",
                  fit.exponent, fit.stderr_, sh.bounded.size(), dt, mb)};
}

Outcome counting_exponent(const Shared& sh) {
    auto curve = count_curve(sh.bounded, ConformalMetric::euclidean(), Region::disk({0, 0, 0}, 1.0), geometric_grid(1, 1e-12, 16),
                             workers());
    auto fit = fit_exponent(curve);
    double half = sh.alpha / 2.0;
    bool ok = std::abs(fit.exponent - half) <= 0.03 && fit.exponent >= 0.62 && fit.exponent <= 0.69;
    return {ok, f("exponent %.4f on t in [%.3g, %.3g]; alpha/2 from criterion 2 = %.4f (tol 0.03); absolute window [0.62, 0.69]",
                  fit.exponent, fit.t_lo, fit.t_hi, half)};
}

Outcome metric_independence(const Shared& sh) {
    auto A = Region::rectangle(-1, 0, -1, 1), B = Region::rectangle(0.2, 1, 0, 1);
    struct Case {
        ConformalMetric m;
        Region r;
        const char* name;
    };
    std::vector<double> c;
    std::string detail;
    for (const auto& k : {Case{ConformalMetric::euclidean(), A, "euclidean/A"}, Case{ConformalMetric::euclidean(), B, "euclidean/B"},
                          Case{ConformalMetric::spherical(), A, "spherical/A"}}) {
        auto curve = count_curve(sh.bounded, k.m, k.r, geometric_grid(1, 1e-12, 16), workers());
        double h = estimate_weighted_measure(PackingSpec::bounded(), k.r, k.m, kAlpha, 12, workers());
        auto est = estimate_ca(curve, h, kAlpha);
        c.push_back(est.c_a);
        detail += f("%s c_A = %.4f (H = %.4f); ", k.name, est.c_a, h);
    }
    double spread = *std::max_element(c.begin(), c.end()) / *std::min_element(c.begin(), c.end()) - 1.0;
    return {spread <= 0.15, detail + f("max relative spread %.3f (limit 0.15)", spread)};
}

Outcome ideal_triangle(Shared& sh) {
    sh.strip = generate(PackingSpec::strip(0.0, 2.0), GenerationCutoff::curvature(1e5), workers());
    auto curve = ideal_triangle_count(sh.strip, geometric_grid(10, 1e-12, 16), workers());
    auto fit = fit_exponent(curve);
    bool ok = std::abs(fit.exponent - kAlpha / 2.0) <= 0.05;
    return {ok, f("exponent %.4f on t in [%.3g, %.3g] vs alpha/2 = %.4f (tol 0.05); strip store %zu circles", fit.exponent,
                  fit.t_lo, fit.t_hi, kAlpha / 2.0, sh.strip.size())};
}

Outcome band_tails(const Shared& sh) {
    auto k1 = band_tail_experiment(sh.strip, 1.0, 1e-4, 1, 100, workers());
    auto k05 = band_tail_experiment(sh.strip, 0.5, 1e-4, 1, 100, workers());
    double tail = k1.tail_fraction(30);
    double growth = static_cast<double>(k05.row(100).cumulative) / static_cast<double>(k05.row(10).cumulative);
    auto v1 = k1.injection_violations(), v05 = k05.injection_violations();
    bool cauchy = tail < 0.05, grows = growth > 2.0, inject = v1.empty() && v05.empty();
    std::string viol;
    for (int n : v1) viol += f(" k=1:n=%d", n);
    for (int n : v05) viol += f(" k=0.5:n=%d", n);
    return {cauchy && grows && inject,
            f("t = 1e-4. k=1 tail beyond band 30 = %.4f of total (limit 0.05) %s; k=0.5 S_100/S_10 = %llu/%llu = %.2f (need > 2) %s; "
              "injection %s",
              tail, cauchy ? "ok" : "FAILS", static_cast<unsigned long long>(k05.row(100).cumulative),
              static_cast<unsigned long long>(k05.row(10).cumulative), growth, grows ? "ok" : "FAILS",
              inject ? "holds for n = 1..100" : ("violated at" + viol).c_str())};
}

Outcome hausdorff_dimension() {
    std::vector<int> levels{8, 9, 10, 11, 12};
    auto b = estimate_dimension(PackingSpec::bounded(), Region::disk({0, 0, 0}, 1.0), levels, workers());
    auto s = estimate_dimension(PackingSpec::strip(0.0, 2.0), Region::rectangle(-1, 1, 0, 2), levels, workers());
    std::vector<GapCover> dust;
    for (int l = 2; l <= 8; ++l) dust.push_back(cantor_dust_cover(l));
    double d = estimate_dimension(dust).s_star, exact = std::log(4.0) / std::log(3.0);
    auto in = [](double x) { return x >= 1.25 && x <= 1.36; };
    bool ok = in(b.s_star) && in(s.s_star) && std::abs(d - exact) <= 0.02;
    return {ok, f("levels 8..12: bounded s* = %.4f, strip s* = %.4f (accept [1.25, 1.36]); Cantor dust %.6f vs log4/log3 = %.6f "
                  "(tol 0.02)",
                  b.s_star, s.s_star, d, exact)};
}

Outcome sphere_packing() {
    auto t0 = std::chrono::steady_clock::now();
    auto store = generate(PackingSpec::sphere3d(), GenerationCutoff::curvature(1e3), workers());
    auto fit = curvature_growth_fit(store, 10, 1e3);
    double dt = seconds_since(t0);
    bool ok = fit.exponent >= 2.32 && fit.exponent <= 2.62 && dt < 120.0;
    return {ok, f("exponent %.4f +- %.4f on [10, 1e3] (accept [2.32, 2.62]), %zu spheres, %.1f s (limit 120 s)", fit.exponent,
                  fit.stderr_, store.size(), dt)};
}

Outcome quadrature_oracle() {
    std::mt19937_64 rng(977);
    std::uniform_real_distribution<double> U(-2, 2), R(0.05, 1.5), Rho(0.05, 0.9), H(0.5, 3.0);
    struct M {
        ConformalMetric m;
        const char* name;
    };
    double worst = 0.0;
    std::string detail;
    int closed = 0, total = 0;
    for (const auto& [m, name] : {M{ConformalMetric::euclidean(), "euclidean"}, M{ConformalMetric::spherical(), "spherical"},
                                  M{ConformalMetric::hyperbolic(), "hyperbolic"}, M{ConformalMetric::power_law(0.5), "y^-0.5"},
                                  M{ConformalMetric::power_law(1.7), "y^-1.7"}}) {
        double w = 0.0;
        for (int i = 0; i < 100; ++i) {
            OrientedSphere s;
            if (m.half_space()) {
                double y = H(rng);
                s = circle_from_center_radius(U(rng), y, Rho(rng) * y);
            } else {
                s = circle_from_center_radius(U(rng), U(rng), R(rng));
            }
            auto a = vol_f(m, s);
            auto q = vol_quadrature(m, s);
            closed += a.method == VolResult::Method::closed_form;
            ++total;
            w = std::max(w, std::abs(a.value - q.value) / std::abs(q.value));
        }
        worst = std::max(worst, w);
        detail += f("%s %.2g; ", name, w);
    }
    return {worst <= 1e-8, f("max relative deviation per metric: %s%d/%d closed forms (limit 1e-8)", detail.c_str(), closed, total)};
}

struct OrbitShared {
    GroupPresentation pres = GroupPresentation::from_spec(PackingSpec::strip(0.0, 2.0));
};

Outcome patterson(const OrbitShared& o) {
    auto probe = generate(PackingSpec::strip(-1.0, 3.0), GenerationCutoff::curvature(400), workers());
    ResidualLocator loc(probe);
    std::vector<double> ratio;
    double mass = 0.0, near = 0.0;
    for (int L : {12, 13, 14}) {
        auto mu = patterson_truncated(o.pres, origin(), 1.35, L, kAlpha, workers());
        ratio.push_back(mu.ball_mass(0.45, 0.8, 0.25) / mu.ball_mass(-0.5, 1.4, 0.25));
        if (L == 14) {
            mass = mu.total_mass();
            for (const auto& a : mu.atoms)
                if (loc.distance(a.x, a.y) <= 0.05) near += a.weight;
        }
    }
    bool unit = std::abs(mass - 1.0) <= 1e-12;
    bool conc = near >= 0.99;
    bool stable = std::abs(ratio[2] / ratio[0] - 1.0) <= 0.10 && std::abs(ratio[1] / ratio[0] - 1.0) <= 0.10;
    return {unit && conc && stable,
            f("L=14, s=1.35: mass %.15f %s; mass within 0.05 of Res = %.3f (need >= 0.99) %s; ball ratio L=12,13,14 = %.2f, %.2f, %.2f "
              "(tol 10%%) %s",
              mass, unit ? "ok" : "FAILS", near, conc ? "ok" : "FAILS", ratio[0], ratio[1], ratio[2], stable ? "ok" : "FAILS")};
}

Outcome norm_growth(const OrbitShared& o) {
    auto nc = norm_ball_count(o.pres, 14, 16, workers());
    bool ok = nc.fit.exponent >= 2.2 && nc.fit.exponent <= 2.9 && nc.max_bridge_defect <= 1e-8;
    return {ok, f("even words to length 14: exponent %.4f +- %.4f on T in [%.3g, %.3g] (accept [2.2, 2.9]); max bridge defect %.2g "
                  "(limit 1e-8)",
                  nc.fit.exponent, nc.fit.stderr_, nc.fit.t_lo, nc.fit.t_hi, nc.max_bridge_defect)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs every command in `root` with the given worker count. Paths are relative so that
// resolved configs, and therefore manifests, do not mention the run directory.
void command_suite(const fs::path& root, int w) {
    fs::remove_all(root);
    fs::create_directories(root);
    auto cwd = fs::current_path();
    fs::current_path(root);
    ::setenv("APOLLO_CACHE_DIR", "cache", 1);
    using Sets = std::vector<std::string>;
    const std::vector<std::pair<std::string, Sets>> runs{
        {"gen", {"cutoff.value=5000", "out.dir=gen_bounded"}},
        {"count", {"cutoff.value=5000", "out.dir=count"}},
        {"fit", {"out.dir=count"}},
        {"count", {"cutoff.value=5000", "count.task=curvature", "curvature.x_lo=10", "out.dir=curvature"}},
        {"fit", {"fit.input=curvature_count.csv", "out.dir=curvature"}},
        {"ca", {"cutoff.value=5000", "region=rectangle:-0.3,0.7,0.1,0.6", "ca.level=9", "out.dir=ca"}},
        {"dim", {"dim.levels=5-8", "out.dir=dim"}},
        {"gen", {"packing=strip", "cutoff.value=3000", "out.dir=gen_strip"}},
        {"count", {"packing=strip", "cutoff.value=3000", "count.task=bands", "band.t=1e-2", "band.n_hi=20", "out.dir=bands"}},
        {"orbit", {"orbit.task=poincare", "orbit.L=10", "out.dir=poincare"}},
        {"orbit", {"orbit.task=patterson", "orbit.L=8", "out.dir=patterson"}},
        {"orbit", {"orbit.task=norm", "orbit.L=10", "out.dir=norm"}},
        {"render", {"cutoff.value=5000", "render.viewport=-1,1,-1,1", "out.dir=render"}},
    };
    std::ostringstream chatter;
    auto* saved = std::cout.rdbuf(chatter.rdbuf());
    auto* saved_err = std::cerr.rdbuf(chatter.rdbuf());
    for (const auto& [cmd, sets] : runs) {
        cli::Config c;
        for (const auto& s : sets) c.set(s);
        cli::run_command(cmd, c, w);
    }
    std::cout.rdbuf(saved);
    std::cerr.rdbuf(saved_err);
    fs::current_path(cwd);
}

Outcome determinism() {
    fs::path base = fs::temp_directory_path() / ("apollo_acceptance_" + std::to_string(::getpid()));
    const int wa = 1, wb = 7;
    command_suite(base / "a", wa);
    command_suite(base / "b", wb);
    std::size_t files = 0, differ = 0;
    std::string first;
    for (const auto& e : fs::recursive_directory_iterator(base / "a")) {
        if (!e.is_regular_file()) continue;
        auto rel = fs::relative(e.path(), base / "a");
        ++files;
        if (!fs::exists(base / "b" / rel) || slurp(e.path()) != slurp(base / "b" / rel)) {
            if (differ++ == 0) first = rel.string();
        }
    }
    std::size_t files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(base / "b")) files_b += e.is_regular_file();
    fs::remove_all(base);
    bool ok = differ == 0 && files == files_b && files > 0;
    return {ok, f("gen/count/fit/ca/dim/orbit/render with %d vs %d workers: %zu files compared, %zu differ%s", wa, wb, files, differ,
                  differ ? (", first " + first).c_str() : "")};
}

}  // namespace

int main() {
    Shared sh;
    OrbitShared orb;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Descartes exactness", descartes_exactness},
        {"curvature growth exponent", [&] { return curvature_growth(sh); }},
        {"conformal counting exponent", [&] { return counting_exponent(sh); }},
        {"metric independence of c_A", [&] { return metric_independence(sh); }},
        {"ideal triangle hyperbolic count", [&] { return ideal_triangle(sh); }},
        {"band tails", [&] { return band_tails(sh); }},
        {"Hausdorff dimension", hausdorff_dimension},
        {"sphere packing growth", sphere_packing},
        {"quadrature oracle", quadrature_oracle},
        {"Patterson truncation", [&] { return patterson(orb); }},
        {"norm-ball growth", [&] { return norm_growth(orb); }},
        {"determinism across workers", determinism},
    };
    int failed = 0, idx = 0;
    for (const auto& [name, run] : criteria) {
        ++idx;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2d %s [%.1f s]: %s\n", o.pass ? "PASS" : "FAIL", idx, name.c_str(), seconds_since(t0), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
