#include "apollo/metrics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <vector>

namespace apollo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ConfigError("malformed number '" + item + "'");
        }
        if (pos != item.size()) throw ConfigError("malformed number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

double height(const ConformalMetric& m, const Vec3& z) { return m.dim == 2 ? z[1] : z[2]; }

double norm2(const Vec3& z) { return z[0] * z[0] + z[1] * z[1] + z[2] * z[2]; }

// sinh(x) - x without cancellation.
double sinh_minus_x(double x) {
    if (std::abs(x) < 0.1) {
        double x2 = x * x;
        return x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)));
    }
    return std::sinh(x) - x;
}

// pi r^2 h^-2k 2F1(k, k + 1/2; 2; rho^2), the disk integral of y^-2k.
double power_law_series(double k, double r, double h) {
    double rho2 = (r / h) * (r / h);
    double term = 1.0, sum = 1.0;
    for (int j = 0; j < 100000; ++j) {
        term *= (k + j) * (k + 0.5 + j) / ((j + 1.0) * (j + 2.0)) * rho2;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return kPi * r * r * std::pow(h, -2.0 * k) * sum;
}

// Integral of y^-2k over the disk as a one-dimensional chord integral.
VolResult power_law_chords(double k, double r, double h) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    auto g = [&](double u, double uc) {
        // uc is the signed distance from u to the nearer endpoint of [-1, 1].
        double d = std::abs(uc);
        double w = std::sqrt(d * (2.0 - d));
        double y = u < 0.0 ? (h - r) + r * d : h + r * u;
        if (y <= 0.0) return 0.0;
        return 2.0 * r * r * w * std::pow(y, -2.0 * k);
    };
    double v = ts.integrate(g, -1.0, 1.0, kTol.quadrature, &err, &l1);
    if (!std::isfinite(v)) return VolResult::inf();
    return {v, VolResult::Method::quadrature, err};
}

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double integrate(F&& f, double a, double b, double tol, double& err_out) {
    double err = 0.0;
    double v = GK::integrate(f, a, b, 20, tol, &err);
    err_out += err;
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string ConformalMetric::name() const {
    switch (kind) {
        case Kind::euclidean: return "euclidean";
        case Kind::spherical: return "spherical";
        case Kind::hyperbolic: return "hyperbolic";
        case Kind::power_law: return "power_law:" + fmt(k);
    }
    return "unknown";
}

ConformalMetric metric_from_string(const std::string& s, int dim) {
    if (s == "euclidean") return ConformalMetric::euclidean(dim);
    if (s == "spherical") return ConformalMetric::spherical(dim);
    if (s == "hyperbolic") return ConformalMetric::hyperbolic(dim);
    if (s.rfind("power_law:", 0) == 0) {
        auto v = parse_list(s.substr(10));
        if (v.size() != 1) throw ConfigError("power_law takes one exponent");
        if (dim != 2) throw ConfigError("power_law metrics are planar");
        return ConformalMetric::power_law(v[0]);
    }
    throw ConfigError("unknown metric '" + s + "'");
}

double unit_ball_volume(int n) { return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

double metric_density(const ConformalMetric& m, const Vec3& z) {
    switch (m.kind) {
        case ConformalMetric::Kind::euclidean: return 1.0;
        case ConformalMetric::Kind::spherical: return 2.0 / (1.0 + norm2(z));
        case ConformalMetric::Kind::hyperbolic:
        case ConformalMetric::Kind::power_law: {
            double y = height(m, z);
            if (!(y > 0.0)) throw DomainError("point lies outside the upper half-space");
            return std::pow(y, -m.k);
        }
    }
    return 0.0;
}

VolResult vol_f(const ConformalMetric& m, const OrientedSphere& s) {
    if (is_flat(s)) return VolResult::inf();
    const Vec3 p = center(s);
    const double r = radius(s);
    const int n = m.dim;
    switch (m.kind) {
        case ConformalMetric::Kind::euclidean:
            return {unit_ball_volume(n) * std::pow(r, n), VolResult::Method::closed_form, 0.0};
        case ConformalMetric::Kind::spherical: {
            double theta = std::atan2(2.0 * r, 1.0 + norm2(p) - r * r);
            if (n == 2) {
                double sh = std::sin(0.5 * theta);
                return {4.0 * kPi * sh * sh, VolResult::Method::closed_form, 0.0};
            }
            return {kPi * (2.0 * theta - std::sin(2.0 * theta)), VolResult::Method::closed_form, 0.0};
        }
        case ConformalMetric::Kind::hyperbolic:
        case ConformalMetric::Kind::power_law: {
            const double h = height(m, p);
            if (std::abs(r - h) <= 1e-12 * std::max(r, h)) {
                if (m.kind == ConformalMetric::Kind::power_law && m.k < 0.75) return power_law_chords(m.k, r, r);
                return VolResult::inf();
            }
            if (r > h) throw DomainError("ball is not contained in the upper half-space");
            const double rho = r / h;
            if (m.kind == ConformalMetric::Kind::power_law) {
                if (rho <= 0.9) return {power_law_series(m.k, r, h), VolResult::Method::closed_form, 0.0};
                return power_law_chords(m.k, r, h);
            }
            if (n == 2) {
                double q = std::sqrt((1.0 - rho) * (1.0 + rho));
                return {2.0 * kPi * rho * rho / (q * (1.0 + q)), VolResult::Method::closed_form, 0.0};
            }
            double big_r = std::atanh(rho);
            return {kPi * (sinh_minus_x(2.0 * big_r)), VolResult::Method::closed_form, 0.0};
        }
    }
    return {};
}

VolResult vol_quadrature(const ConformalMetric& m, const OrientedSphere& s, double rel_tol) {
    if (is_flat(s)) return VolResult::inf();
    const Vec3 p = center(s);
    const double r = radius(s);
    if (m.half_space() && !(r < height(m, p))) {
        if (std::abs(r - height(m, p)) <= 1e-12 * r) return vol_f(m, s);
        throw DomainError("ball is not contained in the upper half-space");
    }
    const int n = m.dim;
    auto fn = [&](const Vec3& z) { return std::pow(metric_density(m, z), n); };
    double err = 0.0;
    double value = 0.0;
    const double inner_tol = rel_tol * 0.1;
    if (n == 2) {
        auto ring = [&](double phi) {
            double c = std::cos(phi), sn = std::sin(phi);
            double e = 0.0;
            return integrate([&](double rr) { return rr * fn({p[0] + rr * c, p[1] + rr * sn, 0.0}); }, 0.0, r, inner_tol,
                             e);
        };
        value = integrate(ring, 0.0, 2.0 * kPi, rel_tol, err);
    } else {
        // Polar axis along z, which is the symmetry axis of the half-space metrics.
        auto shell = [&](double theta) {
            double st = std::sin(theta), ct = std::cos(theta);
            double e = 0.0;
            auto az = [&](double phi) {
                double cp = std::cos(phi), sp = std::sin(phi);
                double e2 = 0.0;
                return integrate(
                    [&](double rr) {
                        return rr * rr * fn({p[0] + rr * st * cp, p[1] + rr * st * sp, p[2] + rr * ct});
                    },
                    0.0, r, inner_tol, e2);
            };
            return st * integrate(az, 0.0, 2.0 * kPi, inner_tol, e);
        };
        value = integrate(shell, 0.0, kPi, rel_tol, err);
    }
    if (!(err <= 10.0 * rel_tol * std::abs(value))) {
        throw AccuracyError("quadrature did not reach the requested tolerance", err / std::abs(value));
    }
    return {value, VolResult::Method::quadrature, err};
}

// ---------------------------------------------------------------------------

Region Region::rectangle(double x0, double x1, double y0, double y1) {
    if (!(x0 <= x1 && y0 <= y1)) throw DomainError("empty rectangle");
    Region e;
    e.kind = Kind::rectangle;
    e.x0 = x0, e.x1 = x1, e.y0 = y0, e.y1 = y1;
    return e;
}

Region Region::disk(const Vec3& center, double r) {
    if (!(r >= 0.0)) throw DomainError("disk radius must be nonnegative");
    Region e;
    e.kind = Kind::disk;
    e.c = center;
    e.r = r;
    return e;
}

Region Region::band(int n) {
    Region e;
    e.kind = Kind::band;
    e.n = n;
    e.x0 = -1.0, e.x1 = 1.0, e.y0 = n, e.y1 = n + 1.0;
    return e;
}

Region Region::half_strip(double eta) {
    Region e;
    e.kind = Kind::half_strip;
    e.eta = eta;
    e.x0 = -1.0, e.x1 = 1.0, e.y0 = eta, e.y1 = kInf;
    return e;
}

Region Region::triangle(double cap) {
    if (!(cap >= 1.0)) throw DomainError("triangle cap must be at least 1");
    Region e;
    e.kind = Kind::triangle;
    e.cap = cap;
    e.x0 = -1.0, e.x1 = 1.0, e.y0 = 0.0, e.y1 = cap;
    return e;
}

bool Region::bounded() const { return kind == Kind::disk || std::isfinite(y1); }

bool Region::contains(const Vec3& z) const {
    switch (kind) {
        case Kind::disk: {
            Vec3 d{z[0] - c[0], z[1] - c[1], z[2] - c[2]};
            return norm2(d) <= r * r;
        }
        case Kind::triangle:
            if (z[0] * z[0] + z[1] * z[1] < 1.0) return false;
            [[fallthrough]];
        default:
            return z[2] == 0.0 && z[0] >= x0 && z[0] <= x1 && z[1] >= y0 && z[1] <= y1;
    }
}

Box2 Region::bounding_box() const {
    if (kind == Kind::disk) return {c[0] - r, c[0] + r, c[1] - r, c[1] + r};
    return {x0, x1, y0, y1};
}

std::string Region::name() const {
    switch (kind) {
        case Kind::rectangle: return "rectangle:" + fmt(x0) + "," + fmt(x1) + "," + fmt(y0) + "," + fmt(y1);
        case Kind::disk:
            return "disk:" + fmt(c[0]) + "," + fmt(c[1]) + (c[2] != 0.0 ? "," + fmt(c[2]) : "") + "," + fmt(r);
        case Kind::band: return "band:" + std::to_string(n);
        case Kind::half_strip: return "half_strip:" + fmt(eta);
        case Kind::triangle: return std::isfinite(cap) ? "triangle:" + fmt(cap) : "triangle";
    }
    return "unknown";
}

Region region_from_string(const std::string& s) {
    auto colon = s.find(':');
    std::string kind = s.substr(0, colon);
    std::vector<double> v = colon == std::string::npos ? std::vector<double>{} : parse_list(s.substr(colon + 1));
    try {
        if (kind == "rectangle" && v.size() == 4) return Region::rectangle(v[0], v[1], v[2], v[3]);
        if (kind == "disk" && v.size() == 3) return Region::disk({v[0], v[1], 0.0}, v[2]);
        if (kind == "disk" && v.size() == 4) return Region::disk({v[0], v[1], v[2]}, v[3]);
        if (kind == "band" && v.size() == 1 && v[0] == std::floor(v[0])) return Region::band(static_cast<int>(v[0]));
        if (kind == "half_strip" && v.size() == 1) return Region::half_strip(v[0]);
        if (kind == "triangle" && v.empty()) return Region::triangle();
        if (kind == "triangle" && v.size() == 1) return Region::triangle(v[0]);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid region: ") + e.what());
    }
    throw ConfigError("unknown or malformed region '" + s + "'");
}

namespace {

double seg_distance(double px, double py, double ax, double ay, double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double u = len2 > 0.0 ? std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0) : 0.0;
    return std::hypot(px - ax - u * dx, py - ay - u * dy);
}

std::pair<double, double> box_range(double x0, double x1, double y0, double y1, const Vec3& p) {
    double dx = std::max({x0 - p[0], 0.0, p[0] - x1});
    double dy = std::max({y0 - p[1], 0.0, p[1] - y1});
    double lo = std::sqrt(dx * dx + dy * dy + p[2] * p[2]);
    double fx = std::max(std::abs(p[0] - x0), std::abs(p[0] - x1));
    double fy = std::max(std::abs(p[1] - y0), std::abs(p[1] - y1));
    double hi = std::isfinite(fy) ? std::sqrt(fx * fx + fy * fy + p[2] * p[2]) : kInf;
    return {lo, hi};
}

}  // namespace

std::pair<double, double> distance_range(const Region& e, const Vec3& p) {
    switch (e.kind) {
        case Region::Kind::disk: {
            double d = std::sqrt(norm2({p[0] - e.c[0], p[1] - e.c[1], p[2] - e.c[2]}));
            return {std::max(0.0, d - e.r), d + e.r};
        }
        case Region::Kind::triangle: {
            const double px = p[0], py = p[1];
            const double pz2 = p[2] * p[2];
            const double cap = e.cap;
            double lo;
            if (e.contains({px, py, 0.0})) {
                lo = 0.0;
            } else {
                double top = std::isfinite(cap) ? cap : std::max(py, 0.0) + 1.0;
                lo = std::min(seg_distance(px, py, -1.0, 0.0, -1.0, top), seg_distance(px, py, 1.0, 0.0, 1.0, top));
                if (std::isfinite(cap)) lo = std::min(lo, seg_distance(px, py, -1.0, cap, 1.0, cap));
                double rho = std::hypot(px, py);
                double phi = std::atan2(py, px);
                double arc = rho > 0.0 && phi >= 0.0 ? std::abs(rho - 1.0)
                                                     : std::min(std::hypot(px - 1.0, py), std::hypot(px + 1.0, py));
                lo = std::min(lo, arc);
            }
            lo = std::sqrt(lo * lo + pz2);
            if (!std::isfinite(cap)) return {lo, kInf};
            double hi = 0.0;
            for (auto [qx, qy] : {std::pair{-1.0, 0.0}, {1.0, 0.0}, {-1.0, cap}, {1.0, cap}})
                hi = std::max(hi, std::hypot(px - qx, py - qy));
            double rho = std::hypot(px, py);
            if (rho > 0.0 && std::atan2(-py, -px) >= 0.0) hi = std::max(hi, rho + 1.0);
            if (rho == 0.0) hi = std::max(hi, 1.0);
            return {lo, std::sqrt(hi * hi + pz2)};
        }
        default: return box_range(e.x0, e.x1, e.y0, e.y1, p);
    }
}

bool intersects(const OrientedSphere& s, const Region& e) {
    if (is_flat(s)) {
        // Range of n.x over the region against the offset h.
        const double h = 0.5 * s.bhat;
        double lo = kInf, hi = -kInf;
        if (e.kind == Region::Kind::disk) {
            double nc = s.c[0] * e.c[0] + s.c[1] * e.c[1] + s.c[2] * e.c[2];
            lo = nc - e.r, hi = nc + e.r;
        } else {
            for (double x : {e.x0, e.x1}) {
                for (double y : {e.y0, e.y1}) {
                    double v = s.c[0] * x + (s.c[1] != 0.0 ? s.c[1] * y : 0.0);
                    lo = std::min(lo, v), hi = std::max(hi, v);
                }
            }
        }
        double slack = 1e-12 * std::max(1.0, std::abs(h));
        return lo <= h + slack && h <= hi + slack;
    }
    const double r = radius(s);
    auto [lo, hi] = distance_range(e, center(s));
    double slack = 1e-12 * std::max(1.0, r);
    return lo <= r + slack && r <= hi + slack;
}

double sup_density(const ConformalMetric& m, const Region& e, double margin) {
    Box2 b = e.bounding_box();
    b.x0 -= margin, b.x1 += margin, b.y0 -= margin, b.y1 += margin;
    switch (m.kind) {
        case ConformalMetric::Kind::euclidean: return 1.0;
        case ConformalMetric::Kind::spherical: {
            double dx = std::max({b.x0, 0.0, -b.x1});
            double dy = std::max({b.y0, 0.0, -b.y1});
            double dz = e.kind == Region::Kind::disk ? std::max(std::abs(e.c[2]) - e.r - margin, 0.0) : 0.0;
            return 2.0 / (1.0 + dx * dx + dy * dy + dz * dz);
        }
        case ConformalMetric::Kind::hyperbolic:
        case ConformalMetric::Kind::power_law: {
            double low = m.dim == 2 ? b.y0 : (e.kind == Region::Kind::disk ? e.c[2] - e.r - margin : 0.0);
            double high = m.dim == 2 ? b.y1 : (e.kind == Region::Kind::disk ? e.c[2] + e.r + margin : 0.0);
            if (m.k >= 0.0) return low > 0.0 ? std::pow(low, -m.k) : kInf;
            return std::isfinite(high) ? std::pow(high, -m.k) : kInf;
        }
    }
    return kInf;
}

}  // namespace apollo
