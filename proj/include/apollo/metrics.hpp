#pragma once

#include <limits>
#include <string>

#include "apollo/inversive.hpp"
#include "apollo/packing.hpp"

namespace apollo {

/// Conformal metric f(x) dx on its domain U.
struct ConformalMetric {
    enum class Kind { euclidean, spherical, hyperbolic, power_law };
    Kind kind = Kind::euclidean;
    int dim = 2;
    double k = 1.0;  // exponent of the power law f = y^-k

    static ConformalMetric euclidean(int dim = 2) { return {Kind::euclidean, dim, 0.0}; }
    static ConformalMetric spherical(int dim = 2) { return {Kind::spherical, dim, 0.0}; }
    static ConformalMetric hyperbolic(int dim = 2) { return {Kind::hyperbolic, dim, 1.0}; }
    static ConformalMetric power_law(double k) { return {Kind::power_law, 2, k}; }

    /// Metrics defined on the upper half-space only.
    bool half_space() const { return kind == Kind::hyperbolic || kind == Kind::power_law; }
    std::string name() const;
};

ConformalMetric metric_from_string(const std::string& s, int dim = 2);

/// f(z); DomainError outside U.
double metric_density(const ConformalMetric& m, const Vec3& z);

struct VolResult {
    enum class Method { closed_form, quadrature, infinite };
    double value = 0.0;
    Method method = Method::closed_form;
    double error_bound = 0.0;

    bool infinite() const { return method == Method::infinite; }
    static VolResult inf() { return {std::numeric_limits<double>::infinity(), Method::infinite, 0.0}; }
};

/// Vol_f of the ball bounded by `s`. Lines, and balls of half-space metrics
/// touching the boundary hyperplane, have infinite volume.
VolResult vol_f(const ConformalMetric& m, const OrientedSphere& s);

/// Same quantity by adaptive quadrature in polar (spherical) coordinates about the center.
VolResult vol_quadrature(const ConformalMetric& m, const OrientedSphere& s, double rel_tol = kTol.quadrature);

/// Unit-ball volume v_n.
double unit_ball_volume(int n);

/// Compact (or explicitly unbounded) test set E.
struct Region {
    enum class Kind { rectangle, disk, band, half_strip, triangle };
    Kind kind = Kind::rectangle;
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;  // rectangle / band / strip extents
    Vec3 c{};                                        // disk (ball) center
    double r = 0.0;                                  // disk radius
    int n = 0;                                       // band index
    double eta = 0.0;                                // half-strip floor
    double cap = 0.0;                                // triangle height cap (infinite for the ideal triangle)

    static Region rectangle(double x0, double x1, double y0, double y1);
    static Region disk(const Vec3& center, double r);
    /// E_n = {|x| <= 1, n <= y <= n + 1} (closed).
    static Region band(int n);
    /// U_eta = {|x| <= 1, y >= eta}.
    static Region half_strip(double eta);
    /// {|x| <= 1, |z| >= 1, 0 <= y <= cap}; cap may be infinite.
    static Region triangle(double cap = std::numeric_limits<double>::infinity());

    bool bounded() const;
    bool contains(const Vec3& z) const;
    /// Bounding box in the plane (may have infinite upper y).
    Box2 bounding_box() const;
    std::string name() const;
};

Region region_from_string(const std::string& s);

/// Distance from p to the closed region and the largest distance to any of its points (infinite when unbounded).
std::pair<double, double> distance_range(const Region& e, const Vec3& p);

/// True iff the circle (sphere) itself, not its disk, meets the closed region.
bool intersects(const OrientedSphere& s, const Region& e);

/// Supremum of f over the region dilated by `margin`; infinite when unbounded.
double sup_density(const ConformalMetric& m, const Region& e, double margin);

}  // namespace apollo
