#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "apollo/error.hpp"
#include "apollo/int128.hpp"
#include "apollo/tolerance.hpp"

namespace apollo {

using Vec3 = std::array<double, 3>;

/// Oriented circle (n=2) or sphere (n=3) in inversive coordinates.
///
/// `b` is the signed curvature, `bhat` the curvature of the image under
/// inversion in the unit sphere and `c` the curvature-center b * center.
/// Planes and lines have b == 0 and carry their unit normal in `c`; the
/// normal points into the oriented interior. Circles keep c[2] == 0.
/// Normalized vectors satisfy Q(v) = |c|^2 - b * bhat = 1.
template <class T>
struct Inversive {
    T b{};
    T bhat{};
    std::array<T, 3> c{};

    friend bool operator==(const Inversive&, const Inversive&) = default;
};

using OrientedSphere = Inversive<double>;
using OrientedCircle = OrientedSphere;
using ExactSphere = Inversive<Int128>;
using ExactCircle = ExactSphere;

template <class T>
Inversive<T> operator-(const Inversive<T>& v) {
    return {-v.b, -v.bhat, {-v.c[0], -v.c[1], -v.c[2]}};
}

inline OrientedSphere operator+(const OrientedSphere& u, const OrientedSphere& v) {
    return {u.b + v.b, u.bhat + v.bhat, {u.c[0] + v.c[0], u.c[1] + v.c[1], u.c[2] + v.c[2]}};
}

inline OrientedSphere operator*(double k, const OrientedSphere& v) {
    return {k * v.b, k * v.bhat, {k * v.c[0], k * v.c[1], k * v.c[2]}};
}

double quadratic_form(const OrientedSphere& v);

/// Magnitude of the terms entering Q(v); relative tolerances scale with it.
double normalization_scale(const OrientedSphere& v);

bool is_normalized(const OrientedSphere& v, double tol = kTol.chain);

/// Bilinear form <u,v> = c_u . c_v - (b_u bhat_v + bhat_u b_v) / 2.
/// Throws NormalizationError when either operand is off the Q = 1 quadric.
double inversive_product(const OrientedSphere& u, const OrientedSphere& v);

double product_unchecked(const OrientedSphere& u, const OrientedSphere& v);

OrientedCircle circle_from_center_radius(double cx, double cy, double r, int orientation = +1);
OrientedSphere sphere_from_center_radius(const Vec3& center, double r, int orientation = +1);

/// Line (or plane) {x : n . x = h}; the interior is n . x > h. `n` is normalized here.
OrientedSphere line_from_normal_offset(const Vec3& n, double h);

inline bool is_flat(const OrientedSphere& v) { return v.b == 0.0; }

Vec3 center(const OrientedSphere& v);
double radius(const OrientedSphere& v);

/// b|z|^2 - 2 c.z + bhat; negative exactly on the oriented interior.
double power(const OrientedSphere& v, const Vec3& z);

/// Point of contact of two tangent spheres (<u,v> = -1); throws when it lies at infinity.
Vec3 tangency_point(const OrientedSphere& u, const OrientedSphere& v);

OrientedSphere to_float(const ExactSphere& v);

/// 2<u,v>, which is integral for integral vectors.
Int128 twice_product(const ExactSphere& u, const ExactSphere& v);
Int128 quadratic_form(const ExactSphere& v);

/// Ordered tuple of n+2 pairwise tangent oriented spheres (n = dim).
template <class T>
struct DescartesQuadruple {
    std::array<Inversive<T>, 5> slot{};
    int dim = 2;
    int incoming = -1;  // slot that was last reflected; -1 at the root

    int size() const { return dim + 2; }
    Inversive<T>& operator[](int i) { return slot[static_cast<std::size_t>(i)]; }
    const Inversive<T>& operator[](int i) const { return slot[static_cast<std::size_t>(i)]; }
};

using FloatQuadruple = DescartesQuadruple<double>;
using ExactQuadruple = DescartesQuadruple<Int128>;

FloatQuadruple make_quadruple(const std::vector<OrientedSphere>& spheres, int dim);
ExactQuadruple make_quadruple(const std::vector<ExactSphere>& spheres, int dim);

/// Replacement of slot i by the other sphere tangent to the remaining n+1:
/// v_i' = (2 / (n - 1)) * sum_{j != i} v_j - v_i, on every coordinate at once.
FloatQuadruple descartes_reflect(const FloatQuadruple& q, int i);
ExactQuadruple descartes_reflect(const ExactQuadruple& q, int i);

OrientedSphere reflected_slot(const FloatQuadruple& q, int i);
ExactSphere reflected_slot(const ExactQuadruple& q, int i);

/// Throws InvariantError unless every pair has product -1 and every member Q = 1.
void validate_quadruple(const FloatQuadruple& q, double tol = kTol.chain);
void validate_quadruple(const ExactQuadruple& q);

/// (sum b)^2 == n * sum b^2, evaluated exactly.
bool descartes_identity_holds(const ExactQuadruple& q);

/// Unnormalized integral vector along the dual sphere of the slots other than i:
/// (n - 1) v_i - sum_{j != i} v_j. Its oriented interior contains slot i.
ExactSphere dual_direction(const ExactQuadruple& q, int i);
OrientedSphere dual_direction(const FloatQuadruple& q, int i);

/// Normalized dual sphere of the slots other than i, oriented so slot i is inside.
OrientedSphere dual_sphere(const FloatQuadruple& q, int i);

/// All n+2 dual spheres, index i omitting slot i.
std::vector<OrientedSphere> dual_circles(const FloatQuadruple& q);

FloatQuadruple to_float(const ExactQuadruple& q);

}  // namespace apollo
