#include "apollo/inversive.hpp"

#include <algorithm>
#include <string>

namespace apollo {

std::string to_string(Int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    std::string digits;
    while (v != 0) {
        int d = static_cast<int>(v % 10);
        digits.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
        v /= 10;
    }
    if (neg) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

double quadratic_form(const OrientedSphere& v) {
    return v.c[0] * v.c[0] + v.c[1] * v.c[1] + v.c[2] * v.c[2] - v.b * v.bhat;
}

double normalization_scale(const OrientedSphere& v) {
    double cc = v.c[0] * v.c[0] + v.c[1] * v.c[1] + v.c[2] * v.c[2];
    return std::max({1.0, cc, std::abs(v.b * v.bhat)});
}

bool is_normalized(const OrientedSphere& v, double tol) {
    return std::abs(quadratic_form(v) - 1.0) <= tol * normalization_scale(v);
}

double product_unchecked(const OrientedSphere& u, const OrientedSphere& v) {
    return u.c[0] * v.c[0] + u.c[1] * v.c[1] + u.c[2] * v.c[2] - 0.5 * (u.b * v.bhat + u.bhat * v.b);
}

double inversive_product(const OrientedSphere& u, const OrientedSphere& v) {
    if (!is_normalized(u) || !is_normalized(v)) {
        throw NormalizationError("inversive_product: operand is not on the Q = 1 quadric");
    }
    return product_unchecked(u, v);
}

OrientedCircle circle_from_center_radius(double cx, double cy, double r, int orientation) {
    return sphere_from_center_radius({cx, cy, 0.0}, r, orientation);
}

OrientedSphere sphere_from_center_radius(const Vec3& p, double r, int orientation) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    if (orientation != 1 && orientation != -1) throw DomainError("orientation must be +1 or -1");
    double b = orientation / r;
    double pp = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    return {b, b * pp - orientation * r, {b * p[0], b * p[1], b * p[2]}};
}

OrientedSphere line_from_normal_offset(const Vec3& n, double h) {
    double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (!(len > 0.0)) throw DomainError("line normal must be nonzero");
    return {0.0, 2.0 * h, {n[0] / len, n[1] / len, n[2] / len}};
}

Vec3 center(const OrientedSphere& v) {
    if (is_flat(v)) throw DomainError("a line has no center");
    return {v.c[0] / v.b, v.c[1] / v.b, v.c[2] / v.b};
}

double radius(const OrientedSphere& v) {
    if (is_flat(v)) throw DomainError("a line has no finite radius");
    return 1.0 / std::abs(v.b);
}

double power(const OrientedSphere& v, const Vec3& z) {
    double zz = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    return v.b * zz - 2.0 * (v.c[0] * z[0] + v.c[1] * z[1] + v.c[2] * z[2]) + v.bhat;
}

Vec3 tangency_point(const OrientedSphere& u, const OrientedSphere& v) {
    double s = u.b + v.b;
    if (s == 0.0) throw DegeneracyError("tangency point at infinity");
    return {(u.c[0] + v.c[0]) / s, (u.c[1] + v.c[1]) / s, (u.c[2] + v.c[2]) / s};
}

OrientedSphere to_float(const ExactSphere& v) {
    return {static_cast<double>(v.b),
            static_cast<double>(v.bhat),
            {static_cast<double>(v.c[0]), static_cast<double>(v.c[1]), static_cast<double>(v.c[2])}};
}

Int128 twice_product(const ExactSphere& u, const ExactSphere& v) {
    using namespace checked;
    Int128 cc = add(add(mul(u.c[0], v.c[0]), mul(u.c[1], v.c[1])), mul(u.c[2], v.c[2]));
    return sub(mul(2, cc), add(mul(u.b, v.bhat), mul(u.bhat, v.b)));
}

Int128 quadratic_form(const ExactSphere& v) {
    using namespace checked;
    Int128 cc = add(add(mul(v.c[0], v.c[0]), mul(v.c[1], v.c[1])), mul(v.c[2], v.c[2]));
    return sub(cc, mul(v.b, v.bhat));
}

namespace {

template <class T>
DescartesQuadruple<T> build(const std::vector<Inversive<T>>& spheres, int dim) {
    if (dim != 2 && dim != 3) throw DomainError("dimension must be 2 or 3");
    if (static_cast<int>(spheres.size()) != dim + 2) {
        throw InvariantError("a Descartes configuration in dimension " + std::to_string(dim) + " has " +
                             std::to_string(dim + 2) + " members");
    }
    DescartesQuadruple<T> q;
    q.dim = dim;
    for (int i = 0; i < dim + 2; ++i) q[i] = spheres[static_cast<std::size_t>(i)];
    return q;
}

}  // namespace

FloatQuadruple make_quadruple(const std::vector<OrientedSphere>& spheres, int dim) {
    return build(spheres, dim);
}

ExactQuadruple make_quadruple(const std::vector<ExactSphere>& spheres, int dim) {
    return build(spheres, dim);
}

OrientedSphere reflected_slot(const FloatQuadruple& q, int i) {
    OrientedSphere s{};
    for (int j = 0; j < q.size(); ++j) {
        if (j != i) s = s + q[j];
    }
    double k = q.dim == 2 ? 2.0 : 1.0;
    return k * s + (-1.0) * q[i];
}

ExactSphere reflected_slot(const ExactQuadruple& q, int i) {
    using namespace checked;
    const Int128 k = q.dim == 2 ? 2 : 1;
    ExactSphere s{};
    for (int j = 0; j < q.size(); ++j) {
        if (j == i) continue;
        s.b = add(s.b, q[j].b);
        s.bhat = add(s.bhat, q[j].bhat);
        for (int a = 0; a < 3; ++a) s.c[a] = add(s.c[a], q[j].c[a]);
    }
    ExactSphere r;
    r.b = sub(mul(k, s.b), q[i].b);
    r.bhat = sub(mul(k, s.bhat), q[i].bhat);
    for (int a = 0; a < 3; ++a) r.c[a] = sub(mul(k, s.c[a]), q[i].c[a]);
    return r;
}

FloatQuadruple descartes_reflect(const FloatQuadruple& q, int i) {
    if (i < 0 || i >= q.size()) throw DomainError("slot index out of range");
    FloatQuadruple r = q;
    r[i] = reflected_slot(q, i);
    r.incoming = i;
    return r;
}

ExactQuadruple descartes_reflect(const ExactQuadruple& q, int i) {
    if (i < 0 || i >= q.size()) throw DomainError("slot index out of range");
    ExactQuadruple r = q;
    r[i] = reflected_slot(q, i);
    r.incoming = i;
    return r;
}

void validate_quadruple(const FloatQuadruple& q, double tol) {
    for (int i = 0; i < q.size(); ++i) {
        if (!is_normalized(q[i], tol)) throw InvariantError("member " + std::to_string(i) + " is not normalized");
        for (int j = i + 1; j < q.size(); ++j) {
            double p = product_unchecked(q[i], q[j]);
            double scale = std::sqrt(normalization_scale(q[i]) * normalization_scale(q[j]));
            if (std::abs(p + 1.0) > tol * scale) {
                throw InvariantError("members " + std::to_string(i) + " and " + std::to_string(j) +
                                     " are not externally tangent");
            }
        }
    }
}

void validate_quadruple(const ExactQuadruple& q) {
    for (int i = 0; i < q.size(); ++i) {
        if (quadratic_form(q[i]) != 1) throw InvariantError("member " + std::to_string(i) + " is not normalized");
        for (int j = i + 1; j < q.size(); ++j) {
            if (twice_product(q[i], q[j]) != -2) {
                throw InvariantError("members " + std::to_string(i) + " and " + std::to_string(j) +
                                     " are not externally tangent");
            }
        }
    }
}

bool descartes_identity_holds(const ExactQuadruple& q) {
    using namespace checked;
    Int128 sum = 0, sq = 0;
    for (int i = 0; i < q.size(); ++i) {
        sum = add(sum, q[i].b);
        sq = add(sq, mul(q[i].b, q[i].b));
    }
    return mul(sum, sum) == mul(q.dim, sq);
}

ExactSphere dual_direction(const ExactQuadruple& q, int i) {
    using namespace checked;
    const Int128 k = q.dim - 1;
    ExactSphere w;
    w.b = mul(k, q[i].b);
    w.bhat = mul(k, q[i].bhat);
    for (int a = 0; a < 3; ++a) w.c[a] = mul(k, q[i].c[a]);
    for (int j = 0; j < q.size(); ++j) {
        if (j == i) continue;
        w.b = sub(w.b, q[j].b);
        w.bhat = sub(w.bhat, q[j].bhat);
        for (int a = 0; a < 3; ++a) w.c[a] = sub(w.c[a], q[j].c[a]);
    }
    return w;
}

OrientedSphere dual_direction(const FloatQuadruple& q, int i) {
    OrientedSphere w = static_cast<double>(q.dim - 1) * q[i];
    for (int j = 0; j < q.size(); ++j) {
        if (j != i) w = w + (-1.0) * q[j];
    }
    return w;
}

OrientedSphere dual_sphere(const FloatQuadruple& q, int i) {
    OrientedSphere w = dual_direction(q, i);
    double ww = quadratic_form(w);
    if (!(ww > 1e-12 * normalization_scale(w))) throw DegeneracyError("dual sphere is degenerate");
    return (1.0 / std::sqrt(ww)) * w;
}

std::vector<OrientedSphere> dual_circles(const FloatQuadruple& q) {
    std::vector<OrientedSphere> out;
    out.reserve(static_cast<std::size_t>(q.size()));
    for (int i = 0; i < q.size(); ++i) out.push_back(dual_sphere(q, i));
    return out;
}

FloatQuadruple to_float(const ExactQuadruple& q) {
    FloatQuadruple r;
    r.dim = q.dim;
    r.incoming = q.incoming;
    for (int i = 0; i < q.size(); ++i) r[i] = to_float(q[i]);
    return r;
}

}  // namespace apollo
