#pragma once

#include <array>
#include <optional>

#include "apollo/inversive.hpp"

namespace apollo {

using Mat5 = std::array<std::array<double, 5>, 5>;
using ExactMat5 = std::array<std::array<Int128, 5>, 5>;

/// Integral representation M = entries / denominator.
struct ExactLorentz {
    ExactMat5 entries{};
    Int128 denominator = 1;
};

/// Moebius (or anti-Moebius) map acting linearly on inversive coordinates
/// ordered (b, bhat, c0, c1, c2). The matrix preserves the Lorentz form.
class MobiusMap {
public:
    MobiusMap();

    static MobiusMap identity() { return MobiusMap(); }

    /// Inversion in the sphere `s` (any normalization; only the direction matters).
    static MobiusMap inversion(const OrientedSphere& s);

    /// Inversion in the sphere along the integral vector `w`; carries an exact form.
    static MobiusMap inversion(const ExactSphere& w);

    static MobiusMap translation(const Vec3& a);
    static MobiusMap translation_exact(const std::array<Int128, 3>& a);
    static MobiusMap scaling(double lambda);
    static MobiusMap rotation_xy(double theta);

    const Mat5& matrix() const { return m_; }
    const std::optional<ExactLorentz>& exact() const { return exact_; }

    /// True for orientation-reversing (anti-conformal) maps.
    bool anti_conformal() const { return anti_; }

    MobiusMap inverse() const;

    /// Composition: (this * other)(v) = this(other(v)).
    MobiusMap operator*(const MobiusMap& other) const;

    std::array<double, 5> apply_raw(const std::array<double, 5>& v) const;

    /// Largest entry of |M^T G M - G|.
    double orthogonality_defect() const;

private:
    Mat5 m_;
    std::optional<ExactLorentz> exact_;
    bool anti_ = false;
};

OrientedSphere apply(const MobiusMap& m, const OrientedSphere& v);

/// Exact image; empty when the map has no exact form or the image is not integral.
std::optional<ExactSphere> apply_exact(const MobiusMap& m, const ExactSphere& v);

std::array<double, 5> to_array(const OrientedSphere& v);
OrientedSphere from_array(const std::array<double, 5>& a);

}  // namespace apollo
