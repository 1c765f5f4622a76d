#include "apollo/mobius.hpp"

#include <numeric>

namespace apollo {

namespace {

// Gram matrix of the Lorentz form in (b, bhat, c0, c1, c2) order.
Mat5 gram() {
    Mat5 g{};
    g[0][1] = g[1][0] = -0.5;
    g[2][2] = g[3][3] = g[4][4] = 1.0;
    return g;
}

Mat5 gram_inverse() {
    Mat5 g{};
    g[0][1] = g[1][0] = -2.0;
    g[2][2] = g[3][3] = g[4][4] = 1.0;
    return g;
}

Mat5 multiply(const Mat5& a, const Mat5& b) {
    Mat5 r{};
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k) {
            double aik = a[i][k];
            if (aik == 0.0) continue;
            for (int j = 0; j < 5; ++j) r[i][j] += aik * b[k][j];
        }
    return r;
}

Mat5 transpose(const Mat5& a) {
    Mat5 r{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r[i][j] = a[j][i];
    return r;
}

Int128 gcd128(Int128 a, Int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        Int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

void reduce(ExactLorentz& e) {
    Int128 g = e.denominator;
    for (const auto& row : e.entries)
        for (Int128 x : row) g = gcd128(g, x);
    if (g > 1) {
        for (auto& row : e.entries)
            for (Int128& x : row) x /= g;
        e.denominator /= g;
    }
    if (e.denominator < 0) {
        for (auto& row : e.entries)
            for (Int128& x : row) x = -x;
        e.denominator = -e.denominator;
    }
}

ExactLorentz multiply(const ExactLorentz& a, const ExactLorentz& b) {
    using namespace checked;
    ExactLorentz r;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            Int128 acc = 0;
            for (int k = 0; k < 5; ++k) acc = add(acc, mul(a.entries[i][k], b.entries[k][j]));
            r.entries[i][j] = acc;
        }
    r.denominator = mul(a.denominator, b.denominator);
    reduce(r);
    return r;
}

ExactLorentz exact_identity() {
    ExactLorentz e;
    for (int i = 0; i < 5; ++i) e.entries[i][i] = 1;
    return e;
}

}  // namespace

std::array<double, 5> to_array(const OrientedSphere& v) { return {v.b, v.bhat, v.c[0], v.c[1], v.c[2]}; }

OrientedSphere from_array(const std::array<double, 5>& a) { return {a[0], a[1], {a[2], a[3], a[4]}}; }

MobiusMap::MobiusMap() : m_{}, exact_(exact_identity()) {
    for (int i = 0; i < 5; ++i) m_[i][i] = 1.0;
}

MobiusMap MobiusMap::inversion(const OrientedSphere& s) {
    double ss = quadratic_form(s);
    if (!(ss > 0.0)) throw DegeneracyError("inversion sphere must be spacelike");
    auto w = to_array(s);
    Mat5 g = gram();
    std::array<double, 5> gw{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) gw[i] += g[i][j] * w[j];
    MobiusMap r;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r.m_[i][j] -= 2.0 * w[i] * gw[j] / ss;
    r.exact_.reset();
    r.anti_ = true;
    return r;
}

MobiusMap MobiusMap::inversion(const ExactSphere& w) {
    using namespace checked;
    MobiusMap r = inversion(to_float(w));
    const std::array<Int128, 5> wv{w.b, w.bhat, w.c[0], w.c[1], w.c[2]};
    // 2G w with the integral Gram matrix 2G.
    const std::array<Int128, 5> g2w{sub(0, w.bhat), sub(0, w.b), mul(2, w.c[0]), mul(2, w.c[1]), mul(2, w.c[2])};
    Int128 w2 = twice_product(w, w);
    if (w2 <= 0) throw DegeneracyError("inversion sphere must be spacelike");
    ExactLorentz e;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) e.entries[i][j] = sub(i == j ? w2 : 0, mul(2, mul(wv[i], g2w[j])));
    e.denominator = w2;
    reduce(e);
    r.exact_ = e;
    return r;
}

MobiusMap MobiusMap::translation(const Vec3& a) {
    MobiusMap r;
    double aa = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    r.m_[1][0] = aa;
    for (int k = 0; k < 3; ++k) {
        r.m_[1][2 + k] = 2.0 * a[k];
        r.m_[2 + k][0] = a[k];
    }
    r.exact_.reset();
    return r;
}

MobiusMap MobiusMap::translation_exact(const std::array<Int128, 3>& a) {
    using namespace checked;
    MobiusMap r = translation({static_cast<double>(a[0]), static_cast<double>(a[1]), static_cast<double>(a[2])});
    ExactLorentz e = exact_identity();
    Int128 aa = add(add(mul(a[0], a[0]), mul(a[1], a[1])), mul(a[2], a[2]));
    e.entries[1][0] = aa;
    for (int k = 0; k < 3; ++k) {
        e.entries[1][2 + k] = mul(2, a[k]);
        e.entries[2 + k][0] = a[k];
    }
    r.exact_ = e;
    return r;
}

MobiusMap MobiusMap::scaling(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("scaling factor must be positive");
    MobiusMap r;
    r.m_[0][0] = 1.0 / lambda;
    r.m_[1][1] = lambda;
    r.exact_.reset();
    return r;
}

MobiusMap MobiusMap::rotation_xy(double theta) {
    MobiusMap r;
    double c = std::cos(theta), s = std::sin(theta);
    r.m_[2][2] = c;
    r.m_[2][3] = -s;
    r.m_[3][2] = s;
    r.m_[3][3] = c;
    r.exact_.reset();
    return r;
}

MobiusMap MobiusMap::inverse() const {
    MobiusMap r;
    r.m_ = multiply(multiply(gram_inverse(), transpose(m_)), gram());
    r.anti_ = anti_;
    r.exact_.reset();
    if (exact_) {
        using namespace checked;
        // G^-1 N^T (2G) / (2 den); both Gram factors are integral in this form.
        ExactMat5 gi{}, g2{};
        gi[0][1] = gi[1][0] = -2;
        g2[0][1] = g2[1][0] = -1;
        for (int k = 2; k < 5; ++k) {
            gi[k][k] = 1;
            g2[k][k] = 2;
        }
        ExactLorentz nt;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) nt.entries[i][j] = exact_->entries[j][i];
        ExactLorentz a{gi, 1}, b{g2, 1};
        ExactLorentz out = multiply(multiply(a, nt), b);
        out.denominator = mul(out.denominator, mul(2, exact_->denominator));
        reduce(out);
        r.exact_ = out;
    }
    return r;
}

MobiusMap MobiusMap::operator*(const MobiusMap& other) const {
    MobiusMap r;
    r.m_ = multiply(m_, other.m_);
    r.anti_ = anti_ != other.anti_;
    r.exact_.reset();
    if (exact_ && other.exact_) r.exact_ = multiply(*exact_, *other.exact_);
    return r;
}

std::array<double, 5> MobiusMap::apply_raw(const std::array<double, 5>& v) const {
    std::array<double, 5> r{};
    for (int i = 0; i < 5; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 5; ++j) acc += m_[i][j] * v[j];
        r[i] = acc;
    }
    return r;
}

double MobiusMap::orthogonality_defect() const {
    Mat5 d = multiply(multiply(transpose(m_), gram()), m_);
    Mat5 g = gram();
    double worst = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) worst = std::max(worst, std::abs(d[i][j] - g[i][j]));
    return worst;
}

OrientedSphere apply(const MobiusMap& m, const OrientedSphere& v) { return from_array(m.apply_raw(to_array(v))); }

std::optional<ExactSphere> apply_exact(const MobiusMap& m, const ExactSphere& v) {
    if (!m.exact()) return std::nullopt;
    using namespace checked;
    const auto& e = *m.exact();
    const std::array<Int128, 5> x{v.b, v.bhat, v.c[0], v.c[1], v.c[2]};
    std::array<Int128, 5> y{};
    for (int i = 0; i < 5; ++i) {
        Int128 acc = 0;
        for (int j = 0; j < 5; ++j) {
            if (e.entries[i][j] != 0 && x[j] != 0) acc = add(acc, mul(e.entries[i][j], x[j]));
        }
        if (acc % e.denominator != 0) return std::nullopt;
        y[i] = acc / e.denominator;
    }
    return ExactSphere{y[0], y[1], {y[2], y[3], y[4]}};
}

}  // namespace apollo
