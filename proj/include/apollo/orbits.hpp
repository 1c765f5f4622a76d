#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "apollo/counting.hpp"
#include "apollo/mobius.hpp"
#include "apollo/packing.hpp"

namespace apollo {

using Complex = std::complex<double>;
using Mat2 = std::array<Complex, 4>;  // row major a, b, c, d

/// z -> (a w + b) / (c w + d) with w = conj(z) when `anti`, else w = z.
struct Mobius2 {
    Mat2 m{Complex(1), Complex(0), Complex(0), Complex(1)};
    bool anti = false;

    double frobenius2() const;
};

/// Anti-Moebius inversion in a circle or reflection in a line, as a 2x2 matrix of unit determinant modulus.
Mobius2 planar_inversion(const OrientedCircle& s);

/// A point of H^3 as a unit timelike vector (b, bhat, c0, c1, 0): height 1/b, boundary projection c/b.
struct HPoint {
    double b = 1.0, bhat = 1.0;
    double c0 = 0.0, c1 = 0.0;

    static HPoint from_coords(double x, double y, double h);
    double x() const { return c0 / b; }
    double y() const { return c1 / b; }
    double height() const { return 1.0 / b; }
};

/// Base point j = (0, 0, 1).
inline HPoint origin() { return {}; }

double distance(const HPoint& p, const HPoint& q);
HPoint act(const MobiusMap& g, const HPoint& p);

/// Generators are inversions in the dual circles of the root (Apollonian) or in the root circles (dual clusters).
struct GroupPresentation {
    std::vector<OrientedCircle> circles;
    std::vector<MobiusMap> generators;
    std::vector<Mobius2> planar;

    static GroupPresentation from_spec(const PackingSpec& spec);
    int size() const { return static_cast<int>(generators.size()); }
};

struct ReducedWord {
    std::vector<std::uint8_t> letters;  // applied right to left: word = letters[0] letters[1] ...
    MobiusMap element;
};

/// All reduced words of length <= L with composed maps (intended for small L).
std::vector<ReducedWord> enumerate_words(const GroupPresentation& pres, int L);

/// Number of distinct group elements among the words of length <= L, by rounded-matrix hashing.
std::size_t distinct_elements(const std::vector<ReducedWord>& words);

/// Visited for every reduced word by depth-first prepending of generators.
struct WordVisit {
    int length = 0;
    int first = -1;      // leftmost letter, -1 for the identity
    HPoint point;        // gamma(o)
    Mobius2 planar;      // 2x2 realization of gamma
};

/// Number of independent subtrees for_each_word splits the words of length <= L into.
std::size_t word_task_count(const GroupPresentation& pres, int L);

/// Visits all words of length <= L, in a fixed order within each task. `visit(task, w)` receives the
/// subtree index so callers can reduce per task and combine in task order. Returns the word count.
std::size_t for_each_word(const GroupPresentation& pres, int L, int workers,
                          const std::function<void(std::size_t task, const WordVisit&)>& visit);

/// d(j, g j).
double displacement(const MobiusMap& g);

struct PoincareSeries {
    double s = 0.0;
    std::vector<double> log_level;    // log sum over words of length exactly l
    std::vector<double> log_partial;  // log sum over words of length <= l

    double partial(int L) const;
    double increment_ratio(int l) const;  // level l+1 over level l
};

PoincareSeries poincare_partial(const GroupPresentation& pres, double s, int L, int workers = 1);

struct PattersonAtom {
    double x = 0.0, y = 0.0, height = 0.0;
    double weight = 0.0;
};

struct TruncatedPattersonMeasure {
    double s = 0.0;
    int L = 0;
    HPoint base;
    std::vector<PattersonAtom> atoms;
    double log_normalizer = 0.0;  // log sum_gamma e^{-s d(o, gamma o)}
    bool below_critical = false;  // s at or below the supplied delta estimate

    double total_mass() const;
    /// Mass of atoms whose boundary projection lies in the closed Euclidean disk.
    double ball_mass(double cx, double cy, double r) const;
};

TruncatedPattersonMeasure patterson_truncated(const GroupPresentation& pres, const HPoint& x, double s, int L,
                                              double delta_estimate = 1.30568, int workers = 1);

/// Euclidean distance from a boundary point to Res(P), using the members of a planar store.
/// Exact when the point lies inside a stored member's disk; otherwise an upper bound.
class ResidualLocator {
public:
    explicit ResidualLocator(const PackingStore& store, double cell = 1.0 / 16.0);
    double distance(double x, double y) const;

private:
    struct Disk {
        double cx, cy, r;
        int orientation;  // +1 disk interior, -1 exterior of an enclosing circle
    };
    std::vector<Disk> disks_;
    std::vector<OrientedSphere> lines_;
    std::vector<std::size_t> wide_;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> grid_;
    double cell_;
    double period_ = 0.0, y0_ = 0.0;
};

struct NormCount {
    std::vector<double> T;
    std::vector<std::uint64_t> count;
    double t_saturation = 0.0;     // smallest norm among words of the maximal even length
    double max_bridge_defect = 0.0;  // max relative |‖A‖_F^2 - 2 cosh d(j, A j)|
    FitResult fit;
};

/// #{gamma even, |gamma| <= L : ‖gamma‖_F <= T} on a geometric T grid, trimmed at saturation.
NormCount norm_ball_count(const GroupPresentation& pres, int L, int per_decade = 16, int workers = 1);

}  // namespace apollo
