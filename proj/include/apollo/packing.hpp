#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apollo/hash.hpp"
#include "apollo/inversive.hpp"
#include "apollo/mobius.hpp"

namespace apollo {

enum class PackingKind { bounded_integral, strip_p0, custom_float, sphere3d, dual_cluster };

std::string to_string(PackingKind kind);
PackingKind packing_kind_from_string(const std::string& s);

/// Axis-aligned box in the plane.
struct Box2 {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    friend bool operator==(const Box2&, const Box2&) = default;
};

/// What to generate: a root configuration, the group acting on it and an
/// optional planar window outside of which gaps are not explored.
struct PackingSpec {
    PackingKind kind = PackingKind::bounded_integral;
    int dim = 2;
    std::vector<ExactSphere> exact_root;     // set in exact mode
    std::vector<OrientedSphere> float_root;  // set in float mode
    std::optional<Box2> window;

    bool exact() const { return !exact_root.empty(); }
    std::size_t root_size() const { return exact() ? exact_root.size() : float_root.size(); }
    std::vector<OrientedSphere> root_float() const;

    /// Inversions in the spheres themselves instead of the dual spheres.
    bool dual_group() const { return kind == PackingKind::dual_cluster; }

    /// Translation period along the y axis for the strip packing, 0 otherwise.
    double period() const { return kind == PackingKind::strip_p0 ? 2.0 : 0.0; }

    std::string canonical_text() const;
    Fingerprint fingerprint() const { return sha256(canonical_text()); }
    static PackingSpec from_text(const std::string& text);

    /// Root (-1, 2, 2, 3): unit circle enclosing two circles of radius 1/2 and one of radius 1/3.
    static PackingSpec bounded();
    static PackingSpec bounded(std::vector<ExactSphere> root);
    /// Lines x = +-1, the unit circle and the unit circle centered at -2i; window |x| <= 1, y in [y_lo, y_hi].
    static PackingSpec strip(double y_lo = -3.0, double y_hi = 3.0);
    static PackingSpec custom(std::vector<OrientedSphere> root, int dim = 2);
    /// Soddy root (-1, 2, 2, 3, 3) in three dimensions.
    static PackingSpec sphere3d();
    /// Four mutually tangent circles (2, 2, 3, 15) reflected in themselves.
    static PackingSpec dual_cluster();
    static PackingSpec dual_cluster(std::vector<OrientedSphere> root, int dim);
};

struct GenerationCutoff {
    enum class Kind : std::uint8_t { max_abs_curvature = 0, max_word_length = 1, max_circles = 2 };
    Kind kind = Kind::max_abs_curvature;
    double value = 0.0;

    static GenerationCutoff curvature(double t) { return {Kind::max_abs_curvature, t}; }
    static GenerationCutoff word_length(int l) { return {Kind::max_word_length, static_cast<double>(l)}; }
    static GenerationCutoff circles(std::size_t n) { return {Kind::max_circles, static_cast<double>(n)}; }

    friend bool operator==(const GenerationCutoff&, const GenerationCutoff&) = default;
};

std::string to_string(const GenerationCutoff& c);

struct GenerationStats {
    std::uint64_t nodes_expanded = 0;
    std::uint64_t dedup_hits = 0;
    std::uint64_t peak_frontier = 0;
    std::uint64_t pruned = 0;

    friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

/// Canonically ordered, deduplicated finite truncation of a packing.
struct PackingStore {
    PackingSpec spec;
    GenerationCutoff cutoff;
    std::vector<ExactSphere> exact_records;  // exact mode only, same order as `records`
    std::vector<OrientedSphere> records;
    GenerationStats stats;

    bool exact() const { return spec.exact(); }
    int dim() const { return spec.dim; }
    std::size_t size() const { return records.size(); }
    Fingerprint fingerprint() const { return spec.fingerprint(); }

    /// Curvature bound under which the store is complete (infinity when the cutoff is not a curvature).
    double curvature_bound() const;

    friend bool operator==(const PackingStore& a, const PackingStore& b);
};

/// Breadth-first seeded, depth-first completed enumeration of the packing.
/// Output is identical for every worker count.
PackingStore generate(const PackingSpec& spec, const GenerationCutoff& cutoff, int workers = 1);

/// #{S in store : 0 < b(S) <= x}.
std::size_t circle_count_by_curvature(const PackingStore& store, double x);

struct InvarianceReport {
    std::size_t checked = 0;
    std::vector<std::size_t> violations;  // indices of store records whose image is missing
    bool ok() const { return violations.empty(); }
};

/// Every image of a stored circle that falls inside the store's coverage must be stored.
InvarianceReport verify_gamma_invariance(const PackingStore& store, const MobiusMap& m);

/// Generators of the packing's group: dual-sphere inversions of the root, or the
/// root spheres themselves for dual clusters. Carry exact forms in exact mode.
std::vector<MobiusMap> packing_generators(const PackingSpec& spec);

/// True when the closed oriented interior of `g` meets the box (small slack allowed).
bool interior_meets_box(const OrientedSphere& g, const Box2& box);

void save(const PackingStore& store, const std::string& path);

enum class ExpectedMode { any, exact, floating };

/// Reads a cache written by `save`. When `expected` is given the spec fingerprint must match.
PackingStore load(const std::string& path, ExpectedMode mode = ExpectedMode::any,
                  const std::optional<Fingerprint>& expected = std::nullopt);

}  // namespace apollo
