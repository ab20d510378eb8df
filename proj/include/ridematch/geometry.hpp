#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ridematch {

/// Axis-aligned box in N-dimensional feature space. Zero-width dimensions
/// are allowed; they make the volume zero, not an error.
struct HyperRect {
    std::vector<double> lo;
    std::vector<double> hi;

    HyperRect() = default;
    HyperRect(std::vector<double> lower, std::vector<double> upper);

    std::size_t dim() const { return lo.size(); }
    bool contains(std::span<const double> x) const;  // closed intervals
};

/// Set of same-dimension boxes whose interiors are pairwise disjoint.
/// Disjointness is guaranteed by the code that builds regions (cell
/// decomposition / grid merging), not re-verified here; volume of the
/// union against a zone is therefore a plain sum of per-box terms.
struct RegionUnion {
    std::vector<HyperRect> boxes;
    std::size_t dimension = 0;

    RegionUnion() = default;
    RegionUnion(std::vector<HyperRect> bs, std::size_t dim);

    bool empty() const { return boxes.empty(); }
    bool contains(std::span<const double> x) const;
    double total_volume() const;
};

/// Extent of the feature space under consideration. Strictly positive
/// width in every dimension.
struct BoundingDomain {
    HyperRect bounds;

    BoundingDomain() = default;
    explicit BoundingDomain(HyperRect b);

    std::size_t dim() const { return bounds.dim(); }
};

double volume(const HyperRect& r);

/// Closed-form intersection volume of two boxes of equal dimension:
/// prod_d max(0, min(a.hi, b.hi) - max(a.lo, b.lo)).
double intersect_volume(const HyperRect& a, const HyperRect& b);

/// Volume of (union of region boxes) ∩ zone. Exact because region boxes
/// are interior-disjoint.
double union_intersect_volume(const RegionUnion& region, const HyperRect& zone);

/// Intersection box of a and b, or nullopt when they do not overlap
/// (shared faces count as overlap with zero width).
std::optional<HyperRect> clip(const HyperRect& a, const HyperRect& b);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

using MembershipFn = std::function<bool(std::span<const double>)>;

/// Hit-or-miss Monte Carlo estimate of vol({x in zone : member(x)}).
/// Samples uniformly inside the zone (clipped to the domain), so the
/// estimator is vol(zone) * hits/samples with the usual binomial
/// standard error. Deterministic for a fixed seed.
McEstimate mc_region_intersect_volume(const MembershipFn& member,
                                      const HyperRect& zone,
                                      const BoundingDomain& domain,
                                      std::size_t samples,
                                      std::uint64_t seed);

}  // namespace ridematch
