#include "ridematch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ridematch {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
    if (a != b) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

}  // namespace

HyperRect::HyperRect(std::vector<double> lower, std::vector<double> upper)
    : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) {
        throw std::invalid_argument("HyperRect: lo and hi must have equal length");
    }
    if (lo.empty()) {
        throw std::invalid_argument("HyperRect: dimension must be >= 1");
    }
    for (std::size_t d = 0; d < lo.size(); ++d) {
        if (!(lo[d] <= hi[d])) {
            throw std::invalid_argument("HyperRect: lo[" + std::to_string(d) +
                                        "] > hi[" + std::to_string(d) + "]");
        }
    }
}

bool HyperRect::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t d = 0; d < dim(); ++d) {
        if (x[d] < lo[d] || x[d] > hi[d]) return false;
    }
    return true;
}

RegionUnion::RegionUnion(std::vector<HyperRect> bs, std::size_t dim)
    : boxes(std::move(bs)), dimension(dim) {
    for (const auto& b : boxes) {
        require_same_dim(b.dim(), dimension, "RegionUnion");
    }
}

bool RegionUnion::contains(std::span<const double> x) const {
    for (const auto& b : boxes) {
        if (b.contains(x)) return true;
    }
    return false;
}

double RegionUnion::total_volume() const {
    double sum = 0.0;
    for (const auto& b : boxes) sum += volume(b);
    return sum;
}

BoundingDomain::BoundingDomain(HyperRect b) : bounds(std::move(b)) {
    for (std::size_t d = 0; d < bounds.dim(); ++d) {
        if (!(bounds.hi[d] > bounds.lo[d])) {
            throw std::invalid_argument("BoundingDomain: width must be positive in every dimension");
        }
    }
}

double volume(const HyperRect& r) {
    double v = 1.0;
    for (std::size_t d = 0; d < r.dim(); ++d) v *= r.hi[d] - r.lo[d];
    return v;
}

double intersect_volume(const HyperRect& a, const HyperRect& b) {
    require_same_dim(a.dim(), b.dim(), "intersect_volume");
    double v = 1.0;
    for (std::size_t d = 0; d < a.dim(); ++d) {
        const double w = std::min(a.hi[d], b.hi[d]) - std::max(a.lo[d], b.lo[d]);
        if (w <= 0.0) return 0.0;
        v *= w;
    }
    return v;
}

double union_intersect_volume(const RegionUnion& region, const HyperRect& zone) {
    if (!region.empty()) {
        require_same_dim(region.dimension, zone.dim(), "union_intersect_volume");
    }
    double sum = 0.0;
    for (const auto& box : region.boxes) sum += intersect_volume(box, zone);
    return sum;
}

std::optional<HyperRect> clip(const HyperRect& a, const HyperRect& b) {
    require_same_dim(a.dim(), b.dim(), "clip");
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t d = 0; d < a.dim(); ++d) {
        lo[d] = std::max(a.lo[d], b.lo[d]);
        hi[d] = std::min(a.hi[d], b.hi[d]);
        if (lo[d] > hi[d]) return std::nullopt;
    }
    return HyperRect(std::move(lo), std::move(hi));
}

McEstimate mc_region_intersect_volume(const MembershipFn& member,
                                      const HyperRect& zone,
                                      const BoundingDomain& domain,
                                      std::size_t samples,
                                      std::uint64_t seed) {
    if (samples == 0) throw std::invalid_argument("mc_region_intersect_volume: samples must be >= 1");
    require_same_dim(zone.dim(), domain.dim(), "mc_region_intersect_volume");

    const auto clipped = clip(zone, domain.bounds);
    if (!clipped) return {0.0, 0.0};
    const double zone_vol = volume(*clipped);
    if (zone_vol <= 0.0) return {0.0, 0.0};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t n = clipped->dim();
    std::vector<double> x(n);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t d = 0; d < n; ++d) {
            x[d] = clipped->lo[d] + unit(rng) * (clipped->hi[d] - clipped->lo[d]);
        }
        if (member(x)) ++hits;
    }

    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(samples)));
    return {zone_vol * p, zone_vol * se};
}

}  // namespace ridematch
