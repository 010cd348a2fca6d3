#include "kbound/domain.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <algorithm>
#include <sstream>

#include "kbound/error.hpp"

namespace kbound {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

CircleDomain::CircleDomain(Circle outer, std::vector<Circle> inner)
    : outer_(outer), inner_(std::move(inner)) {
    if (!(outer_.radius > 0.0) || !std::isfinite(outer_.radius)) {
        fail(ErrorKind::invalid_argument, "outer radius must be positive");
    }
    for (std::size_t i = 0; i < inner_.size(); ++i) {
        const auto& c = inner_[i];
        if (!(c.radius > 0.0)) fail(ErrorKind::invalid_argument, "inner radius must be positive");
        if (distance(c.center, outer_.center) + c.radius >= outer_.radius) {
            std::ostringstream os;
            os << "inner disk " << i << " is not strictly inside the outer disk";
            fail(ErrorKind::invalid_argument, os.str());
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (distance(c.center, inner_[j].center) <= c.radius + inner_[j].radius) {
                std::ostringstream os;
                os << "inner disks " << j << " and " << i << " intersect";
                fail(ErrorKind::invalid_argument, os.str());
            }
        }
    }
}

double CircleDomain::dist_to_boundary(Vec2 z) const {
    double d = outer_.radius - distance(z, outer_.center);
    for (const auto& c : inner_) d = std::min(d, distance(z, c.center) - c.radius);
    return std::max(d, 0.0);
}

PunctureSet::PunctureSet(std::vector<Vec2> points) : points_(std::move(points)) {
    std::vector<Vec2> sorted = points_;
    std::sort(sorted.begin(), sorted.end(),
              [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) fail(ErrorKind::invalid_argument, "punctures must be pairwise distinct");
    }
}

void PunctureSet::validate(const CircleDomain& domain) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!domain.contains(points_[i])) {
            std::ostringstream os;
            os << "puncture " << i << " at " << points_[i] << " is outside the open domain";
            fail(ErrorKind::invalid_argument, os.str());
        }
    }
}

PunctureSet PunctureSet::with(Vec2 p) const {
    auto pts = points_;
    pts.push_back(p);
    return PunctureSet(std::move(pts));
}

double dist_to_punctures(const PunctureSet& S, Vec2 z) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : S.points()) d = std::min(d, distance(z, p));
    if (d == 0.0) fail(ErrorKind::invalid_argument, "point is a puncture");
    return d;
}

// ---------------------------------------------------------------------------

using BPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using BBox = bg::model::box<BPoint>;
using Entry = std::pair<BPoint, std::size_t>;

struct PunctureIndex::Tree {
    bgi::rtree<Entry, bgi::rstar<16>> rtree;
};

PunctureIndex::PunctureIndex(const PunctureSet& S) : set_(S), tree_(std::make_unique<Tree>()) {
    std::vector<Entry> entries;
    entries.reserve(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) entries.emplace_back(BPoint(S[i].x, S[i].y), i);
    tree_->rtree = bgi::rtree<Entry, bgi::rstar<16>>(entries);
}

PunctureIndex::~PunctureIndex() = default;
PunctureIndex::PunctureIndex(PunctureIndex&&) noexcept = default;
PunctureIndex& PunctureIndex::operator=(PunctureIndex&&) noexcept = default;

NearestPuncture PunctureIndex::nearest(Vec2 z) const {
    if (set_.empty()) return {};
    std::vector<Entry> hit;
    tree_->rtree.query(bgi::nearest(BPoint(z.x, z.y), 1), std::back_inserter(hit));
    const double d = distance(z, set_[hit.front().second]);
    // resolve exact ties deterministically
    NearestPuncture best{hit.front().second, d};
    for (auto i : within(z, d)) {
        const double di = distance(z, set_[i]);
        if (di < best.distance || (di == best.distance && i < best.index)) best = {i, di};
    }
    return best;
}

std::vector<std::size_t> PunctureIndex::within(Vec2 z, double radius) const {
    std::vector<std::size_t> out;
    if (set_.empty()) return out;
    const BBox box(BPoint(z.x - radius, z.y - radius), BPoint(z.x + radius, z.y + radius));
    std::vector<Entry> hits;
    tree_->rtree.query(bgi::intersects(box), std::back_inserter(hits));
    for (const auto& [pt, i] : hits) {
        if (distance(z, set_[i]) <= radius) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> PunctureIndex::candidates(Vec2 center, double radius) const {
    if (set_.empty()) return {};
    const auto n = nearest(center);
    return within(center, n.distance + 2.0 * radius);
}

NearestPuncture nearest_among(const PunctureSet& S, std::span<const std::size_t> candidates, Vec2 z) {
    NearestPuncture best;
    for (auto i : candidates) {
        const double d = distance(z, S[i]);
        if (d < best.distance) best = {i, d};  // candidates ascend, so strict < keeps the lowest index
    }
    return best;
}

std::vector<std::size_t> prune_candidates(const PunctureSet& S, std::span<const std::size_t> parent,
                                          Vec2 center, double radius) {
    if (parent.empty()) return {};
    const auto n = nearest_among(S, parent, center);
    const double cutoff = n.distance + 2.0 * radius;
    std::vector<std::size_t> out;
    for (auto i : parent) {
        if (distance(center, S[i]) <= cutoff) out.push_back(i);
    }
    return out;
}

}  // namespace kbound
