#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "kbound/vec2.hpp"

namespace kbound {

struct Circle {
    Vec2 center;
    double radius = 1.0;
};

/// Bounded planar circle domain: the open outer disk minus finitely many
/// closed inner disks. Invariants are checked on construction.
class CircleDomain {
public:
    explicit CircleDomain(Circle outer, std::vector<Circle> inner = {});

    const Circle& outer() const { return outer_; }
    const std::vector<Circle>& inner() const { return inner_; }
    std::size_t hole_count() const { return inner_.size(); }

    /// min over the outer gap and every inner gap; clamped to 0 outside.
    double dist_to_boundary(Vec2 z) const;
    bool contains(Vec2 z) const { return dist_to_boundary(z) > 0.0; }

private:
    Circle outer_;
    std::vector<Circle> inner_;
};

/// Finite set of punctures inside a domain. Points keep their insertion order;
/// Voronoi tie-breaks use that order.
class PunctureSet {
public:
    PunctureSet() = default;
    explicit PunctureSet(std::vector<Vec2> points);

    /// Throws unless every point lies in the open domain.
    void validate(const CircleDomain& domain) const;

    const std::vector<Vec2>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Vec2& operator[](std::size_t i) const { return points_[i]; }

    /// Set with one extra point appended.
    PunctureSet with(Vec2 p) const;

private:
    std::vector<Vec2> points_;
};

/// Euclidean distance from z to the nearest puncture; +inf for the empty set.
/// Throws when z coincides with a puncture.
double dist_to_punctures(const PunctureSet& S, Vec2 z);

struct NearestPuncture {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();
};

/// Spatial index over a puncture set (R-tree). Nearest queries break exact ties
/// by the lowest index.
class PunctureIndex {
public:
    explicit PunctureIndex(const PunctureSet& S);
    ~PunctureIndex();
    PunctureIndex(PunctureIndex&&) noexcept;
    PunctureIndex& operator=(PunctureIndex&&) noexcept;

    const PunctureSet& set() const { return set_; }
    bool empty() const { return set_.empty(); }

    NearestPuncture nearest(Vec2 z) const;

    /// Indices of every puncture within `radius` of z, sorted ascending.
    std::vector<std::size_t> within(Vec2 z, double radius) const;

    /// Indices that can be the nearest puncture for some point of the disk
    /// (center, radius): everything within d_nearest(center) + 2 * radius.
    std::vector<std::size_t> candidates(Vec2 center, double radius) const;

private:
    struct Tree;
    PunctureSet set_;
    std::unique_ptr<Tree> tree_;
};

/// Nearest puncture among a candidate list, lowest index on ties.
NearestPuncture nearest_among(const PunctureSet& S, std::span<const std::size_t> candidates, Vec2 z);

/// Candidates of the parent region that can still be nearest within the
/// smaller disk (center, radius).
std::vector<std::size_t> prune_candidates(const PunctureSet& S, std::span<const std::size_t> parent,
                                          Vec2 center, double radius);

}  // namespace kbound
