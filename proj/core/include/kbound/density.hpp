#pragma once

#include <span>

#include "kbound/domain.hpp"

namespace kbound {

/// Bounds on the Kobayashi-Royden density of domain \ S per unit Euclidean length.
struct DensityBracket {
    double lower = 0.0;
    double upper = 0.0;
};

/// 2 / min(dist_to_boundary, dist_to_punctures). Throws outside the domain or at a puncture.
double upper_density(const CircleDomain& domain, const PunctureSet& S, Vec2 z);
double upper_density(const CircleDomain& domain, const PunctureIndex& S, Vec2 z);

/// Max over containing-domain pullbacks: the outer disk, and the outer disk
/// punctured at each point of S and at each inner-disk center.
double lower_density(const CircleDomain& domain, const PunctureSet& S, Vec2 z);

DensityBracket density_bracket(const CircleDomain& domain, const PunctureSet& S, Vec2 z);

/// Unit-disk density of the unit disk punctured at a, evaluated at zeta.
double punctured_unit_disk_density(Vec2 a, Vec2 zeta);

struct ReferenceModel {
    enum class Kind { disk, punctured_disk, annulus };
    Kind kind = Kind::disk;
    double R = 1.0;  // outer radius (annulus: always 1)
    double r = 0.0;  // inner radius of the annulus

    static ReferenceModel disk(double R) { return {Kind::disk, R, 0.0}; }
    static ReferenceModel punctured_disk(double R) { return {Kind::punctured_disk, R, 0.0}; }
    static ReferenceModel annulus(double r) { return {Kind::annulus, 1.0, r}; }

    CircleDomain domain() const;
    PunctureSet punctures() const;
    bool contains(Vec2 z) const;
};

/// Closed-form density of a reference model (centered at the origin).
double reference_density(const ReferenceModel& model, Vec2 z);

/// Hot-path evaluation for integrators: the puncture search is restricted to a
/// candidate list (see PunctureIndex::candidates). No domain checks.
struct LocalDensity {
    double boundary_distance;
    double puncture_distance;
    std::size_t nearest;  // index into S, or S.size() when there is no candidate
    double min_distance() const { return boundary_distance < puncture_distance ? boundary_distance : puncture_distance; }
    double upper() const { return 2.0 / min_distance(); }
};

LocalDensity local_density(const CircleDomain& domain, const PunctureSet& S, std::span<const std::size_t> candidates,
                           Vec2 z);

}  // namespace kbound
