#pragma once

#include <vector>

#include "kbound/domain.hpp"
#include "kbound/loop.hpp"

namespace kbound {

/// Outer disk r = 10 at the origin minus the unit disks at (-3, 0) and (3, 0).
CircleDomain two_hole_domain();

/// Circle of radius 2.5 around the first hole, counterclockwise, based at t = 0.
SmoothLoop single_hole_loop();

/// Circle through `base` with the given center and orientation, based at `base`.
SmoothLoop circle_through(Vec2 center, Vec2 base, bool counterclockwise);

/// Two loops based at the origin, around the first and the second hole of
/// two_hole_domain(), rotated to share the unit tangent w = (0, 1).
std::vector<SmoothLoop> common_base_loops(double eps = 1.5);

}  // namespace kbound
