#include "kbound/scenarios.hpp"

#include <cmath>

namespace kbound {

CircleDomain two_hole_domain() { return CircleDomain({{0.0, 0.0}, 10.0}, {{{-3.0, 0.0}, 1.0}, {{3.0, 0.0}, 1.0}}); }

SmoothLoop single_hole_loop() { return make_series_loop(circle_coefficients({-3.0, 0.0}, 2.5), 0.0); }

SmoothLoop circle_through(Vec2 center, Vec2 base, bool counterclockwise) {
    const Vec2 d = base - center;
    const double t = counterclockwise ? std::atan2(d.y, d.x) : std::atan2(-d.y, d.x);
    return make_series_loop(circle_coefficients(center, norm(d), counterclockwise), t);
}

std::vector<SmoothLoop> common_base_loops(double eps) {
    const Vec2 b0{0.0, 0.0};
    const Vec2 w{0.0, 1.0};
    std::vector<SmoothLoop> out;
    out.push_back(rotate_tangent_at_basepoint(circle_through({-3.0, 0.2}, b0, true), w, eps));
    out.push_back(rotate_tangent_at_basepoint(circle_through({3.0, 0.2}, b0, false), w, eps));
    return out;
}

}  // namespace kbound
