#pragma once

#include <span>
#include <string>
#include <vector>

#include "kbound/fermi.hpp"
#include "kbound/growth.hpp"
#include "kbound/strip_analysis.hpp"

namespace kbound {

/// Minimal self-contained SVG document in world coordinates (y up).
class SvgCanvas {
public:
    SvgCanvas(double xmin, double ymin, double xmax, double ymax, int width_px = 800);

    void polyline(std::span<const Vec2> pts, const std::string& stroke, double width, bool closed = false);
    void circle(Vec2 c, double r, const std::string& stroke, const std::string& fill, double width = 1.0);
    void dot(Vec2 c, double r_px, const std::string& fill);
    void text(Vec2 at, const std::string& s, int size_px = 12, const std::string& anchor = "start");
    Vec2 to_px(Vec2 w) const;
    std::string str() const;

private:
    double xmin_, ymin_, xmax_, ymax_;
    int w_, h_;
    std::string body_;
};

/// Domain boundary, strip nodes colored by Voronoi cell, punctures, and the selected parallel curve.
std::string strip_svg(const FermiStrip& strip, const PunctureSet& S, const VoronoiAssignment& cells,
                      const SmoothLoop* selected);

/// Log-log plot of upper_estimate and holder_bound against s, with both reference shapes
/// scaled to the first record.
std::string growth_svg(std::span<const GrowthRecord> records);

}  // namespace kbound
