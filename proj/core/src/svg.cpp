#include "kbound/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kbound/csv.hpp"

namespace kbound {

SvgCanvas::SvgCanvas(double xmin, double ymin, double xmax, double ymax, int width_px)
    : xmin_(xmin), ymin_(ymin), xmax_(xmax), ymax_(ymax), w_(width_px) {
    h_ = std::max(1, static_cast<int>(std::lround(width_px * (ymax - ymin) / (xmax - xmin))));
}

Vec2 SvgCanvas::to_px(Vec2 w) const {
    return {(w.x - xmin_) / (xmax_ - xmin_) * w_, (ymax_ - w.y) / (ymax_ - ymin_) * h_};
}

void SvgCanvas::polyline(std::span<const Vec2> pts, const std::string& stroke, double width, bool closed) {
    body_ += closed ? "<polygon" : "<polyline";
    body_ += " fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + format_number(width) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 q = to_px(pts[i]);
        if (i) body_ += ' ';
        body_ += format_number(std::round(q.x * 100) / 100) + "," + format_number(std::round(q.y * 100) / 100);
    }
    body_ += "\"/>\n";
}

void SvgCanvas::circle(Vec2 c, double r, const std::string& stroke, const std::string& fill, double width) {
    const Vec2 q = to_px(c);
    const double rp = r / (xmax_ - xmin_) * w_;
    body_ += "<circle cx=\"" + format_number(q.x) + "\" cy=\"" + format_number(q.y) + "\" r=\"" + format_number(rp) +
             "\" stroke=\"" + stroke + "\" fill=\"" + fill + "\" stroke-width=\"" + format_number(width) + "\"/>\n";
}

void SvgCanvas::dot(Vec2 c, double r_px, const std::string& fill) {
    const Vec2 q = to_px(c);
    body_ += "<circle cx=\"" + format_number(q.x) + "\" cy=\"" + format_number(q.y) + "\" r=\"" +
             format_number(r_px) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(Vec2 at, const std::string& s, int size_px, const std::string& anchor) {
    const Vec2 q = to_px(at);
    body_ += "<text x=\"" + format_number(q.x) + "\" y=\"" + format_number(q.y) + "\" font-size=\"" +
             std::to_string(size_px) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s +
             "</text>\n";
}

std::string SvgCanvas::str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w_) + "\" height=\"" +
           std::to_string(h_) + "\" viewBox=\"0 0 " + std::to_string(w_) + " " + std::to_string(h_) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

namespace {

std::string cell_color(std::size_t k) {
    static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
    return palette[k % (sizeof palette / sizeof palette[0])];
}

}  // namespace

std::string strip_svg(const FermiStrip& strip, const PunctureSet& S, const VoronoiAssignment& cells,
                      const SmoothLoop* selected) {
    const auto& outer = strip.domain().outer();
    SvgCanvas svg(outer.center.x - outer.radius, outer.center.y - outer.radius, outer.center.x + outer.radius,
                  outer.center.y + outer.radius);
    svg.circle(outer.center, outer.radius, "black", "none", 1.5);
    for (const auto& c : strip.domain().inner()) svg.circle(c.center, c.radius, "black", "#dddddd", 1.0);
    for (int i = 0; i < strip.n_tau(); ++i) {
        for (int j = 0; j < strip.n_u(); ++j) {
            const auto k = cells.at(i, j);
            svg.dot(strip.position(i, j), 1.2, k == VoronoiAssignment::none ? "#999999" : cell_color(k));
        }
    }
    const auto core = strip.loop().sample(512);
    svg.polyline(core, "#333333", 1.0, true);
    for (const auto& p : S.points()) svg.dot(p, 2.5, "black");
    if (selected) {
        const auto pts = selected->sample(512);
        svg.polyline(pts, "#d62728", 2.0, true);
    }
    return svg.str();
}

std::string growth_svg(std::span<const GrowthRecord> records) {
    std::vector<GrowthRecord> recs;
    for (const auto& r : records) {
        if (r.s > 0) recs.push_back(r);
    }
    SvgCanvas empty(0, 0, 1, 0.75);
    if (recs.empty()) return empty.str();
    std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.s < b.s; });

    double xmin = std::log10(static_cast<double>(recs.front().s));
    double xmax = std::log10(static_cast<double>(recs.back().s));
    if (xmax <= xmin) xmax = xmin + 1.0;
    const double scale_u = recs.front().holder_bound / reference_curves(recs.front().s).upper;
    const double scale_l = recs.front().upper_estimate / reference_curves(recs.front().s).lower;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& r : recs) {
        const auto ref = reference_curves(r.s);
        for (double v : {r.upper_estimate, r.holder_bound, scale_u * ref.upper, scale_l * ref.lower}) {
            ymin = std::min(ymin, std::log10(v));
            ymax = std::max(ymax, std::log10(v));
        }
    }
    const double padx = 0.08 * (xmax - xmin), pady = 0.08 * (ymax - ymin + 1e-9);
    SvgCanvas svg(xmin - padx, ymin - pady, xmax + padx, ymax + pady);

    auto series = [&](auto value) {
        std::vector<Vec2> pts;
        for (const auto& r : recs) pts.push_back({std::log10(static_cast<double>(r.s)), std::log10(value(r))});
        return pts;
    };
    svg.polyline(series([](const GrowthRecord& r) { return r.upper_estimate; }), "#1f77b4", 2.0);
    svg.polyline(series([](const GrowthRecord& r) { return r.holder_bound; }), "#d62728", 2.0);
    svg.polyline(series([&](const GrowthRecord& r) { return scale_u * reference_curves(r.s).upper; }), "#d62728", 1.0);
    svg.polyline(series([&](const GrowthRecord& r) { return scale_l * reference_curves(r.s).lower; }), "#1f77b4", 1.0);
    svg.text({xmin, ymax}, "log10 length vs log10 s: estimate (blue), Hoelder bound (red), thin = reference shapes");
    return svg.str();
}

}  // namespace kbound
