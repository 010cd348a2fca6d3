#include "kbound/fermi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kbound/error.hpp"
#include "kbound/parallel.hpp"
#include "kbound/quadrature.hpp"

namespace kbound {

namespace {

constexpr int kClearanceSamples = 4096;

// Signed boundary gap of the normal segment {gamma(t) + u eta(t) : |u| <= delta}.
double segment_gap(const CircleDomain& domain, const LoopFrame& f, double delta) {
    const auto& outer = domain.outer();
    const double far = std::max(distance(f.position + delta * f.normal, outer.center),
                                distance(f.position - delta * f.normal, outer.center));
    double gap = outer.radius - far;
    for (const auto& c : domain.inner()) {
        const double u = std::clamp(dot(c.center - f.position, f.normal), -delta, delta);
        gap = std::min(gap, distance(f.position + u * f.normal, c.center) - c.radius);
    }
    return gap;
}

double signed_clearance(const CircleDomain& domain, const SmoothLoop& loop, double delta) {
    const auto& shape = loop.shape();
    const double period = shape.period();
    const double t0 = loop.base_parameter();
    const double h = period / kClearanceSamples;
    auto gap_at = [&](double t) { return segment_gap(domain, frame_from_jet(t, shape.jet(t)), delta); };

    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < kClearanceSamples; ++i) {
        const double g = gap_at(t0 + i * h);
        if (g < best) {
            best = g;
            best_i = i;
        }
    }
    // golden-section polish inside the bracketing samples
    double a = t0 + (best_i - 1) * h;
    double b = t0 + (best_i + 1) * h;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double gc = gap_at(c), gd = gap_at(d);
    for (int iter = 0; iter < 48; ++iter) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = gap_at(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = gap_at(d);
        }
    }
    return std::min({best, gc, gd});
}

}  // namespace

double strip_clearance(const CircleDomain& domain, const SmoothLoop& loop, double delta) {
    return std::max(0.0, signed_clearance(domain, loop, delta));
}

double max_admissible_delta(const CircleDomain& domain, const SmoothLoop& loop) {
    const double kmax = loop.max_abs_curvature();
    double hi = kmax > 0.0 ? 1.0 / kmax : 2.0 * domain.outer().radius;
    if (signed_clearance(domain, loop, 0.0) <= 0.0) return 0.0;
    if (signed_clearance(domain, loop, hi) > 0.0) return hi;
    double lo = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (signed_clearance(domain, loop, mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

Vec2 FermiStrip::map(double t, double u) const {
    const auto f = loop_.frame_at_parameter(t);
    return f.position + u * f.normal;
}

std::optional<FermiCoordinates> FermiStrip::locate(Vec2 z) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_tau_; ++i) {
        const double d = norm2(z - frames_[static_cast<std::size_t>(i)].position);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    if (std::sqrt(best_d) > 2.0 * delta_ + loop_.length() / n_tau_) return std::nullopt;

    // Newton on the foot-point condition <z - gamma(t), gamma'(t)> = 0
    const auto& shape = loop_.shape();
    const double lo = t_nodes_[static_cast<std::size_t>(best == 0 ? 0 : best - 1)];
    const double hi = t_nodes_[static_cast<std::size_t>(best + 1)];
    const double span = best == 0 ? hi - t_nodes_[0] : hi - lo;
    double t = t_nodes_[static_cast<std::size_t>(best)];
    for (int iter = 0; iter < 40; ++iter) {
        const auto j = shape.jet(t);
        const Vec2 g{j.x.c[0], j.y.c[0]};
        const Vec2 d1{j.x.c[1], j.y.c[1]};
        const Vec2 d2{2.0 * j.x.c[2], 2.0 * j.y.c[2]};
        const Vec2 r = z - g;
        const double f = dot(r, d1);
        const double fp = -norm2(d1) + dot(r, d2);
        if (fp >= 0.0) break;
        double step = f / fp;
        step = std::clamp(step, -span, span);
        t -= step;
        if (std::abs(step) < 1e-15 * shape.period()) break;
    }
    const auto f = loop_.frame_at_parameter(t);
    const Vec2 r = z - f.position;
    const double u = dot(r, f.normal);
    if (std::abs(dot(r, f.tangent)) > 1e-9 * std::max(1.0, std::abs(u))) return std::nullopt;
    if (std::abs(u) > delta_ * (1.0 + 1e-12)) return std::nullopt;
    return FermiCoordinates{loop_.arclength_at(t), u, t};
}

FermiStrip build_fermi_strip(const CircleDomain& domain, const SmoothLoop& loop, double delta, int n_tau, int n_u) {
    if (!(delta > 0.0)) fail(ErrorKind::invalid_argument, "strip half-width must be positive");
    if (n_tau < 8 || n_u < 2) fail(ErrorKind::invalid_argument, "strip grid too coarse");

    const double kmax = loop.max_abs_curvature();
    const double clearance = signed_clearance(domain, loop, delta);
    if (delta * kmax >= 1.0 || clearance <= 0.0) {
        std::ostringstream os;
        os.precision(12);
        os << "strip half-width " << delta << " too large (delta*max|kappa| = " << delta * kmax
           << ", clearance = " << clearance << "); maximal admissible delta = " << max_admissible_delta(domain, loop);
        fail(ErrorKind::geometry, os.str());
    }

    FermiStrip s(domain, loop);
    s.delta_ = delta;
    s.n_tau_ = n_tau;
    s.n_u_ = n_u;
    s.max_curvature_ = kmax;
    s.clearance_ = clearance;

    s.t_nodes_.resize(static_cast<std::size_t>(n_tau) + 1);
    s.frames_.resize(static_cast<std::size_t>(n_tau) + 1);
    parallel_for(static_cast<std::size_t>(n_tau), [&](std::size_t i) {
        s.t_nodes_[i] = loop.parameter_at(s.tau_node(static_cast<int>(i)));
        s.frames_[i] = loop.frame_at_parameter(s.t_nodes_[i]);
    });
    s.t_nodes_[static_cast<std::size_t>(n_tau)] = loop.base_parameter() + loop.shape().period();
    s.frames_[static_cast<std::size_t>(n_tau)] = loop.frame_at_parameter(s.t_nodes_.back());

    const std::size_t nodes = static_cast<std::size_t>(n_tau) * static_cast<std::size_t>(n_u);
    s.positions_.resize(nodes);
    s.jacobian_.resize(nodes);
    s.tangential_.resize(nodes);
    std::vector<double> row_kappa0(static_cast<std::size_t>(n_tau), 1.0);
    parallel_for(static_cast<std::size_t>(n_tau), [&](std::size_t i) {
        // d/dtau of the Fermi map: (z' + u eta') / |z'|, eta' from the jet of the normal
        using T = Taylor<3>;
        const auto jet = loop.shape().jet(s.t_nodes_[i]);
        const T dx = differentiate(jet.x);
        const T dy = differentiate(jet.y);
        const T sp = sqrt(dx * dx + dy * dy);
        const T nx = -dy / sp;
        const T ny = dx / sp;
        const Vec2 d1{dx.value(), dy.value()};
        const Vec2 eta{nx.value(), ny.value()};
        const Vec2 deta{nx.c[1], ny.c[1]};
        const double speed = sp.value();
        double k0 = 1.0;
        for (int j = 0; j < n_u; ++j) {
            const double u = s.u_node(j);
            const std::size_t k = i * static_cast<std::size_t>(n_u) + static_cast<std::size_t>(j);
            const Vec2 dtau = (d1 + u * deta) * (1.0 / speed);
            const double jac = cross(dtau, eta);
            const double scale = norm(dtau);
            s.positions_[k] = s.frames_[i].position + u * eta;
            s.jacobian_[k] = jac;
            s.tangential_[k] = scale;
            k0 = std::max({k0, jac / scale, scale / jac});
        }
        row_kappa0[i] = k0;
    });
    s.kappa0_ = *std::max_element(row_kappa0.begin(), row_kappa0.end());

    // area: integrate J dtau du = (1 - u kappa) |z'| dt du; J is affine in u, so
    // integrating in u exactly leaves 2 delta |z'| dt per panel.
    const auto& rule = gauss_legendre(8);
    std::vector<double> panel_area(static_cast<std::size_t>(n_tau));
    for (int i = 0; i < n_tau; ++i) {
        const double a = s.t_nodes_[static_cast<std::size_t>(i)];
        const double b = s.t_nodes_[static_cast<std::size_t>(i) + 1];
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double t = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
            const auto f = loop.frame_at_parameter(t);
            double inner = 0.0;
            const auto& ru = gauss_legendre(2);
            for (std::size_t r = 0; r < ru.size(); ++r) {
                const double u = delta * ru.nodes[r];
                inner += ru.weights[r] * delta * (1.0 - u * f.curvature);
            }
            acc += rule.weights[q] * inner * f.speed;
        }
        panel_area[static_cast<std::size_t>(i)] = 0.5 * (b - a) * acc;
    }
    s.area_ = pairwise_sum(panel_area);
    return s;
}

SmoothLoop parallel_curve(const FermiStrip& strip, double u) {
    if (std::abs(u) > strip.delta()) fail(ErrorKind::invalid_argument, "parallel offset |u| exceeds strip half-width");
    if (u == 0.0) return strip.loop();
    SmoothLoop::Options opt;
    opt.table_panels = strip.loop().table_panels();
    opt.require_simple = false;  // simple because the Fermi map is a diffeomorphism
    return SmoothLoop::from_shape(std::make_shared<OffsetShape>(strip.loop().shape_ptr(), u),
                                  strip.loop().base_parameter(), opt);
}

}  // namespace kbound
