#include "kbound/density.hpp"

#include <cmath>
#include <complex>

#include "kbound/error.hpp"

namespace kbound {

namespace {

void require_inside(const CircleDomain& domain, Vec2 z) {
    if (!domain.contains(z)) fail(ErrorKind::invalid_argument, "point is outside the open domain");
}

using Complex = std::complex<double>;

}  // namespace

double upper_density(const CircleDomain& domain, const PunctureSet& S, Vec2 z) {
    require_inside(domain, z);
    return 2.0 / std::min(domain.dist_to_boundary(z), dist_to_punctures(S, z));
}

double upper_density(const CircleDomain& domain, const PunctureIndex& S, Vec2 z) {
    require_inside(domain, z);
    const auto n = S.nearest(z);
    if (n.distance == 0.0) fail(ErrorKind::invalid_argument, "point is a puncture");
    return 2.0 / std::min(domain.dist_to_boundary(z), n.distance);
}

double punctured_unit_disk_density(Vec2 a, Vec2 zeta) {
    // m(zeta) = (zeta - a) / (1 - conj(a) zeta) sends a to 0; pull back 1/(|w| log(1/|w|))
    const Complex ac(a.x, a.y);
    const Complex zc(zeta.x, zeta.y);
    const Complex den = 1.0 - std::conj(ac) * zc;
    const Complex w = (zc - ac) / den;
    const double aw = std::abs(w);
    const double dm = (1.0 - std::norm(ac)) / std::norm(den);
    return dm / (aw * std::log(1.0 / aw));
}

double lower_density(const CircleDomain& domain, const PunctureSet& S, Vec2 z) {
    require_inside(domain, z);
    if (!S.empty() && dist_to_punctures(S, z) == 0.0) fail(ErrorKind::invalid_argument, "point is a puncture");
    const auto& outer = domain.outer();
    const double R = outer.radius;
    const Vec2 zeta = (z - outer.center) * (1.0 / R);
    double best = 2.0 * R / (R * R - norm2(z - outer.center));
    auto pulled = [&](Vec2 p) {
        const Vec2 a = (p - outer.center) * (1.0 / R);
        best = std::max(best, punctured_unit_disk_density(a, zeta) / R);
    };
    for (const auto& p : S.points()) pulled(p);
    for (const auto& c : domain.inner()) pulled(c.center);
    return best;
}

DensityBracket density_bracket(const CircleDomain& domain, const PunctureSet& S, Vec2 z) {
    return {lower_density(domain, S, z), upper_density(domain, S, z)};
}

CircleDomain ReferenceModel::domain() const {
    switch (kind) {
        case Kind::annulus:
            return CircleDomain({{0.0, 0.0}, 1.0}, {{{0.0, 0.0}, r}});
        default:
            return CircleDomain({{0.0, 0.0}, R});
    }
}

PunctureSet ReferenceModel::punctures() const {
    if (kind == Kind::punctured_disk) return PunctureSet({{0.0, 0.0}});
    return {};
}

bool ReferenceModel::contains(Vec2 z) const {
    const double m = norm(z);
    switch (kind) {
        case Kind::disk: return m < R;
        case Kind::punctured_disk: return m > 0.0 && m < R;
        case Kind::annulus: return m > r && m < 1.0;
    }
    return false;
}

double reference_density(const ReferenceModel& model, Vec2 z) {
    if (!model.contains(z)) fail(ErrorKind::invalid_argument, "point is outside the model domain");
    const double m = norm(z);
    switch (model.kind) {
        case ReferenceModel::Kind::disk:
            return 2.0 * model.R / (model.R * model.R - norm2(z));
        case ReferenceModel::Kind::punctured_disk:
            return 1.0 / (m * std::log(model.R / m));
        case ReferenceModel::Kind::annulus: {
            const double L = std::log(1.0 / model.r);
            return M_PI / (m * L * std::sin(M_PI * std::log(1.0 / m) / L));
        }
    }
    return 0.0;
}

LocalDensity local_density(const CircleDomain& domain, const PunctureSet& S, std::span<const std::size_t> candidates,
                           Vec2 z) {
    LocalDensity out{0.0, std::numeric_limits<double>::infinity(), S.size()};
    const auto& outer = domain.outer();
    double b = outer.radius - std::sqrt(norm2(z - outer.center));
    for (const auto& c : domain.inner()) b = std::min(b, std::sqrt(norm2(z - c.center)) - c.radius);
    out.boundary_distance = b;
    double best2 = std::numeric_limits<double>::infinity();
    for (auto i : candidates) {
        const double d2 = norm2(z - S[i]);
        if (d2 < best2) {
            best2 = d2;
            out.nearest = i;
        }
    }
    out.puncture_distance = std::sqrt(best2);
    return out;
}

}  // namespace kbound
