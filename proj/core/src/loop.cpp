#include "kbound/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kbound/error.hpp"
#include "kbound/quadrature.hpp"

namespace kbound {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double positive_mod(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) r += period;
    if (r >= period) r -= period;
    return r;
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

Vec2 CurveShape::point(double t) const {
    const auto j = jet(t);
    return {j.x.value(), j.y.value()};
}

int TrigCoefficients::degree() const {
    const auto n = std::max({x_cos.size(), x_sin.size(), y_cos.size(), y_sin.size()});
    return n == 0 ? 0 : static_cast<int>(n) - 1;
}

TrigSeriesShape::TrigSeriesShape(TrigCoefficients coeffs) : coeffs_(std::move(coeffs)) {
    const auto m = static_cast<std::size_t>(coeffs_.degree() + 1);
    coeffs_.x_cos.resize(m, 0.0);
    coeffs_.x_sin.resize(m, 0.0);
    coeffs_.y_cos.resize(m, 0.0);
    coeffs_.y_sin.resize(m, 0.0);
}

double TrigSeriesShape::period() const { return kTwoPi; }

CurveJet TrigSeriesShape::jet(double t) const {
    CurveJet out;
    const double c1 = std::cos(t);
    const double s1 = std::sin(t);
    double ck = 1.0;
    double sk = 0.0;
    const int m = coeffs_.degree();
    for (int k = 0; k <= m; ++k) {
        if (k > 0) {
            // angle addition keeps one trig call per evaluation
            const double cn = ck * c1 - sk * s1;
            const double sn = sk * c1 + ck * s1;
            ck = cn;
            sk = sn;
        }
        const double kk = k;
        const double ax = coeffs_.x_cos[k], bx = k ? coeffs_.x_sin[k] : 0.0;
        const double ay = coeffs_.y_cos[k], by = k ? coeffs_.y_sin[k] : 0.0;
        const double vx = ax * ck + bx * sk, dx = -ax * sk + bx * ck;
        const double vy = ay * ck + by * sk, dy = -ay * sk + by * ck;
        out.x.c[0] += vx;
        out.y.c[0] += vy;
        out.x.c[1] += kk * dx;
        out.y.c[1] += kk * dy;
        out.x.c[2] += -kk * kk * vx / 2.0;
        out.y.c[2] += -kk * kk * vy / 2.0;
        out.x.c[3] += -kk * kk * kk * dx / 6.0;
        out.y.c[3] += -kk * kk * kk * dy / 6.0;
    }
    return out;
}

Vec2 TrigSeriesShape::point(double t) const {
    double x = 0.0, y = 0.0;
    const double c1 = std::cos(t);
    const double s1 = std::sin(t);
    double ck = 1.0, sk = 0.0;
    const int m = coeffs_.degree();
    for (int k = 0; k <= m; ++k) {
        if (k > 0) {
            const double cn = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = cn;
        }
        x += coeffs_.x_cos[k] * ck + (k ? coeffs_.x_sin[k] * sk : 0.0);
        y += coeffs_.y_cos[k] * ck + (k ? coeffs_.y_sin[k] * sk : 0.0);
    }
    return {x, y};
}

TrigCoefficients circle_coefficients(Vec2 center, double radius, bool counterclockwise) {
    return ellipse_coefficients(center, radius, radius, 0.0, counterclockwise);
}

TrigCoefficients ellipse_coefficients(Vec2 center, double a, double b, double rotation, bool counterclockwise) {
    const double c = std::cos(rotation), s = std::sin(rotation);
    const double sb = counterclockwise ? b : -b;
    // (a cos t, sb sin t) rotated by `rotation`
    TrigCoefficients k;
    k.x_cos = {center.x, a * c};
    k.x_sin = {0.0, -sb * s};
    k.y_cos = {center.y, a * s};
    k.y_sin = {0.0, sb * c};
    return k;
}

LoopFrame frame_from_jet(double t, const CurveJet& jet) {
    LoopFrame f;
    f.t = t;
    f.position = {jet.x.c[0], jet.y.c[0]};
    const Vec2 d1{jet.x.c[1], jet.y.c[1]};
    const Vec2 d2{2.0 * jet.x.c[2], 2.0 * jet.y.c[2]};
    f.speed = norm(d1);
    f.tangent = {d1.x / f.speed, d1.y / f.speed};
    f.normal = rot90(f.tangent);
    f.curvature = cross(d1, d2) / (f.speed * f.speed * f.speed);
    return f;
}

// ---------------------------------------------------------------------------

SmoothLoop SmoothLoop::from_shape(std::shared_ptr<const CurveShape> shape, double base_t) {
    return from_shape(std::move(shape), base_t, Options{});
}

SmoothLoop SmoothLoop::from_shape(std::shared_ptr<const CurveShape> shape, double base_t, Options options) {
    if (!shape) fail(ErrorKind::invalid_argument, "null curve shape");
    if (options.table_panels < 4) fail(ErrorKind::invalid_argument, "arclength table needs at least 4 panels");
    SmoothLoop loop;
    loop.shape_ = std::move(shape);
    loop.period_ = loop.shape_->period();
    loop.base_t_ = base_t;

    const auto& rule = gauss_legendre(16);
    const int n = options.table_panels;
    const double h = loop.period_ / n;
    loop.cumulative_.assign(static_cast<std::size_t>(n) + 1, 0.0);
    double min_speed = std::numeric_limits<double>::infinity();
    double max_speed = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = base_t + i * h;
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double sp = loop.speed(a + 0.5 * h * (rule.nodes[q] + 1.0));
            min_speed = std::min(min_speed, sp);
            max_speed = std::max(max_speed, sp);
            acc += rule.weights[q] * sp;
        }
        loop.cumulative_[i + 1] = loop.cumulative_[i] + 0.5 * h * acc;
    }
    if (!(min_speed > 1e-12 * std::max(max_speed, 1e-300))) {
        fail(ErrorKind::geometry, "loop is not regular (|z'| vanishes)");
    }
    loop.length_ = loop.cumulative_.back();
    if (options.require_simple && !loop.is_simple(options.simple_samples)) {
        fail(ErrorKind::geometry, "loop is not simple at sampling resolution");
    }
    return loop;
}

double SmoothLoop::speed(double t) const {
    const auto j = shape_->jet(t);
    return std::hypot(j.x.c[1], j.y.c[1]);
}

double SmoothLoop::partial_arclength(double t0, double t1) const {
    const auto& rule = gauss_legendre(16);
    const double half = 0.5 * (t1 - t0);
    const double mid = 0.5 * (t0 + t1);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.weights[q] * speed(mid + half * rule.nodes[q]);
    return half * acc;
}

double SmoothLoop::parameter_at(double tau) const {
    const double s = positive_mod(tau, length_);
    const int n = table_panels();
    const double h = period_ / n;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    int i = static_cast<int>(it - cumulative_.begin()) - 1;
    i = std::clamp(i, 0, n - 1);
    const double ta = base_t_ + i * h;
    const double sa = cumulative_[i];
    const double sb = cumulative_[i + 1];
    double t = ta + h * (s - sa) / (sb - sa);
    for (int iter = 0; iter < 30; ++iter) {
        const double f = sa + partial_arclength(ta, t) - s;
        const double step = f / speed(t);
        t = std::clamp(t - step, ta, ta + h);
        if (std::abs(step) < 1e-15 * period_) break;
    }
    return t;
}

double SmoothLoop::arclength_at(double t) const {
    const double rel = positive_mod(t - base_t_, period_);
    const int n = table_panels();
    const double h = period_ / n;
    const int i = std::clamp(static_cast<int>(rel / h), 0, n - 1);
    const double ta = base_t_ + i * h;
    return cumulative_[i] + partial_arclength(ta, base_t_ + rel);
}

LoopFrame SmoothLoop::frame_at_parameter(double t) const { return frame_from_jet(t, shape_->jet(t)); }

std::vector<Vec2> SmoothLoop::sample(int n) const {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(point(length_ * i / n));
    return out;
}

std::vector<Vec2> SmoothLoop::sample_parameter(int n) const {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(shape_->point(base_t_ + period_ * i / n));
    return out;
}

bool SmoothLoop::is_simple(int n) const {
    const auto v = sample_parameter(n);
    struct Seg {
        double xmin, xmax;
        int i;
    };
    std::vector<Seg> segs;
    segs.reserve(v.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        segs.push_back({std::min(a.x, b.x), std::max(a.x, b.x), i});
    }
    std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.xmin < b.xmin || (a.xmin == b.xmin && a.i < b.i); });
    for (std::size_t a = 0; a < segs.size(); ++a) {
        for (std::size_t b = a + 1; b < segs.size() && segs[b].xmin <= segs[a].xmax; ++b) {
            const int i = segs[a].i, j = segs[b].i;
            const int d = std::abs(i - j);
            if (d <= 1 || d == n - 1) continue;  // neighbours share an endpoint
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

double SmoothLoop::max_abs_curvature(int n) const {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(frame_at_parameter(base_t_ + period_ * i / n).curvature));
    return m;
}

double SmoothLoop::total_abs_curvature(int n) const {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto f = frame_at_parameter(base_t_ + period_ * (i + 0.5) / n);
        acc += std::abs(f.curvature) * f.speed;
    }
    return acc * period_ / n;
}

SmoothLoop make_series_loop(TrigCoefficients coeffs, double base_t) {
    return make_series_loop(std::move(coeffs), base_t, SmoothLoop::Options{});
}

SmoothLoop make_series_loop(TrigCoefficients coeffs, double base_t, SmoothLoop::Options options) {
    return SmoothLoop::from_shape(std::make_shared<TrigSeriesShape>(std::move(coeffs)), base_t, options);
}

SmoothLoop resample_arclength(const SmoothLoop& loop, int n) {
    SmoothLoop::Options opt;
    opt.table_panels = n;
    opt.require_simple = false;
    return SmoothLoop::from_shape(loop.shape_ptr(), loop.base_parameter(), opt);
}

std::vector<int> winding_vector(const CircleDomain& domain, const SmoothLoop& loop) {
    const double tol = 1e-9 * domain.outer().radius;
    std::vector<int> out;
    out.reserve(domain.hole_count());
    for (std::size_t h = 0; h < domain.hole_count(); ++h) {
        const Vec2 c = domain.inner()[h].center;
        bool done = false;
        for (int n = 1024; n <= (1 << 18) && !done; n *= 2) {
            const auto v = loop.sample_parameter(n);
            double total = 0.0;
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
                const Vec2 a = v[i] - c;
                const Vec2 b = v[(i + 1) % n] - c;
                if (norm(a) < tol) {
                    std::ostringstream os;
                    os << "loop passes within tolerance of inner disk center " << h;
                    fail(ErrorKind::geometry, os.str());
                }
                const double inc = std::atan2(cross(a, b), dot(a, b));
                worst = std::max(worst, std::abs(inc));
                total += inc;
            }
            const double turns = total / kTwoPi;
            const double rounded = std::round(turns);
            if (worst < std::numbers::pi / 4.0 && std::abs(turns - rounded) < 0.01) {
                out.push_back(static_cast<int>(rounded));
                done = true;
            }
        }
        if (!done) fail(ErrorKind::geometry, "winding number did not converge to an integer");
    }
    return out;
}

// ---------------------------------------------------------------------------

TangentRotation::TangentRotation(Vec2 center, double angle, double eps)
    : center_(center), angle_(angle), eps_(eps) {
    if (!(eps > 0.0)) fail(ErrorKind::invalid_argument, "eps must be positive");
}

double TangentRotation::cutoff(double r) const {
    const double lo = eps_ / 3.0;
    const double hi = 2.0 * eps_ / 3.0;
    if (r <= lo) return 1.0;
    if (r >= hi) return 0.0;
    const double x = (hi - r) / lo;
    const double f = std::exp(-1.0 / x);
    const double g = std::exp(-1.0 / (1.0 - x));
    return f / (f + g);
}

Vec2 TangentRotation::apply(Vec2 x) const {
    const Vec2 y = x - center_;
    const double chi = cutoff(norm(y));
    if (chi == 0.0) return x;
    return center_ + rotate(y, angle_ * chi);
}

CurveJet TangentRotation::apply(const CurveJet& x) const {
    using T = Taylor<3>;
    const T yx = x.x - T(center_.x);
    const T yy = x.y - T(center_.y);
    const T r2 = yx * yx + yy * yy;
    const double lo = eps_ / 3.0;
    const double hi = 2.0 * eps_ / 3.0;
    T chi;
    if (r2.value() >= hi * hi) return x;
    if (r2.value() <= lo * lo) {
        chi = T(1.0);  // flat part of the cutoff: all derivatives vanish
    } else {
        const T r = sqrt(r2);
        const T s = (T(hi) - r) / lo;
        const T f = exp(T(-1.0) / s);
        const T g = exp(T(-1.0) / (T(1.0) - s));
        chi = f / (f + g);
    }
    T sn, cs;
    sincos(chi * angle_, sn, cs);
    CurveJet out;
    out.x = T(center_.x) + cs * yx - sn * yy;
    out.y = T(center_.y) + sn * yx + cs * yy;
    return out;
}

RotatedShape::RotatedShape(std::shared_ptr<const CurveShape> base, TangentRotation map)
    : base_(std::move(base)), map_(map) {}

CurveJet RotatedShape::jet(double t) const { return map_.apply(base_->jet(t)); }

Vec2 RotatedShape::point(double t) const { return map_.apply(base_->point(t)); }

SmoothLoop rotate_tangent_at_basepoint(const SmoothLoop& loop, Vec2 w, double eps) {
    if (!(norm(w) > 0.0)) fail(ErrorKind::invalid_argument, "target tangent must be nonzero");
    w = normalized(w);
    const Vec2 p = loop.base_point();
    const Vec2 w0 = loop.base_tangent();
    const double angle = std::atan2(cross(w0, w), dot(w0, w));

    // the eps-ball must be crossed by one connected branch
    constexpr int n = 4096;
    const auto v = loop.sample_parameter(n);
    int runs = 0;
    for (int i = 0; i < n; ++i) {
        const bool in = distance(v[i], p) < eps;
        const bool prev_in = distance(v[(i + n - 1) % n], p) < eps;
        if (in && !prev_in) ++runs;
    }
    if (runs > 1) fail(ErrorKind::geometry, "branch collision: eps-ball meets more than one branch of the loop");

    if (angle == 0.0) return loop;
    SmoothLoop::Options opt;
    opt.table_panels = loop.table_panels();
    opt.require_simple = true;
    auto shape = std::make_shared<RotatedShape>(loop.shape_ptr(), TangentRotation(p, angle, eps));
    return SmoothLoop::from_shape(std::move(shape), loop.base_parameter(), opt);
}

// ---------------------------------------------------------------------------

OffsetShape::OffsetShape(std::shared_ptr<const CurveShape> base, double u) : base_(std::move(base)), u_(u) {}

CurveJet OffsetShape::jet(double t) const {
    using T = Taylor<3>;
    const auto j = base_->jet(t);
    const T dx = differentiate(j.x);
    const T dy = differentiate(j.y);
    const T sp = sqrt(dx * dx + dy * dy);
    CurveJet out;
    out.x = j.x - u_ * (dy / sp);
    out.y = j.y + u_ * (dx / sp);
    return out;
}

Vec2 OffsetShape::point(double t) const {
    const auto f = frame_from_jet(t, base_->jet(t));
    return f.position + u_ * f.normal;
}

}  // namespace kbound
