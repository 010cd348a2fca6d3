#pragma once

#include <memory>
#include <vector>

#include "kbound/domain.hpp"
#include "kbound/taylor.hpp"
#include "kbound/vec2.hpp"

namespace kbound {

/// Third-order jet of a planar curve at one parameter value.
using CurveJet = Vec2T<Taylor<3>>;

/// A closed parametrized curve t -> z(t), periodic with period().
class CurveShape {
public:
    virtual ~CurveShape() = default;
    virtual double period() const = 0;
    virtual CurveJet jet(double t) const = 0;
    virtual Vec2 point(double t) const;
};

/// z(t) = sum_k (a_k cos kt + b_k sin kt) per coordinate; entry 0 is the constant term
/// (b_0 is ignored).
struct TrigCoefficients {
    std::vector<double> x_cos, x_sin, y_cos, y_sin;
    int degree() const;
};

class TrigSeriesShape final : public CurveShape {
public:
    explicit TrigSeriesShape(TrigCoefficients coeffs);
    double period() const override;
    CurveJet jet(double t) const override;
    Vec2 point(double t) const override;
    const TrigCoefficients& coefficients() const { return coeffs_; }

private:
    TrigCoefficients coeffs_;
};

TrigCoefficients circle_coefficients(Vec2 center, double radius, bool counterclockwise = true);
TrigCoefficients ellipse_coefficients(Vec2 center, double a, double b, double rotation = 0.0,
                                      bool counterclockwise = true);

/// Frame of a loop at one point. Derivatives are with respect to the shape
/// parameter t; `tangent`, `normal` (left normal) and `curvature` are geometric.
struct LoopFrame {
    double t = 0.0;
    Vec2 position;
    Vec2 tangent;
    Vec2 normal;
    double speed = 0.0;      // |dz/dt|
    double curvature = 0.0;  // signed; positive when turning left
};

LoopFrame frame_from_jet(double t, const CurveJet& jet);

/// Smooth closed loop with an arclength table. Arclength tau is measured from
/// the base parameter, tau in [0, length()).
class SmoothLoop {
public:
    struct Options {
        int table_panels = 1024;
        bool require_simple = true;
        int simple_samples = 1024;
    };

    static SmoothLoop from_shape(std::shared_ptr<const CurveShape> shape, double base_t);
    static SmoothLoop from_shape(std::shared_ptr<const CurveShape> shape, double base_t, Options options);

    double length() const { return length_; }
    double base_parameter() const { return base_t_; }
    const CurveShape& shape() const { return *shape_; }
    const std::shared_ptr<const CurveShape>& shape_ptr() const { return shape_; }
    int table_panels() const { return static_cast<int>(cumulative_.size()) - 1; }

    /// Parameter t in [base_t, base_t + period) with arclength tau (taken mod length).
    double parameter_at(double tau) const;
    /// Arclength from the base point to parameter t (t taken mod period).
    double arclength_at(double t) const;

    LoopFrame frame_at_parameter(double t) const;
    LoopFrame frame(double tau) const { return frame_at_parameter(parameter_at(tau)); }
    Vec2 point(double tau) const { return shape_->point(parameter_at(tau)); }
    Vec2 base_point() const { return shape_->point(base_t_); }
    Vec2 base_tangent() const { return frame_at_parameter(base_t_).tangent; }

    /// n points uniformly spaced in arclength starting at the base point.
    std::vector<Vec2> sample(int n) const;
    /// n points uniformly spaced in the shape parameter.
    std::vector<Vec2> sample_parameter(int n) const;

    /// Segment-pair intersection test on a polygon with n vertices (necessary proxy).
    bool is_simple(int n = 1024) const;
    double max_abs_curvature(int n = 4096) const;
    double total_abs_curvature(int n = 4096) const;

private:
    SmoothLoop() = default;
    double speed(double t) const;
    double partial_arclength(double t0, double t1) const;

    std::shared_ptr<const CurveShape> shape_;
    double base_t_ = 0.0;
    double period_ = 0.0;
    double length_ = 0.0;
    std::vector<double> cumulative_;  // arclength at panel boundaries, size panels+1
};

SmoothLoop make_series_loop(TrigCoefficients coeffs, double base_t);
SmoothLoop make_series_loop(TrigCoefficients coeffs, double base_t, SmoothLoop::Options options);

/// Rebuilds the arclength table with n panels.
SmoothLoop resample_arclength(const SmoothLoop& loop, int n);

/// Winding number of the loop around each inner disk center.
std::vector<int> winding_vector(const CircleDomain& domain, const SmoothLoop& loop);

/// Area-preserving map x -> p + R(theta * chi(|x - p|)) (x - p), with a smooth
/// cutoff chi equal to 1 on [0, eps/3] and 0 on [2 eps/3, inf).
class TangentRotation {
public:
    TangentRotation(Vec2 center, double angle, double eps);
    Vec2 apply(Vec2 x) const;
    CurveJet apply(const CurveJet& x) const;
    double cutoff(double r) const;
    Vec2 center() const { return center_; }
    double angle() const { return angle_; }
    double eps() const { return eps_; }

private:
    Vec2 center_;
    double angle_;
    double eps_;
};

/// Rotates the unit tangent at the base point to w inside the eps-ball.
SmoothLoop rotate_tangent_at_basepoint(const SmoothLoop& loop, Vec2 w, double eps);

/// phi o base, same parametrization as the base shape.
class RotatedShape final : public CurveShape {
public:
    RotatedShape(std::shared_ptr<const CurveShape> base, TangentRotation map);
    double period() const override { return base_->period(); }
    CurveJet jet(double t) const override;
    Vec2 point(double t) const override;
    const TangentRotation& map() const { return map_; }

private:
    std::shared_ptr<const CurveShape> base_;
    TangentRotation map_;
};

/// z(t) + u * eta(t), parametrized by the base shape parameter. The returned
/// jet is exact through order 2.
class OffsetShape final : public CurveShape {
public:
    OffsetShape(std::shared_ptr<const CurveShape> base, double u);
    double period() const override { return base_->period(); }
    CurveJet jet(double t) const override;
    Vec2 point(double t) const override;

private:
    std::shared_ptr<const CurveShape> base_;
    double u_;
};

}  // namespace kbound
