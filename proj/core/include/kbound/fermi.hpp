#pragma once

#include <optional>
#include <vector>

#include "kbound/domain.hpp"
#include "kbound/loop.hpp"

namespace kbound {

struct FermiCoordinates {
    double tau = 0.0;
    double u = 0.0;
    double t = 0.0;  // shape parameter of the foot point
};

/// Tubular neighbourhood |u| <= delta of a smooth loop in Fermi coordinates
/// (tau, u) -> gamma(tau) + u * eta(tau), with a sample lattice of
/// n_tau x n_u nodes (tau periodic, u from -delta to delta inclusive).
class FermiStrip {
public:
    const CircleDomain& domain() const { return domain_; }
    const SmoothLoop& loop() const { return loop_; }
    double delta() const { return delta_; }
    int n_tau() const { return n_tau_; }
    int n_u() const { return n_u_; }

    double tau_node(int i) const { return loop_.length() * i / n_tau_; }
    double u_node(int j) const { return -delta_ + 2.0 * delta_ * j / (n_u_ - 1); }
    /// Shape parameter of tau node i; i == n_tau closes the loop (base + period).
    double t_node(int i) const { return t_nodes_[static_cast<std::size_t>(i)]; }
    const LoopFrame& frame_node(int i) const { return frames_[static_cast<std::size_t>(i)]; }

    Vec2 position(int i, int j) const { return positions_[index(i, j)]; }
    double jacobian(int i, int j) const { return jacobian_[index(i, j)]; }
    /// sqrt(rho_tautau) at node (i, j), i.e. |d/dtau of the Fermi map|.
    double tangential_scale(int i, int j) const { return tangential_[index(i, j)]; }

    double kappa0() const { return kappa0_; }
    double clearance() const { return clearance_; }
    double max_curvature() const { return max_curvature_; }
    /// rho-area of the strip by quadrature of the Jacobian.
    double area() const { return area_; }

    /// Plane position of Fermi point (shape parameter t, offset u).
    Vec2 map(double t, double u) const;

    /// Fermi coordinates of z, if z lies in the closed strip.
    std::optional<FermiCoordinates> locate(Vec2 z) const;

private:
    friend FermiStrip build_fermi_strip(const CircleDomain&, const SmoothLoop&, double, int, int);
    FermiStrip(CircleDomain domain, SmoothLoop loop) : domain_(std::move(domain)), loop_(std::move(loop)) {}
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(((i % n_tau_) + n_tau_) % n_tau_) * n_u_ + static_cast<std::size_t>(j);
    }

    CircleDomain domain_;
    SmoothLoop loop_;
    double delta_ = 0.0;
    int n_tau_ = 0;
    int n_u_ = 0;
    std::vector<double> t_nodes_;
    std::vector<LoopFrame> frames_;
    std::vector<Vec2> positions_;
    std::vector<double> jacobian_;
    std::vector<double> tangential_;
    double kappa0_ = 1.0;
    double clearance_ = 0.0;
    double max_curvature_ = 0.0;
    double area_ = 0.0;
};

/// Minimum domain-boundary distance over the closed strip of half-width delta.
double strip_clearance(const CircleDomain& domain, const SmoothLoop& loop, double delta);

/// Largest delta accepted by build_fermi_strip for this loop.
double max_admissible_delta(const CircleDomain& domain, const SmoothLoop& loop);

FermiStrip build_fermi_strip(const CircleDomain& domain, const SmoothLoop& loop, double delta, int n_tau = 256,
                             int n_u = 33);

/// Parallel curve at offset u, parametrized by the base shape parameter.
SmoothLoop parallel_curve(const FermiStrip& strip, double u);

}  // namespace kbound
