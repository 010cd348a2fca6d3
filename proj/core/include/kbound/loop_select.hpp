#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kbound/domain.hpp"
#include "kbound/fermi.hpp"
#include "kbound/loop.hpp"

namespace kbound {

/// Line integrals of the upper density along one line of the parallel family.
struct LineSums {
    double length = 0.0;    // rho-length of the curve
    double measured = 0.0;  // integral of upper_density, a certified length bound
    std::vector<double> g;  // integral of upper_density^p per requested p
    double min_puncture_distance = 0.0;
};

/// Panel-wise adaptive Gauss-Legendre along z(t) + u eta(t), graded toward
/// nearby punctures. Frames at the base panel nodes are cached, so evaluating
/// many offsets u of the same loop costs one density evaluation per node.
class LineIntegrator {
public:
    /// `breaks` are increasing shape parameters covering one period; offsets
    /// |u| <= u_range are supported.
    LineIntegrator(const CircleDomain& domain, const SmoothLoop& loop, std::vector<double> breaks,
                   const PunctureSet& S, double u_range, int max_depth = 30);
    ~LineIntegrator();
    LineIntegrator(LineIntegrator&&) noexcept;

    LineSums integrate(double u, std::span<const double> ps) const;
    /// rho-length of the offset curve only.
    double length(double u) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LineIntegrator strip_line_integrator(const FermiStrip& strip, const PunctureSet& S);

/// Default number of offsets in the selection grid.
inline constexpr int kDefaultSelectionGrid = 257;

/// u-grid -delta + 2 delta i / (n + 1), i = 1..n.
std::vector<double> selection_grid(double delta, int n);

/// Offsets u_p of the punctures inside the strip.
std::vector<double> puncture_offsets(const FermiStrip& strip, const PunctureSet& S);

/// True when |u - u_p| < tolerance for some located puncture offset.
bool is_excluded(double u, std::span<const double> offsets, double tolerance);

double g_of_u(const FermiStrip& strip, const PunctureSet& S, double p, double u);

double p_schedule(std::size_t s);

struct SelectionResult {
    double p = 1.5;
    std::size_t s = 0;
    double u0 = 0.0;
    double g_at_u0 = 0.0;
    double g_average = 0.0;  // mean of g over the admissible grid
    double M_threshold = 0.0;
    double holder_bound = 0.0;
    double measured_upper_length = 0.0;  // of gamma_{u0}
    double length_u0 = 0.0;              // rho-length of gamma_{u0}
    double clearance = 0.0;
    std::vector<int> winding;
    double constant_A = 0.0;
    double kappa0 = 1.0;
    double L0 = 0.0;
    double upper_estimate = 0.0;  // min of measured_upper_length over the admissible grid
    double u_best = 0.0;          // where that minimum is attained
    int grid_size = 0;
    int excluded = 0;
};

struct SelectOptions {
    int grid = kDefaultSelectionGrid;
    bool winding = true;
    /// Lemma constant; computed from the strip when <= 0.
    double constant_A = 0.0;
};

SelectionResult select_u0(const FermiStrip& strip, const PunctureSet& S, double p, const SelectOptions& options = {});

/// g(u0)^(1/p) * l(gamma_{u0})^(1/q); p == 1 gives g(u0).
double holder_length_bound(const FermiStrip& strip, const PunctureSet& S, double p, double u0);

/// (kappa0 A / 2 delta)^(1/p) * L0^(1/q).
double holder_prefactor(double kappa0, double A, double delta, double L0, double p);

/// Integral of upper_density along the curve.
double measured_upper_length(const SmoothLoop& curve, const CircleDomain& domain, const PunctureSet& S);

struct CommonBaseResult {
    double u0 = 0.0;
    double g_sum = 0.0;
    double M_sum = 0.0;
    std::vector<SelectionResult> generators;
    std::vector<Vec2> base_points;              // base point of each output loop
    std::vector<double> summed_holder_bounds;   // M_sum^(1/p) * L0_j^(1/q)
};

CommonBaseResult common_base_select(std::span<const FermiStrip> strips, const PunctureSet& S, double p,
                                    const SelectOptions& options = {});

}  // namespace kbound
