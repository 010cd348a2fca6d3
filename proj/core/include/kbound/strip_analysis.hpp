#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "kbound/domain.hpp"
#include "kbound/fermi.hpp"

namespace kbound {

/// Nearest-puncture index per strip grid node (row-major, tau major).
struct VoronoiAssignment {
    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    int n_tau = 0;
    int n_u = 0;
    std::vector<std::size_t> cell_index;
    std::size_t tie_breaks = 0;

    std::size_t at(int i, int j) const { return cell_index[static_cast<std::size_t>(i) * n_u + j]; }
};

VoronoiAssignment voronoi_assign(const FermiStrip& strip, const PunctureSet& S);

/// Cell areas from the node lattice (trapezoid in u, periodic rectangle rule in tau).
/// Entry s collects nodes without a cell (empty S).
std::vector<double> voronoi_cell_areas(const FermiStrip& strip, const VoronoiAssignment& cells, std::size_t s);

struct LpIntegral {
    double p = 1.0;
    double total = 0.0;
    std::vector<double> per_cell;  // contribution of each Voronoi cell; empty when S is empty
};

struct LpOptions {
    int max_depth = 10;  // subdivision levels below a grid cell
    int order = 4;       // Gauss-Legendre points per direction
};

struct LpStats {
    std::size_t leaf_cells = 0;
    std::size_t floor_cells = 0;
    std::size_t density_evaluations = 0;
};

/// Integral of upper_density^p over the strip for several exponents at once.
std::vector<LpIntegral> lp_strip_integrals(const FermiStrip& strip, const PunctureSet& S, std::span<const double> ps,
                                           const LpOptions& options = {}, LpStats* stats = nullptr);
double lp_strip_integral(const FermiStrip& strip, const PunctureSet& S, double p, const LpOptions& options = {});

/// Plain tensor Gauss-Legendre quadrature of a smooth integrand against J dtau du.
double strip_quadrature(const FermiStrip& strip, const std::function<double(Vec2)>& f, int order = 4);

/// Integral of |z - P|^(-p) over the straight-edged polygon `vertices`, by a
/// signed fan of triangles with apex P.
double polygon_power_integral(Vec2 P, std::span<const Vec2> vertices, double p);

struct LemmaConstants {
    double c1 = 2.0;
    double c2 = 0.0;  // pi
    double D = 0.0;
    double area = 0.0;
    double M = 0.0;
    double c3 = 0.0;
    double A = 0.0;
};

LemmaConstants lemma_constants(const CircleDomain& domain, const FermiStrip& strip);
double lemma_constant_A(const CircleDomain& domain, const FermiStrip& strip);
/// The same formulas with explicit inputs.
LemmaConstants lemma_constants_from(double D, double area, double M);

struct LpBoundReport {
    double p = 1.0;
    std::size_t s = 0;
    double integral = 0.0;
    double constant_A = 0.0;
    double certified_bound = 0.0;
    bool satisfied = false;
};

std::vector<LpBoundReport> lp_bound_reports(const CircleDomain& domain, const FermiStrip& strip, const PunctureSet& S,
                                            std::span<const double> ps, const LpOptions& options = {});

/// Region given by a membership test, contained in the disk of `radius` about the oracle center.
struct Region {
    std::function<bool(Vec2)> contains;
    double radius = 0.0;
};

struct LayerCakeOptions {
    int angles = 1024;
    int radial_intervals = 256;
    int max_bisections = 6;
    double fraction_tolerance = 1.0 / 64.0;
    double inner_radius = 1e-6;  // relative to region.radius; below it the angular fraction is frozen
};

/// p * int_0^inf Area(region cap disk(center, r)) r^(-p-1) dr, with areas from angular sampling.
double layer_cake_oracle(Vec2 center, const Region& region, double p, const LayerCakeOptions& options = {});

Region disk_region(Vec2 center, double radius);
Region annulus_region(Vec2 center, double inner, double outer);
/// The closed strip, bounded relative to `center`.
Region strip_region(const FermiStrip& strip, Vec2 center);
/// Voronoi cell j of S inside the strip.
Region voronoi_cell_region(const FermiStrip& strip, const PunctureSet& S, std::size_t j);

}  // namespace kbound
