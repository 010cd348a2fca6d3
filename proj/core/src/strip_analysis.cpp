#include "kbound/strip_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "kbound/density.hpp"
#include "kbound/error.hpp"
#include "kbound/parallel.hpp"
#include "kbound/quadrature.hpp"

namespace kbound {

VoronoiAssignment voronoi_assign(const FermiStrip& strip, const PunctureSet& S) {
    VoronoiAssignment out;
    out.n_tau = strip.n_tau();
    out.n_u = strip.n_u();
    const std::size_t nodes = static_cast<std::size_t>(out.n_tau) * out.n_u;
    out.cell_index.assign(nodes, VoronoiAssignment::none);
    if (S.empty()) return out;

    const PunctureIndex index(S);
    std::vector<std::size_t> ties(static_cast<std::size_t>(out.n_tau), 0);
    parallel_for(static_cast<std::size_t>(out.n_tau), [&](std::size_t i) {
        for (int j = 0; j < out.n_u; ++j) {
            const Vec2 z = strip.position(static_cast<int>(i), j);
            const auto n = index.nearest(z);
            out.cell_index[i * out.n_u + j] = n.index;
            if (index.within(z, n.distance).size() > 1) {
                std::size_t equal = 0;
                for (auto k : index.within(z, n.distance)) equal += distance(z, S[k]) == n.distance;
                if (equal > 1) ++ties[i];
            }
        }
    });
    for (auto t : ties) out.tie_breaks += t;
    return out;
}

std::vector<double> voronoi_cell_areas(const FermiStrip& strip, const VoronoiAssignment& cells, std::size_t s) {
    std::vector<double> area(s + 1, 0.0);
    const double du = 2.0 * strip.delta() / (strip.n_u() - 1);
    const double dtau = strip.loop().length() / strip.n_tau();
    for (int i = 0; i < strip.n_tau(); ++i) {
        for (int j = 0; j < strip.n_u(); ++j) {
            const double w = (j == 0 || j == strip.n_u() - 1) ? 0.5 : 1.0;
            const auto c = cells.at(i, j);
            area[c == VoronoiAssignment::none ? s : c] += w * du * dtau * strip.jacobian(i, j);
        }
    }
    return area;
}

// ---------------------------------------------------------------------------

double polygon_power_integral(Vec2 P, std::span<const Vec2> vertices, double p) {
    const auto& rule = gauss_legendre(8);
    const double e = 2.0 - p;
    double total = 0.0;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const Vec2 a = vertices[k] - P;
        const Vec2 b = vertices[(k + 1) % vertices.size()] - P;
        const Vec2 edge = b - a;
        const double len = norm(edge);
        if (len == 0.0) continue;
        // foot direction n from P to the edge line, oriented so that <n, a> > 0
        Vec2 n = rot90(edge) * (1.0 / len);
        double h = dot(n, a);
        if (h < 0.0) {
            n = -1.0 * n;
            h = -h;
        }
        if (h <= 1e-13 * std::max(norm(a), norm(b))) continue;  // apex on the edge line
        const double psi_a = std::atan2(cross(n, a), h);
        const double psi_b = std::atan2(cross(n, b), h);
        const double mid = 0.5 * (psi_a + psi_b);
        const double half = 0.5 * (psi_b - psi_a);
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double psi = mid + half * rule.nodes[q];
            acc += rule.weights[q] * std::pow(h / std::cos(psi), e);
        }
        total += half * acc / e;
    }
    return total;
}

namespace {

struct CellFrame {
    Vec2 position;
    Vec2 normal;
};

CellFrame cell_frame(const SmoothLoop& loop, double t) {
    const auto f = loop.frame_at_parameter(t);
    return {f.position, f.normal};
}

// Integrates upper_density^p over one grid cell and its refinements. The
// accumulator is indexed by position in the top-level candidate list.
class CellIntegrator {
public:
    CellIntegrator(const FermiStrip& strip, const PunctureSet& S, std::span<const double> ps, const LpOptions& options)
        : strip_(strip), S_(S), ps_(ps), opt_(options), rule_(gauss_legendre(options.order)) {}

    void run(double t0, double t1, double u0, double u1, const CellFrame& f0, const CellFrame& f1,
             std::span<const std::size_t> top, std::span<const std::size_t> cands, int depth, std::vector<double>& acc,
             LpStats& stats) const {
        const double tm = 0.5 * (t0 + t1);
        const double um = 0.5 * (u0 + u1);
        const CellFrame fm = cell_frame(strip_.loop(), tm);
        const Vec2 q00 = f0.position + u0 * f0.normal;
        const Vec2 q10 = f1.position + u0 * f1.normal;
        const Vec2 q11 = f1.position + u1 * f1.normal;
        const Vec2 q01 = f0.position + u1 * f0.normal;
        const Vec2 c = fm.position + um * fm.normal;
        double radius = std::max({distance(c, q00), distance(c, q10), distance(c, q11), distance(c, q01)});
        radius *= 1.05;  // cover the curved edges
        const double diag = std::max(distance(q00, q11), distance(q10, q01));

        std::vector<std::size_t> local;
        if (!cands.empty()) local = prune_candidates(S_, cands, c, radius);
        bool refine = false;
        if (!local.empty()) {
            const double clearance = nearest_among(S_, local, c).distance - radius;
            refine = clearance < 2.0 * diag;
        }
        if (refine && depth < opt_.max_depth) {
            run(t0, tm, u0, um, f0, fm, top, local, depth + 1, acc, stats);
            run(tm, t1, u0, um, fm, f1, top, local, depth + 1, acc, stats);
            run(t0, tm, um, u1, f0, fm, top, local, depth + 1, acc, stats);
            run(tm, t1, um, u1, fm, f1, top, local, depth + 1, acc, stats);
            return;
        }
        if (refine && floor_cell({q00, q10, q11, q01}, top, local, acc)) {
            ++stats.floor_cells;
            return;
        }
        ++stats.leaf_cells;
        gauss_cell(t0, t1, u0, u1, top, local, acc, stats);
    }

private:
    std::size_t slot(std::span<const std::size_t> top, std::size_t index) const {
        return static_cast<std::size_t>(std::lower_bound(top.begin(), top.end(), index) - top.begin());
    }

    void add(std::vector<double>& acc, std::span<const std::size_t> top, std::size_t nearest, double f,
             double w) const {
        const std::size_t np = ps_.size();
        const std::size_t base = (nearest < S_.size() ? slot(top, nearest) : top.size()) * np;
        const double lf = std::log(f);
        for (std::size_t k = 0; k < np; ++k) acc[base + k] += w * std::exp(ps_[k] * lf);
    }

    void gauss_cell(double t0, double t1, double u0, double u1, std::span<const std::size_t> top,
                    std::span<const std::size_t> cands, std::vector<double>& acc, LpStats& stats) const {
        const double ht = 0.5 * (t1 - t0);
        const double hu = 0.5 * (u1 - u0);
        for (std::size_t a = 0; a < rule_.size(); ++a) {
            const double t = 0.5 * (t0 + t1) + ht * rule_.nodes[a];
            const auto f = strip_.loop().frame_at_parameter(t);
            for (std::size_t b = 0; b < rule_.size(); ++b) {
                const double u = 0.5 * (u0 + u1) + hu * rule_.nodes[b];
                const Vec2 z = f.position + u * f.normal;
                const auto d = local_density(strip_.domain(), S_, cands, z);
                const double w = rule_.weights[a] * rule_.weights[b] * ht * hu * f.speed * (1.0 - u * f.curvature);
                add(acc, top, d.nearest, d.upper(), w);
                ++stats.density_evaluations;
            }
        }
    }

    // Exact integral of (2/|z - p|)^p over the corner polygon when one puncture
    // governs the whole cell; returns false to fall back to Gauss-Legendre.
    bool floor_cell(const std::array<Vec2, 4>& q, std::span<const std::size_t> top, std::span<const std::size_t> cands,
                    std::vector<double>& acc) const {
        std::size_t owner = S_.size();
        for (const auto& z : q) {
            const auto d = local_density(strip_.domain(), S_, cands, z);
            if (d.puncture_distance >= d.boundary_distance) return false;
            if (owner == S_.size()) owner = d.nearest;
            if (d.nearest != owner) return false;
        }
        const std::size_t base = slot(top, owner) * ps_.size();
        for (std::size_t k = 0; k < ps_.size(); ++k) {
            acc[base + k] += std::pow(2.0, ps_[k]) * polygon_power_integral(S_[owner], q, ps_[k]);
        }
        return true;
    }

    const FermiStrip& strip_;
    const PunctureSet& S_;
    std::span<const double> ps_;
    LpOptions opt_;
    const QuadratureRule& rule_;
};

}  // namespace

std::vector<LpIntegral> lp_strip_integrals(const FermiStrip& strip, const PunctureSet& S, std::span<const double> ps,
                                           const LpOptions& options, LpStats* stats) {
    for (double p : ps) {
        if (!(p < 2.0)) fail(ErrorKind::invalid_argument, "exponent must be < 2");
        if (!(p >= 1.0)) fail(ErrorKind::invalid_argument, "exponent must be >= 1");
    }
    if (options.max_depth < 0) fail(ErrorKind::invalid_argument, "max_depth must be nonnegative");
    const std::size_t np = ps.size();
    const int n_tau = strip.n_tau();
    const int n_u = strip.n_u();
    const std::unique_ptr<PunctureIndex> index = S.empty() ? nullptr : std::make_unique<PunctureIndex>(S);
    const CellIntegrator integrator(strip, S, ps, options);

    struct Row {
        std::vector<double> totals;
        std::vector<std::pair<std::size_t, std::vector<double>>> cells;
        LpStats stats;
    };
    std::vector<Row> rows(static_cast<std::size_t>(n_tau));

    parallel_for(static_cast<std::size_t>(n_tau), [&](std::size_t i) {
        Row& row = rows[i];
        row.totals.assign(np, 0.0);
        const double t0 = strip.t_node(static_cast<int>(i));
        const double t1 = strip.t_node(static_cast<int>(i) + 1);
        const CellFrame f0 = cell_frame(strip.loop(), t0);
        const CellFrame f1 = cell_frame(strip.loop(), t1);
        for (int j = 0; j + 1 < n_u; ++j) {
            const double u0 = strip.u_node(j);
            const double u1 = strip.u_node(j + 1);
            std::vector<std::size_t> top;
            if (index) {
                const Vec2 c = strip.map(0.5 * (t0 + t1), 0.5 * (u0 + u1));
                double r = 0.0;
                for (const Vec2 q : {f0.position + u0 * f0.normal, f1.position + u0 * f1.normal,
                                     f1.position + u1 * f1.normal, f0.position + u1 * f0.normal}) {
                    r = std::max(r, distance(c, q));
                }
                top = index->candidates(c, 1.05 * r);
            }
            std::vector<double> acc((top.size() + 1) * np, 0.0);
            integrator.run(t0, t1, u0, u1, f0, f1, top, top, 0, acc, row.stats);
            for (std::size_t m = 0; m <= top.size(); ++m) {
                bool any = false;
                for (std::size_t k = 0; k < np; ++k) {
                    row.totals[k] += acc[m * np + k];
                    any = any || acc[m * np + k] != 0.0;
                }
                if (any && m < top.size()) {
                    row.cells.emplace_back(top[m], std::vector<double>(acc.begin() + m * np, acc.begin() + (m + 1) * np));
                }
            }
        }
    });

    std::vector<LpIntegral> out(np);
    std::vector<double> column(static_cast<std::size_t>(n_tau));
    for (std::size_t k = 0; k < np; ++k) {
        out[k].p = ps[k];
        for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i].totals[k];
        out[k].total = pairwise_sum(column);
        if (!S.empty()) out[k].per_cell.assign(S.size(), 0.0);
    }
    LpStats total_stats;
    for (const auto& row : rows) {
        for (const auto& [cell, values] : row.cells) {
            for (std::size_t k = 0; k < np; ++k) out[k].per_cell[cell] += values[k];
        }
        total_stats.leaf_cells += row.stats.leaf_cells;
        total_stats.floor_cells += row.stats.floor_cells;
        total_stats.density_evaluations += row.stats.density_evaluations;
    }
    if (stats) *stats = total_stats;
    return out;
}

double lp_strip_integral(const FermiStrip& strip, const PunctureSet& S, double p, const LpOptions& options) {
    const double ps[] = {p};
    return lp_strip_integrals(strip, S, ps, options).front().total;
}

double strip_quadrature(const FermiStrip& strip, const std::function<double(Vec2)>& f, int order) {
    const auto& rule = gauss_legendre(order);
    std::vector<double> rows(static_cast<std::size_t>(strip.n_tau()));
    parallel_for(rows.size(), [&](std::size_t i) {
        const double t0 = strip.t_node(static_cast<int>(i));
        const double t1 = strip.t_node(static_cast<int>(i) + 1);
        const double ht = 0.5 * (t1 - t0);
        double acc = 0.0;
        for (int j = 0; j + 1 < strip.n_u(); ++j) {
            const double u0 = strip.u_node(j);
            const double u1 = strip.u_node(j + 1);
            const double hu = 0.5 * (u1 - u0);
            for (std::size_t a = 0; a < rule.size(); ++a) {
                const auto fr = strip.loop().frame_at_parameter(0.5 * (t0 + t1) + ht * rule.nodes[a]);
                for (std::size_t b = 0; b < rule.size(); ++b) {
                    const double u = 0.5 * (u0 + u1) + hu * rule.nodes[b];
                    acc += rule.weights[a] * rule.weights[b] * ht * hu * fr.speed * (1.0 - u * fr.curvature) *
                           f(fr.position + u * fr.normal);
                }
            }
        }
        rows[i] = acc;
    });
    return pairwise_sum(rows);
}

// ---------------------------------------------------------------------------

LemmaConstants lemma_constants_from(double D, double area, double M) {
    LemmaConstants k;
    k.c2 = M_PI;
    k.D = D;
    k.area = area;
    k.M = M;
    const double c1 = k.c1;
    k.c3 = std::max(2.0 * std::max(1.0, c1 * c1) * k.c2 * std::max(1.0, D),
                    2.0 * std::max(c1 / D, c1 * c1 / (D * D)) * area);
    k.A = std::max(2.0 * k.c3, std::max(1.0, M * M) * area);
    return k;
}

LemmaConstants lemma_constants(const CircleDomain& domain, const FermiStrip& strip) {
    const double D = strip.clearance();
    double M = 2.0 / D;
    for (int i = 0; i < strip.n_tau(); ++i) {
        for (int j = 0; j < strip.n_u(); ++j) M = std::max(M, 2.0 / domain.dist_to_boundary(strip.position(i, j)));
    }
    return lemma_constants_from(D, strip.area(), M);
}

double lemma_constant_A(const CircleDomain& domain, const FermiStrip& strip) { return lemma_constants(domain, strip).A; }

std::vector<LpBoundReport> lp_bound_reports(const CircleDomain& domain, const FermiStrip& strip, const PunctureSet& S,
                                            std::span<const double> ps, const LpOptions& options) {
    const double A = lemma_constant_A(domain, strip);
    const auto integrals = lp_strip_integrals(strip, S, ps, options);
    std::vector<LpBoundReport> out;
    for (const auto& I : integrals) {
        LpBoundReport r;
        r.p = I.p;
        r.s = S.size();
        r.integral = I.total;
        r.constant_A = A;
        r.certified_bound = A * (static_cast<double>(S.size()) + 1.0) / (2.0 - I.p);
        r.satisfied = r.integral <= r.certified_bound;
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------

double layer_cake_oracle(Vec2 center, const Region& region, double p, const LayerCakeOptions& opt) {
    if (!(p < 2.0)) fail(ErrorKind::invalid_argument, "exponent must be < 2");
    if (!(region.radius > 0.0)) fail(ErrorKind::invalid_argument, "region radius must be positive");
    const int K = opt.angles;
    std::vector<Vec2> dirs(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double th = 2.0 * M_PI * (k + 0.5) / K;
        dirs[static_cast<std::size_t>(k)] = {std::cos(th), std::sin(th)};
    }
    auto fraction = [&](double rho) {
        int in = 0;
        for (const Vec2& d : dirs) in += region.contains(center + rho * d);
        return static_cast<double>(in) / K;
    };

    const double R = region.radius;
    const double r0 = R * opt.inner_radius;
    const double e = 2.0 - p;

    // geometric base partition of [r0, R], bisected where the fraction jumps
    std::vector<double> breaks;
    const int N = opt.radial_intervals;
    std::vector<double> nodes(static_cast<std::size_t>(N) + 1);
    std::vector<double> fr(nodes.size());
    for (int k = 0; k <= N; ++k) nodes[static_cast<std::size_t>(k)] = r0 * std::pow(R / r0, static_cast<double>(k) / N);
    nodes.back() = R;
    parallel_for(nodes.size(), [&](std::size_t k) { fr[k] = fraction(nodes[k]); });

    std::function<void(double, double, double, double, int)> split = [&](double a, double b, double fa, double fb,
                                                                          int depth) {
        if (depth < opt.max_bisections && std::abs(fa - fb) > opt.fraction_tolerance) {
            const double m = 0.5 * (a + b);
            const double fm = fraction(m);
            split(a, m, fa, fm, depth + 1);
            split(m, b, fm, fb, depth + 1);
            return;
        }
        breaks.push_back(b);
    };
    breaks.push_back(r0);
    for (int k = 0; k < N; ++k) {
        const auto i = static_cast<std::size_t>(k);
        split(nodes[i], nodes[i + 1], fr[i], fr[i + 1], 0);
    }

    std::vector<double> mids(breaks.size() - 1);
    parallel_for(mids.size(), [&](std::size_t k) { mids[k] = fraction(0.5 * (breaks[k] + breaks[k + 1])); });

    const double f0 = fraction(0.5 * r0);
    double area = M_PI * f0 * r0 * r0;
    std::vector<double> terms;
    terms.reserve(mids.size() + 2);
    terms.push_back(p * M_PI * f0 * std::pow(r0, e) / e);
    for (std::size_t k = 0; k < mids.size(); ++k) {
        const double a = breaks[k], b = breaks[k + 1], f = mids[k];
        terms.push_back((area - M_PI * f * a * a) * (std::pow(a, -p) - std::pow(b, -p)) +
                        p * M_PI * f * (std::pow(b, e) - std::pow(a, e)) / e);
        area += M_PI * f * (b * b - a * a);
    }
    terms.push_back(area * std::pow(R, -p));
    return pairwise_sum(terms);
}

Region disk_region(Vec2 center, double radius) {
    return {[center, radius](Vec2 z) { return norm2(z - center) < radius * radius; }, radius};
}

Region annulus_region(Vec2 center, double inner, double outer) {
    return {[center, inner, outer](Vec2 z) {
                const double m = norm2(z - center);
                return m > inner * inner && m < outer * outer;
            },
            outer};
}

Region strip_region(const FermiStrip& strip, Vec2 center) {
    double R = 0.0;
    for (int i = 0; i < strip.n_tau(); ++i) {
        for (int j = 0; j < strip.n_u(); ++j) R = std::max(R, distance(center, strip.position(i, j)));
    }
    R += strip.loop().length() / strip.n_tau();
    return {[&strip](Vec2 z) { return strip.locate(z).has_value(); }, R};
}

Region voronoi_cell_region(const FermiStrip& strip, const PunctureSet& S, std::size_t j) {
    if (j >= S.size()) fail(ErrorKind::invalid_argument, "cell index out of range");
    auto index = std::make_shared<PunctureIndex>(S);
    const Region base = strip_region(strip, S[j]);
    return {[&strip, index, j](Vec2 z) { return index->nearest(z).index == j && strip.locate(z).has_value(); },
            base.radius};
}

}  // namespace kbound
