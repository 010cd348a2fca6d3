#include "kbound/loop_select.hpp"

#include <algorithm>
#include <cmath>

#include "kbound/density.hpp"
#include "kbound/error.hpp"
#include "kbound/parallel.hpp"
#include "kbound/quadrature.hpp"
#include "kbound/strip_analysis.hpp"

namespace kbound {

namespace {

constexpr int kLineOrder = 8;

struct Panel {
    double a = 0.0, b = 0.0;
    LoopFrame fa, fb, fm;
    std::vector<LoopFrame> nodes;
    std::vector<std::size_t> candidates;
};

struct Accum {
    double length = 0.0;
    double measured = 0.0;
    std::vector<double> g;
    double min_d = std::numeric_limits<double>::infinity();
};

}  // namespace

struct LineIntegrator::Impl {
    CircleDomain domain;
    SmoothLoop loop;
    PunctureSet S;
    int max_depth;
    std::vector<Panel> panels;
    const QuadratureRule& rule = gauss_legendre(kLineOrder);

    Impl(CircleDomain d, SmoothLoop l, PunctureSet s, int depth)
        : domain(std::move(d)), loop(std::move(l)), S(std::move(s)), max_depth(depth) {}

    void node(const LoopFrame& f, double weight, double u, std::span<const double> ps,
              std::span<const std::size_t> cands, Accum& acc) const {
        const Vec2 z = f.position + u * f.normal;
        const auto d = local_density(domain, S, cands, z);
        const double w = weight * f.speed * (1.0 - u * f.curvature);
        const double fz = d.upper();
        acc.length += w;
        acc.measured += w * fz;
        const double lf = std::log(fz);
        for (std::size_t k = 0; k < ps.size(); ++k) acc.g[k] += w * std::exp(ps[k] * lf);
        acc.min_d = std::min(acc.min_d, d.puncture_distance);
    }

    void panel(double a, double b, const LoopFrame& fa, const LoopFrame& fb, const LoopFrame& fm,
               const std::vector<LoopFrame>* cached, double u, std::span<const double> ps,
               std::span<const std::size_t> cands, int depth, Accum& acc) const {
        const Vec2 qa = fa.position + u * fa.normal;
        const Vec2 qb = fb.position + u * fb.normal;
        const Vec2 c = fm.position + u * fm.normal;
        const double radius = 1.1 * std::max(distance(c, qa), distance(c, qb));
        const double len = distance(qa, qb);

        std::vector<std::size_t> local;
        if (!cands.empty()) local = prune_candidates(S, cands, c, radius);
        if (!local.empty() && depth < max_depth) {
            const double clearance = nearest_among(S, local, c).distance - radius;
            if (clearance < 2.0 * len) {
                const double m = 0.5 * (a + b);
                const LoopFrame f1 = loop.frame_at_parameter(0.5 * (a + m));
                const LoopFrame f2 = loop.frame_at_parameter(0.5 * (m + b));
                panel(a, m, fa, fm, f1, nullptr, u, ps, local, depth + 1, acc);
                panel(m, b, fm, fb, f2, nullptr, u, ps, local, depth + 1, acc);
                return;
            }
        }
        const double half = 0.5 * (b - a);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const LoopFrame f = cached ? (*cached)[q] : loop.frame_at_parameter(0.5 * (a + b) + half * rule.nodes[q]);
            node(f, half * rule.weights[q], u, ps, local, acc);
        }
    }
};

LineIntegrator::LineIntegrator(const CircleDomain& domain, const SmoothLoop& loop, std::vector<double> breaks,
                               const PunctureSet& S, double u_range, int max_depth)
    : impl_(std::make_unique<Impl>(domain, loop, S, max_depth)) {
    if (breaks.size() < 2) fail(ErrorKind::invalid_argument, "line integrator needs at least one panel");
    const std::unique_ptr<PunctureIndex> index = S.empty() ? nullptr : std::make_unique<PunctureIndex>(S);
    auto& panels = impl_->panels;
    panels.resize(breaks.size() - 1);
    const auto& rule = impl_->rule;
    parallel_for(panels.size(), [&](std::size_t k) {
        Panel& P = panels[k];
        P.a = breaks[k];
        P.b = breaks[k + 1];
        P.fa = loop.frame_at_parameter(P.a);
        P.fb = loop.frame_at_parameter(P.b);
        P.fm = loop.frame_at_parameter(0.5 * (P.a + P.b));
        const double half = 0.5 * (P.b - P.a);
        P.nodes.reserve(rule.size());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            P.nodes.push_back(loop.frame_at_parameter(0.5 * (P.a + P.b) + half * rule.nodes[q]));
        }
        if (index) {
            double r = 0.0;
            for (const LoopFrame* f : {&P.fa, &P.fb}) {
                for (double s : {-u_range, u_range}) r = std::max(r, distance(P.fm.position, f->position + s * f->normal));
            }
            r = std::max(r, u_range);
            P.candidates = index->candidates(P.fm.position, 1.1 * r);
        }
    });
}

LineIntegrator::~LineIntegrator() = default;
LineIntegrator::LineIntegrator(LineIntegrator&&) noexcept = default;

LineSums LineIntegrator::integrate(double u, std::span<const double> ps) const {
    Accum acc;
    acc.g.assign(ps.size(), 0.0);
    for (const auto& P : impl_->panels) {
        std::vector<std::size_t> cands;
        if (!P.candidates.empty()) {
            const Vec2 c = P.fm.position + u * P.fm.normal;
            const double r = 1.1 * std::max(distance(c, P.fa.position + u * P.fa.normal),
                                            distance(c, P.fb.position + u * P.fb.normal));
            cands = prune_candidates(impl_->S, P.candidates, c, r);
        }
        impl_->panel(P.a, P.b, P.fa, P.fb, P.fm, &P.nodes, u, ps, cands, 0, acc);
    }
    return {acc.length, acc.measured, std::move(acc.g), acc.min_d};
}

double LineIntegrator::length(double u) const {
    const auto& rule = impl_->rule;
    double total = 0.0;
    for (const auto& P : impl_->panels) {
        const double half = 0.5 * (P.b - P.a);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            total += half * rule.weights[q] * P.nodes[q].speed * (1.0 - u * P.nodes[q].curvature);
        }
    }
    return total;
}

LineIntegrator strip_line_integrator(const FermiStrip& strip, const PunctureSet& S) {
    std::vector<double> breaks(static_cast<std::size_t>(strip.n_tau()) + 1);
    for (int i = 0; i <= strip.n_tau(); ++i) breaks[static_cast<std::size_t>(i)] = strip.t_node(i);
    return LineIntegrator(strip.domain(), strip.loop(), std::move(breaks), S, strip.delta());
}

// ---------------------------------------------------------------------------

std::vector<double> selection_grid(double delta, int n) {
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) u[static_cast<std::size_t>(i - 1)] = -delta + 2.0 * delta * i / (n + 1);
    if (n % 2 == 1) u[static_cast<std::size_t>(n / 2)] = 0.0;
    return u;
}

std::vector<double> puncture_offsets(const FermiStrip& strip, const PunctureSet& S) {
    std::vector<std::optional<FermiCoordinates>> located(S.size());
    parallel_for(S.size(), [&](std::size_t i) { located[i] = strip.locate(S[i]); });
    std::vector<double> out;
    for (const auto& c : located) {
        if (c) out.push_back(c->u);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_excluded(double u, std::span<const double> offsets, double tolerance) {
    return std::any_of(offsets.begin(), offsets.end(), [&](double o) { return std::abs(u - o) < tolerance; });
}

double g_of_u(const FermiStrip& strip, const PunctureSet& S, double p, double u) {
    if (!(std::abs(u) < strip.delta())) fail(ErrorKind::invalid_argument, "offset must satisfy |u| < delta");
    const auto offsets = puncture_offsets(strip, S);
    if (is_excluded(u, offsets, strip.delta() / (4.0 * kDefaultSelectionGrid))) fail(ErrorKind::excluded, "excluded u");
    const double ps[] = {p};
    return strip_line_integrator(strip, S).integrate(u, ps).g.front();
}

double p_schedule(std::size_t s) {
    if (s == 0) return 1.5;
    return 2.0 - 1.0 / std::log(static_cast<double>(s) + 2.0);
}

double holder_prefactor(double kappa0, double A, double delta, double L0, double p) {
    const double q_inv = 1.0 - 1.0 / p;
    return std::pow(kappa0 * A / (2.0 * delta), 1.0 / p) * std::pow(L0, q_inv);
}

double holder_length_bound(const FermiStrip& strip, const PunctureSet& S, double p, double u0) {
    if (!(p >= 1.0)) fail(ErrorKind::invalid_argument, "exponent must be >= 1");
    if (!(std::abs(u0) < strip.delta())) fail(ErrorKind::invalid_argument, "offset must satisfy |u| < delta");
    const auto offsets = puncture_offsets(strip, S);
    if (is_excluded(u0, offsets, strip.delta() / (4.0 * kDefaultSelectionGrid))) fail(ErrorKind::excluded, "excluded u");
    const double ps[] = {p};
    const auto sums = strip_line_integrator(strip, S).integrate(u0, ps);
    if (p == 1.0) return sums.g.front();
    return std::pow(sums.g.front(), 1.0 / p) * std::pow(sums.length, 1.0 - 1.0 / p);
}

double measured_upper_length(const SmoothLoop& curve, const CircleDomain& domain, const PunctureSet& S) {
    constexpr int panels = 256;
    std::vector<double> breaks(panels + 1);
    const double t0 = curve.base_parameter();
    const double period = curve.shape().period();
    for (int i = 0; i <= panels; ++i) breaks[static_cast<std::size_t>(i)] = t0 + period * i / panels;
    for (const auto& z : curve.sample_parameter(panels)) {
        if (!domain.contains(z)) fail(ErrorKind::invalid_argument, "curve leaves the domain");
    }
    const LineIntegrator line(domain, curve, std::move(breaks), S, 0.0);
    const auto sums = line.integrate(0.0, {});
    if (!(sums.min_puncture_distance > 0.0)) fail(ErrorKind::excluded, "curve hits a puncture");
    return sums.measured;
}

// ---------------------------------------------------------------------------

namespace {

struct GridEval {
    double u = 0.0;
    LineSums sums;
};

// Evaluates every family on the admissible part of the grid; refines the grid
// once by 4x when nothing is admissible.
std::vector<std::vector<GridEval>> evaluate_grid(std::span<const LineIntegrator> families, double delta,
                                                 std::span<const double> offsets, double p, int grid, int& used_grid,
                                                 int& excluded) {
    const double ps[] = {p};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const int n = attempt == 0 ? grid : 4 * grid;
        const double tol = delta / (4.0 * n);
        std::vector<double> admissible;
        for (double u : selection_grid(delta, n)) {
            if (!is_excluded(u, offsets, tol)) admissible.push_back(u);
        }
        if (admissible.empty()) continue;
        used_grid = n;
        excluded = n - static_cast<int>(admissible.size());
        std::vector<std::vector<GridEval>> out(families.size(), std::vector<GridEval>(admissible.size()));
        parallel_for(admissible.size() * families.size(), [&](std::size_t k) {
            const std::size_t j = k / admissible.size();
            const std::size_t i = k % admissible.size();
            out[j][i] = {admissible[i], families[j].integrate(admissible[i], ps)};
        });
        return out;
    }
    fail(ErrorKind::excluded, "every offset of the selection grid is excluded, also after refinement");
}

SelectionResult fill_result(const FermiStrip& strip, const PunctureSet& S, double p, double A,
                            const LineIntegrator& family, std::span<const GridEval> evals, std::size_t chosen,
                            bool winding, int grid, int excluded) {
    SelectionResult r;
    r.p = p;
    r.s = S.size();
    r.grid_size = grid;
    r.excluded = excluded;
    r.constant_A = A;
    r.kappa0 = strip.kappa0();
    const double delta = strip.delta();
    const double s1 = static_cast<double>(S.size()) + 1.0;
    r.M_threshold = r.kappa0 * A * s1 / (2.0 * delta * (2.0 - p));
    r.L0 = std::max(family.length(delta), family.length(-delta));
    r.holder_bound = holder_prefactor(r.kappa0, A, delta, r.L0, p) * std::pow(s1 / (2.0 - p), 1.0 / p);

    const auto& e = evals[chosen];
    r.u0 = e.u;
    r.g_at_u0 = e.sums.g.front();
    r.measured_upper_length = e.sums.measured;
    r.length_u0 = e.sums.length;
    r.clearance = e.sums.min_puncture_distance;

    std::vector<double> gs(evals.size());
    for (std::size_t i = 0; i < evals.size(); ++i) gs[i] = evals[i].sums.g.front();
    r.g_average = pairwise_sum(gs) / static_cast<double>(gs.size());

    std::size_t best = 0;
    for (std::size_t i = 1; i < evals.size(); ++i) {
        if (evals[i].sums.measured < evals[best].sums.measured) best = i;
    }
    r.upper_estimate = evals[best].sums.measured;
    r.u_best = evals[best].u;
    if (winding) r.winding = winding_vector(strip.domain(), parallel_curve(strip, r.u0));
    return r;
}

std::size_t argmin_g(std::span<const double> g) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (g[i] < g[best]) best = i;  // grid ascends in u, so ties keep the smaller u
    }
    return best;
}

}  // namespace

SelectionResult select_u0(const FermiStrip& strip, const PunctureSet& S, double p, const SelectOptions& options) {
    if (!(p > 1.0 && p < 2.0)) fail(ErrorKind::invalid_argument, "selection exponent must lie in (1, 2)");
    if (options.grid < 1) fail(ErrorKind::invalid_argument, "selection grid must be nonempty");
    const double A = options.constant_A > 0.0 ? options.constant_A : lemma_constant_A(strip.domain(), strip);
    std::vector<LineIntegrator> family;
    family.push_back(strip_line_integrator(strip, S));
    const auto offsets = puncture_offsets(strip, S);
    int grid = 0, excluded = 0;
    const auto evals = evaluate_grid(family, strip.delta(), offsets, p, options.grid, grid, excluded);
    std::vector<double> g(evals[0].size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = evals[0][i].sums.g.front();
    return fill_result(strip, S, p, A, family[0], evals[0], argmin_g(g), options.winding, grid, excluded);
}

CommonBaseResult common_base_select(std::span<const FermiStrip> strips, const PunctureSet& S, double p,
                                    const SelectOptions& options) {
    if (strips.empty()) fail(ErrorKind::invalid_argument, "common base selection needs at least one strip");
    if (!(p > 1.0 && p < 2.0)) fail(ErrorKind::invalid_argument, "selection exponent must lie in (1, 2)");
    const double delta = strips[0].delta();
    const Vec2 b0 = strips[0].loop().base_point();
    const Vec2 w0 = strips[0].loop().base_tangent();
    for (const auto& st : strips) {
        if (st.delta() != delta) fail(ErrorKind::invalid_argument, "strips must share the half-width delta");
        if (distance(st.loop().base_point(), b0) > 1e-12 * std::max(1.0, norm(b0))) {
            fail(ErrorKind::invalid_argument, "loops must share the base point");
        }
        if (distance(st.loop().base_tangent(), w0) > 1e-9) fail(ErrorKind::invalid_argument, "loops must share the base tangent");
    }

    std::vector<LineIntegrator> families;
    std::vector<double> offsets;
    std::vector<double> A(strips.size());
    for (std::size_t j = 0; j < strips.size(); ++j) {
        families.push_back(strip_line_integrator(strips[j], S));
        const auto o = puncture_offsets(strips[j], S);
        offsets.insert(offsets.end(), o.begin(), o.end());
        A[j] = options.constant_A > 0.0 ? options.constant_A : lemma_constant_A(strips[j].domain(), strips[j]);
    }
    std::sort(offsets.begin(), offsets.end());

    int grid = 0, excluded = 0;
    const auto evals = evaluate_grid(families, delta, offsets, p, options.grid, grid, excluded);
    std::vector<double> g(evals[0].size(), 0.0);
    std::vector<double> terms(strips.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < strips.size(); ++j) terms[j] = evals[j][i].sums.g.front();
        g[i] = pairwise_sum(terms);
    }
    const std::size_t chosen = argmin_g(g);

    CommonBaseResult out;
    out.u0 = evals[0][chosen].u;
    out.g_sum = g[chosen];
    for (std::size_t j = 0; j < strips.size(); ++j) {
        out.generators.push_back(
            fill_result(strips[j], S, p, A[j], families[j], evals[j], chosen, options.winding, grid, excluded));
        out.M_sum += out.generators.back().M_threshold;
        out.base_points.push_back(parallel_curve(strips[j], out.u0).base_point());
    }
    for (const auto& r : out.generators) {
        out.summed_holder_bounds.push_back(std::pow(out.M_sum, 1.0 / p) * std::pow(r.L0, 1.0 - 1.0 / p));
    }
    return out;
}

}  // namespace kbound
