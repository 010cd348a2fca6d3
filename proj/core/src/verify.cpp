#include "kbound/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kbound/density.hpp"
#include "kbound/fermi.hpp"
#include "kbound/loop_select.hpp"
#include "kbound/rng.hpp"
#include "kbound/scenarios.hpp"
#include "kbound/strip_analysis.hpp"

namespace kbound {

namespace {

struct Report {
    std::vector<InvariantResult> rows;

    void add(const char* module, const char* name, bool passed, double value, double limit, std::string detail = {},
             bool experiment = false) {
        InvariantResult r;
        r.module = module;
        r.name = name;
        r.experiment = experiment;
        r.passed = passed;
        r.value = value;
        r.limit = limit;
        r.detail = std::move(detail);
        rows.push_back(std::move(r));
    }
};

std::string fmt(double v) { return format_number(v); }

bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

void geometry_checks(const VerifySettings& vs, const FermiStrip& strip, Report& out) {
    double min_j = std::numeric_limits<double>::infinity();
    double worst_formula = 0.0;
    std::vector<Vec2> pos;
    pos.reserve(static_cast<std::size_t>(strip.n_tau()) * strip.n_u());
    for (int i = 0; i < strip.n_tau(); ++i) {
        const double kappa = strip.frame_node(i).curvature;
        for (int j = 0; j < strip.n_u(); ++j) {
            const double J = strip.jacobian(i, j);
            min_j = std::min(min_j, J);
            worst_formula = std::max(worst_formula, std::abs(J - (1.0 - strip.u_node(j) * kappa)));
            pos.push_back(strip.position(i, j));
        }
    }
    out.add("geometry", "jacobian_positive", min_j > 0.0 && worst_formula <= 1e-12, min_j, 0.0,
            "min J; max |J - (1 - u kappa)| = " + fmt(worst_formula));

    std::sort(pos.begin(), pos.end(), lex_less);
    const std::size_t distinct = static_cast<std::size_t>(std::distance(
        pos.begin(), std::unique(pos.begin(), pos.end())));
    const double repeated = static_cast<double>(pos.size() - distinct);
    out.add("geometry", "node_injectivity", repeated == 0.0, repeated, 0.0, "coinciding node positions");

    const double k0 = std::abs(strip.kappa0() - 1.0);
    out.add("geometry", "kappa0_flat", k0 <= 1e-12, k0, 1e-12, "|kappa0 - 1|");

    const auto w0 = winding_vector(vs.domain, vs.loop);
    std::size_t changed = 0;
    double worst_len = -std::numeric_limits<double>::infinity();
    const double total_kappa = vs.loop.total_abs_curvature();
    for (double f : {-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0}) {
        const double u = f * strip.delta();
        const auto curve = parallel_curve(strip, u);
        changed += winding_vector(vs.domain, curve) != w0;
        const double excess = std::abs(curve.length() - vs.loop.length()) - std::abs(u) * total_kappa;
        worst_len = std::max(worst_len, excess / vs.loop.length());
    }
    out.add("geometry", "parallel_winding", changed == 0, static_cast<double>(changed), 0.0,
            "offsets with a different winding vector");
    out.add("geometry", "length_continuity", worst_len <= 1e-9, worst_len, 1e-9,
            "(|l(u) - l(0)| - |u| int|kappa|) / l(0)");
}

void density_checks(const VerifySettings& vs, Report& out) {
    const ReferenceModel models[] = {ReferenceModel::disk(1.0), ReferenceModel::punctured_disk(1.0),
                                     ReferenceModel::annulus(0.2)};
    const char* names[] = {"bracket_disk", "bracket_punctured_disk", "bracket_annulus"};
    for (int m = 0; m < 3; ++m) {
        const auto& model = models[m];
        const auto dom = model.domain();
        const auto S = model.punctures();
        const double r_lo = model.kind == ReferenceModel::Kind::annulus ? model.r : 0.0;
        std::size_t violations = 0, points = 0;
        for (int a = 0; a < 32; ++a) {
            for (int b = 0; b < 32; ++b) {
                const double rho = r_lo + (model.R - r_lo) * (a + 0.5) / 32.0;
                const double th = 2.0 * M_PI * (b + 0.25) / 32.0;
                const Vec2 z{rho * std::cos(th), rho * std::sin(th)};
                const double ref = reference_density(model, z);
                const auto br = density_bracket(dom, S, z);
                violations += br.lower > ref * (1.0 + 1e-12) || ref > br.upper * (1.0 + 1e-12);
                ++points;
            }
        }
        out.add("density", names[m], violations == 0, static_cast<double>(violations), 0.0,
                std::to_string(points) + " grid points");
    }
    {
        const auto model = ReferenceModel::disk(1.0);
        const double diff = std::abs(upper_density(model.domain(), {}, {0.0, 0.0}) - reference_density(model, {0.0, 0.0}));
        out.add("density", "disk_center_exact", diff <= 1e-12, diff, 1e-12, "|upper - reference| at the center");
    }

    // S subset of S2: both estimators can only grow
    Rng rng(mix_seed(vs.seed, 0xDE45ULL));
    const auto& dom = vs.domain;
    const double R = dom.outer().radius;
    auto random_point = [&] {
        for (;;) {
            const Vec2 z{dom.outer().center.x + rng.uniform(-R, R), dom.outer().center.y + rng.uniform(-R, R)};
            if (dom.dist_to_boundary(z) > 1e-3) return z;
        }
    };
    std::vector<Vec2> pts;
    for (int k = 0; k < 12; ++k) pts.push_back(random_point());
    const PunctureSet S(pts);
    for (int k = 0; k < 12; ++k) pts.push_back(random_point());
    const PunctureSet S2(pts);
    std::size_t violations = 0;
    for (int k = 0; k < 2000; ++k) {
        const Vec2 z = random_point();
        const auto a = density_bracket(dom, S, z);
        const auto b = density_bracket(dom, S2, z);
        violations += a.upper > b.upper || a.lower > b.lower;
    }
    out.add("density", "puncture_monotonicity", violations == 0, static_cast<double>(violations), 0.0,
            "2000 points, |S| = 12, |S'| = 24");

    // ray into a puncture
    const Vec2 p = S[0];
    const Vec2 dir{std::cos(0.7), std::sin(0.7)};
    double worst_upper = 0.0;
    double min_lower = std::numeric_limits<double>::infinity();
    const PunctureSet single({p});
    for (int k = 4; k <= 12; ++k) {
        const double d = std::pow(10.0, -k);
        const Vec2 z = p + d * dir;
        const double r = distance(z, p);
        const auto br = density_bracket(dom, single, z);
        worst_upper = std::max(worst_upper, std::abs(br.upper * r - 2.0));
        min_lower = std::min(min_lower, br.lower * r * std::log(1.0 / r));
    }
    out.add("density", "blowup_rate", worst_upper <= 1e-9 && min_lower >= 0.1, min_lower, 0.1,
            "min lower*d*log(1/d) over d = 1e-4..1e-12; max |upper*d - 2| = " + fmt(worst_upper));
}

void strip_checks(const VerifySettings& vs, const FermiStrip& strip, Report& out) {
    const auto lc = lemma_constants(vs.domain, strip);
    std::size_t configs = 0, violations = 0, cell_violations = 0;
    double worst_ratio = 0.0, worst_cell = 0.0;
    for (auto st : kAllStrategies) {
        for (auto s : vs.lemma_s) {
            const auto S = place_punctures(st, s, strip, vs.seed);
            const auto lp = lp_strip_integrals(strip, S, vs.lemma_p);
            for (const auto& r : lp) {
                const double bound = lc.A * (static_cast<double>(s) + 1.0) / (2.0 - r.p);
                worst_ratio = std::max(worst_ratio, r.total / bound);
                violations += !(r.total <= bound);
                const double cell_bound = 2.0 * lc.c3 / (2.0 - r.p);
                for (double c : r.per_cell) {
                    worst_cell = std::max(worst_cell, c / cell_bound);
                    cell_violations += !(c <= cell_bound);
                }
                ++configs;
            }
        }
    }
    out.add("strip", "lemma_bound", violations == 0, worst_ratio, 1.0,
            "max integral / (A (s+1)/(2-p)) over " + std::to_string(configs) + " configurations");
    out.add("strip", "per_cell_bound", cell_violations == 0, worst_cell, 1.0, "max cell integral / (2 c3/(2-p))");

    {
        const auto lp = lp_strip_integrals(strip, PunctureSet{}, vs.lemma_p);
        const double bound = std::max(1.0, lc.M * lc.M) * lc.area;
        double worst = 0.0;
        for (const auto& r : lp) worst = std::max(worst, r.total / bound);
        out.add("strip", "s0_bound", worst <= 1.0, worst, 1.0, "max integral / (max(1,M^2) Area) with S empty");
    }

    {
        const auto S = place_punctures(Strategy::on_loop_equispaced, 50, strip, vs.seed);
        std::vector<double> ps;
        for (int k = 0; k < 12; ++k) ps.push_back(1.5 + 0.49 * k / 11.0);
        const auto lp = lp_strip_integrals(strip, S, ps);
        std::vector<double> x, y;
        for (const auto& r : lp) {
            x.push_back(1.0 / (2.0 - r.p));
            y.push_back(r.total);
        }
        const auto fit = fit_linear(x, y);
        // ||residual|| / ||y||
        double rr = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = fit.intercept + fit.slope * x[i] - y[i];
            rr += e * e;
            yy += y[i] * y[i];
        }
        const double resid = std::sqrt(rr / yy);
        out.add("strip", "divergence_fit", fit.r2 >= 0.95 && resid < 0.1 && fit.slope > 0.0, fit.r2, 0.95,
                "s = 50 on loop; relative residual " + fmt(resid) + ", b = " + fmt(fit.slope));
    }

    {
        // synthetic cells where the puncture term dominates everywhere, so the
        // integrand is exactly (2/|z - p_j|)^p on the cell
        const CircleDomain dom({{0.0, 0.0}, 10.0});
        const auto loop = make_series_loop(circle_coefficients({0.0, 0.0}, 1.0), 0.0);
        const auto small = build_fermi_strip(dom, loop, 0.1, 128, 17);
        const double ps[] = {1.0, 1.5, 1.9};
        double worst = 0.0;
        int cells = 0;
        for (int c = 0; c < 2; ++c) {
            const auto S = place_punctures(Strategy::on_strip_random, 5, small, mix_seed(vs.seed, 77 + c));
            const auto lp = lp_strip_integrals(small, S, ps);
            for (std::size_t j = 0; j < S.size(); ++j) {
                const auto region = voronoi_cell_region(small, S, j);
                const std::size_t q = (j + static_cast<std::size_t>(c)) % 3;
                const double oracle = std::pow(2.0, ps[q]) * layer_cake_oracle(S[j], region, ps[q]);
                worst = std::max(worst, std::abs(lp[q].per_cell[j] - oracle) / oracle);
                ++cells;
            }
        }
        out.add("strip", "oracle_equivalence", worst <= 0.02, worst, 0.02,
                "max relative difference over " + std::to_string(cells) + " cells");
    }
}

int rotate_index(int i, int n) { return ((i % n) + n) % n; }

void select_checks(const VerifySettings& vs, const FermiStrip& strip, Report& out) {
    const auto w0 = winding_vector(vs.domain, vs.loop);
    std::size_t unsound = 0, dominated = 0, homotopy = 0;
    double worst_g = 0.0, worst_holder = 0.0;
    SelectOptions so;
    so.grid = vs.strip.grid;
    for (int run = 0; run < vs.selection_runs; ++run) {
        const auto st = kAllStrategies[static_cast<std::size_t>(rotate_index(run, 4))];
        const std::size_t s = 3 + 11 * static_cast<std::size_t>(run);
        const auto S = place_punctures(st, s, strip, mix_seed(vs.seed, 1000 + static_cast<std::uint64_t>(run)));
        const auto r = select_u0(strip, S, p_schedule(s), so);
        worst_g = std::max(worst_g, r.g_at_u0 / r.M_threshold);
        unsound += !(r.g_at_u0 <= 1.05 * r.M_threshold && r.clearance > 0.0);
        worst_holder = std::max(worst_holder, r.measured_upper_length / r.holder_bound);
        dominated += !(r.measured_upper_length <= r.holder_bound * 1.001);
        homotopy += r.winding != w0;
    }
    const std::string runs = std::to_string(vs.selection_runs) + " seeded runs";
    out.add("loop-select", "selection_soundness", unsound == 0, worst_g, 1.05, "max g(u0)/M over " + runs);
    out.add("loop-select", "holder_domination", dominated == 0, worst_holder, 1.001,
            "max measured length / holder bound over " + runs);
    out.add("loop-select", "homotopy", homotopy == 0, static_cast<double>(homotopy), 0.0,
            "runs with a changed winding vector");

    // prefactor along the schedule from s = 1 (p(0) is a fixed choice off the
    // schedule): monotone in p, so bounded by its endpoints
    const auto lc = lemma_constants(vs.domain, strip);
    const double L0 = std::max(parallel_curve(strip, -strip.delta()).length(), parallel_curve(strip, strip.delta()).length());
    const double limit = std::sqrt(strip.kappa0() * lc.A * L0 / (2.0 * strip.delta()));
    std::vector<double> c0;
    for (double s = 1.0; s <= 1e12; s *= 2.0) {
        c0.push_back(holder_prefactor(strip.kappa0(), lc.A, strip.delta(), L0, p_schedule(static_cast<std::size_t>(s))));
    }
    const bool up = std::is_sorted(c0.begin(), c0.end());
    const bool down = std::is_sorted(c0.rbegin(), c0.rend());
    const double sup = *std::max_element(c0.begin(), c0.end());
    const double bound = std::max(c0.front(), limit);
    const double gap = std::abs(c0.back() - limit) / limit;
    out.add("loop-select", "bounded_prefactor", (up || down) && sup <= bound * (1.0 + 1e-12) && gap < 0.05, sup / bound,
            1.0, "sup C0 / max(C0(s=1), limit); relative gap to the limit at s = 2^39: " + fmt(gap));

    // common base point
    const auto loops = common_base_loops();
    std::vector<FermiStrip> strips;
    for (const auto& l : loops) strips.push_back(build_fermi_strip(two_hole_domain(), l, 0.25, 256, 17));
    std::vector<Vec2> pts;
    Rng rng(mix_seed(vs.seed, 0xC0B5ULL));
    for (int k = 0; k < 24; ++k) {
        const auto& st = strips[static_cast<std::size_t>(k % 2)];
        pts.push_back(st.map(st.loop().parameter_at(rng.uniform(0.0, st.loop().length())),
                             rng.uniform(-st.delta(), st.delta())));
    }
    const PunctureSet S(pts);
    const std::size_t s = S.size();
    const auto cb = common_base_select(strips, S, p_schedule(s), so);
    double base_gap = 0.0;
    for (const auto& b : cb.base_points) base_gap = std::max(base_gap, distance(b, cb.base_points.front()));
    double worst = 0.0;
    for (std::size_t j = 0; j < cb.generators.size(); ++j) {
        const auto h = holder_length_bound(strips[j], S, cb.generators[j].p, cb.u0);
        worst = std::max(worst, h / cb.summed_holder_bounds[j]);
    }
    out.add("loop-select", "common_base", worst <= 1.0 && base_gap <= 1e-12, worst, 1.0,
            "max holder bound / summed prediction; base point spread " + fmt(base_gap));
}

void growth_checks(const VerifySettings& vs, Report& out) {
    const std::uint64_t seeds[] = {vs.seed};
    const auto records = run_growth(vs.domain, vs.loop, kAllStrategies, vs.growth_s, seeds, vs.strip);
    std::size_t broken = 0;
    double worst_band = 0.0;
    std::string bands;
    for (auto st : kAllStrategies) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        std::vector<GrowthRecord> mine;
        for (const auto& r : records) {
            if (r.strategy != st) continue;
            broken += !(r.upper_estimate <= r.holder_bound);
            const double c = r.holder_bound / reference_curves(r.s).upper;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            mine.push_back(r);
        }
        worst_band = std::max(worst_band, hi / lo);
        if (!bands.empty()) bands += "; ";
        bands += std::string(to_string(st)) + " " + fmt(hi / lo);
        if (st == Strategy::on_loop_equispaced) {
            const auto fit = fit_exponent(mine);
            out.add("growth", "exponent_window", fit.slope >= 0.45 && fit.slope <= 0.62, fit.slope, 0.62,
                    "on_loop_equispaced slope, window [0.45, 0.62]; r2 = " + fmt(fit.r2), true);
        }
    }
    out.add("growth", "certified_chain", broken == 0, static_cast<double>(broken), 0.0,
            "records with upper_estimate > holder_bound out of " + std::to_string(records.size()));
    out.add("growth", "holder_band", worst_band <= 3.0, worst_band, 3.0, "C_max/C_min per strategy: " + bands);
}

void lattice_checks(const VerifySettings& vs, Report& out) {
    const TorusLattice lattices[] = {
        TorusLattice::standard(2),
        TorusLattice(2, {2.0, 0.5, 0.5, 1.0}, {1, 1, 0, 1}),
        TorusLattice::standard(4),
    };
    const double Hs[] = {0.0, 0.5, 1.0, 2.0, 3.5, 5.0, 10.0, 20.0, 50.0, 100.0};
    std::size_t violations = 0, non_monotone = 0, tested = 0;
    double worst = 0.0;
    for (const auto& lat : lattices) {
        std::uint64_t prev = 0;
        for (double H : Hs) {
            if (lat.rank() == 4 && H > 20.0) continue;
            const auto N = count_displacement(lat, H);
            const double m = lattice_count_bound(lat, H);
            worst = std::max(worst, static_cast<double>(N) / m);
            violations += !(static_cast<double>(N) <= m);
            non_monotone += N < prev;
            prev = N;
            ++tested;
        }
    }
    out.add("lattice", "lattice_bound", violations == 0, worst, 1.0,
            "max N / bound over " + std::to_string(tested) + " (lattice, H) pairs, margin 0.5");
    out.add("lattice", "monotonicity", non_monotone == 0, static_cast<double>(non_monotone), 0.0,
            "decreasing steps in N(H)");

    double worst_vol = 0.0;
    for (int k = 0; k < 2; ++k) {
        const auto& lat = lattices[k];
        const double vol = ellipsoid_volume(lat);
        for (double H : {50.0, 100.0, 200.0}) {
            const double ratio = static_cast<double>(count_displacement(lat, H)) / (vol * H * H);
            worst_vol = std::max(worst_vol, std::abs(ratio - 1.0));
        }
    }
    out.add("lattice", "volume_asymptotics", worst_vol <= 0.05, worst_vol, 0.05, "max |N/(vol H^2) - 1|, rank 2, H >= 50");

    std::size_t changed = 0;
    const std::vector<std::int64_t> perms2[] = {{0, 1, -1, 0}, {-1, 0, 0, 1}, {0, -1, -1, 0}};
    const std::vector<std::int64_t> perms4[] = {{0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, -1, 0, 0, 0},
                                                {-1, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1, 0}};
    for (double H : {3.0, 7.5, 12.0}) {
        const auto base2 = count_displacement(TorusLattice::standard(2), H);
        for (const auto& m : perms2) changed += count_displacement(TorusLattice(2, {1, 0, 0, 1}, m), H) != base2;
        const auto base4 = count_displacement(TorusLattice::standard(4), H);
        std::vector<double> id4(16, 0.0);
        for (int i = 0; i < 4; ++i) id4[static_cast<std::size_t>(5 * i)] = 1.0;
        for (const auto& m : perms4) changed += count_displacement(TorusLattice(4, id4, m), H) != base4;
    }
    out.add("lattice", "monodromy_invariance", changed == 0, static_cast<double>(changed), 0.0,
            "signed-permutation monodromies with a different count");

    ScheduleConstants c = vs.schedule;
    const std::size_t s_max = *std::max_element(vs.lattice_s.begin(), vs.lattice_s.end());
    if (c.c_sublinear <= 0.0) c.c_sublinear = matched_sublinear_constant(c.c_linear, s_max);
    const TorusLattice gens[] = {TorusLattice::standard(2), TorusLattice::standard(2)};
    const auto rows = halving_experiment(gens, vs.lattice_s, c);
    std::vector<double> x, yl, ys;
    for (const auto& r : rows) {
        x.push_back(static_cast<double>(r.s));
        yl.push_back(static_cast<double>(r.N_linear));
        ys.push_back(static_cast<double>(r.N_sublinear));
    }
    const auto fl = fit_loglog(x, yl);
    const auto fs = fit_loglog(x, ys);
    out.add("lattice", "halving_linear_slope", fl.slope >= 3.7 && fl.slope <= 4.3, fl.slope, 4.3,
            "window [3.7, 4.3]; c = " + fmt(c.c_linear), true);
    out.add("lattice", "halving_sublinear_slope", fs.slope >= 1.9 && fs.slope <= 2.4, fs.slope, 2.4,
            "window [1.9, 2.4]; c = " + fmt(c.c_sublinear), true);
}

}  // namespace

double matched_sublinear_constant(double c_linear, std::size_t s_max) {
    const double s = static_cast<double>(s_max);
    return c_linear * (s + 1.0) / std::sqrt((s + 1.0) * std::log(s + 2.0));
}

std::vector<InvariantResult> run_verify(const VerifySettings& vs) {
    Report out;
    const auto strip = build_fermi_strip(vs.domain, vs.loop, vs.strip.delta, vs.strip.n_tau, vs.strip.n_u);
    geometry_checks(vs, strip, out);
    density_checks(vs, out);
    strip_checks(vs, strip, out);
    select_checks(vs, strip, out);
    growth_checks(vs, out);
    lattice_checks(vs, out);
    return out.rows;
}

CsvTable verify_table(const std::vector<InvariantResult>& results) {
    CsvTable t({"module", "invariant", "kind", "status", "value", "limit", "detail"});
    for (const auto& r : results) {
        t.add_row({r.module, r.name, r.experiment ? "experiment" : "invariant", r.passed ? "pass" : "fail",
                   format_number(r.value), format_number(r.limit), r.detail});
    }
    return t;
}

bool verify_passed(const std::vector<InvariantResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const InvariantResult& r) { return r.experiment || r.passed; });
}

}  // namespace kbound
