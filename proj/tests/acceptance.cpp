// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kbound/csv.hpp"
#include "kbound/density.hpp"
#include "kbound/fermi.hpp"
#include "kbound/growth.hpp"
#include "kbound/lattice.hpp"
#include "kbound/loop_select.hpp"
#include "kbound/parallel.hpp"
#include "kbound/rng.hpp"
#include "kbound/scenarios.hpp"
#include "kbound/strip_analysis.hpp"
#include "kbound/verify.hpp"
#include "kbound_cli/commands.hpp"
#include "kbound_cli/config.hpp"

using namespace kbound;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(double v) { return format_number(v); }

const cli::Config& config() {
    static const cli::Config c = cli::load_config(KBOUND_DEFAULT_CONFIG);
    return c;
}

FermiStrip default_strip() {
    const auto& c = config();
    return build_fermi_strip(c.domain(), c.make_loop(), c.strip.delta, c.strip.n_tau, c.strip.n_u);
}

Outcome lemma_suite() {
    const auto& c = config();
    const auto dom = c.domain();
    const auto strip = default_strip();
    const double A = lemma_constant_A(dom, strip);
    const double ps[] = {1.0, 1.5, 1.9, 1.99};
    std::size_t configs = 0, violations = 0;
    double worst = 0.0;
    for (auto st : kAllStrategies) {
        for (std::size_t s = 1; s <= 200; ++s) {
            const auto S = place_punctures(st, s, strip, mix_seed(c.seed, s));
            for (const auto& r : lp_strip_integrals(strip, S, ps)) {
                const double bound = A * (static_cast<double>(s) + 1.0) / (2.0 - r.p);
                worst = std::max(worst, r.total / bound);
                violations += !(r.total <= bound);
                ++configs;
            }
        }
    }
    return {violations == 0, std::to_string(configs) + " configurations, " + std::to_string(violations) +
                                 " violations, max integral/bound " + fmt(worst)};
}

Outcome divergence_fit() {
    const auto strip = default_strip();
    const auto S = place_punctures(Strategy::on_loop_equispaced, 50, strip, config().seed);
    std::vector<double> ps;
    for (int k = 0; k < 25; ++k) ps.push_back(1.5 + 0.49 * k / 24.0);
    const auto lp = lp_strip_integrals(strip, S, ps);
    std::vector<double> x, y;
    for (const auto& r : lp) {
        x.push_back(1.0 / (2.0 - r.p));
        y.push_back(r.total);
    }
    const auto fit = fit_linear(x, y);
    return {fit.r2 >= 0.95, "r2 " + fmt(fit.r2) + ", a " + fmt(fit.intercept) + ", b " + fmt(fit.slope)};
}

struct SelectionTally {
    std::size_t runs = 0, unsound = 0, broken_chain = 0;
    double worst_g = 0.0, worst_holder = 0.0;
};

const SelectionTally& selection_runs() {
    static const SelectionTally tally = [] {
        const auto& c = config();
        const auto dom = c.domain();
        const auto strip = default_strip();
        const auto w0 = winding_vector(dom, strip.loop());
        SelectOptions so;
        so.grid = c.strip.grid;
        SelectionTally t;
        for (std::size_t run = 0; run < 500; ++run) {
            const auto st = kAllStrategies[run % 4];
            const std::size_t s = 1 + run % 64;
            const auto S = place_punctures(st, s, strip, mix_seed(c.seed, 5000 + run));
            const auto r = select_u0(strip, S, p_schedule(s), so);
            t.unsound += !(r.g_at_u0 <= 1.05 * r.M_threshold && r.clearance > 0.0 && r.winding == w0);
            t.broken_chain += !(r.measured_upper_length <= r.holder_bound * 1.001);
            t.worst_g = std::max(t.worst_g, r.g_at_u0 / r.M_threshold);
            t.worst_holder = std::max(t.worst_holder, r.measured_upper_length / r.holder_bound);
            ++t.runs;
        }
        return t;
    }();
    return tally;
}

Outcome selection_soundness() {
    const auto& t = selection_runs();
    return {t.unsound == 0, std::to_string(t.runs - t.unsound) + "/" + std::to_string(t.runs) +
                                " runs sound, max g(u0)/M " + fmt(t.worst_g)};
}

Outcome holder_chain() {
    const auto& t = selection_runs();
    return {t.broken_chain == 0, std::to_string(t.broken_chain) + " runs over the bound, max measured/holder " +
                                     fmt(t.worst_holder)};
}

Outcome growth_exponent() {
    const auto& c = config();
    std::vector<std::size_t> s;
    for (std::size_t v = 2; v <= 4096; v *= 2) s.push_back(v);
    const Strategy st[] = {Strategy::on_loop_equispaced};
    const std::uint64_t seeds[] = {c.seed};
    const auto records = run_growth(c.domain(), c.make_loop(), st, s, seeds, c.strip);
    const auto fit = fit_exponent(records);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : records) {
        const double k = r.holder_bound / reference_curves(r.s).upper;
        lo = std::min(lo, k);
        hi = std::max(hi, k);
    }
    const bool slope_ok = fit.slope >= 0.45 && fit.slope <= 0.62;
    const bool band_ok = hi / lo <= 3.0;
    return {slope_ok && band_ok, "slope " + fmt(fit.slope) + " (window [0.45, 0.62]), r2 " + fmt(fit.r2) +
                                     ", band " + fmt(hi / lo) + " (limit 3)"};
}

Outcome density_oracle() {
    const ReferenceModel models[] = {ReferenceModel::disk(1.0), ReferenceModel::punctured_disk(1.0),
                                     ReferenceModel::annulus(0.2)};
    const char* names[] = {"disk", "punctured_disk", "annulus"};
    std::string detail;
    bool ok = true;
    for (int m = 0; m < 3; ++m) {
        const auto& model = models[m];
        const auto dom = model.domain();
        const auto S = model.punctures();
        const double r_lo = model.kind == ReferenceModel::Kind::annulus ? model.r : 0.0;
        std::size_t violations = 0, points = 0;
        for (int a = 0; a < 40; ++a) {
            for (int b = 0; b < 40; ++b) {
                const double rho = r_lo + (model.R - r_lo) * (a + 0.5) / 40.0;
                const double th = 2.0 * M_PI * (b + 0.3) / 40.0;
                const Vec2 z{rho * std::cos(th), rho * std::sin(th)};
                const double ref = reference_density(model, z);
                const auto br = density_bracket(dom, S, z);
                violations += !(br.lower <= ref && ref <= br.upper);
                ++points;
            }
        }
        ok = ok && violations == 0 && points >= 1000;
        detail += std::string(names[m]) + " " + std::to_string(violations) + "/" + std::to_string(points) + "; ";
    }
    const auto disk = ReferenceModel::disk(1.0);
    const double diff = std::abs(upper_density(disk.domain(), {}, {0.0, 0.0}) - reference_density(disk, {0.0, 0.0}));
    ok = ok && diff <= 1e-12;
    return {ok, detail + "center |upper - reference| " + fmt(diff)};
}

Outcome layer_cake() {
    const CircleDomain dom({{0.0, 0.0}, 10.0});
    const auto loop = make_series_loop(circle_coefficients({0.0, 0.0}, 1.0), 0.0);
    const auto strip = build_fermi_strip(dom, loop, 0.1, 128, 17);
    const double ps[] = {1.0, 1.5, 1.9};
    double worst = 0.0;
    std::size_t cells = 0, outside = 0;
    for (int c = 0; c < 10; ++c) {
        const auto S = place_punctures(Strategy::on_strip_random, 5, strip, mix_seed(config().seed, 300 + c));
        const auto lp = lp_strip_integrals(strip, S, ps);
        for (std::size_t j = 0; j < S.size(); ++j) {
            const std::size_t q = (j + static_cast<std::size_t>(c)) % 3;
            const double oracle = std::pow(2.0, ps[q]) * layer_cake_oracle(S[j], voronoi_cell_region(strip, S, j), ps[q]);
            const double rel = std::abs(lp[q].per_cell[j] - oracle) / oracle;
            worst = std::max(worst, rel);
            outside += !(rel <= 0.02);
            ++cells;
        }
    }
    return {outside == 0 && cells >= 50,
            std::to_string(cells) + " cells, " + std::to_string(outside) + " outside 2%, max relative " + fmt(worst)};
}

Outcome common_base() {
    const auto dom = two_hole_domain();
    const auto loops = common_base_loops();
    std::vector<FermiStrip> strips;
    for (const auto& l : loops) strips.push_back(build_fermi_strip(dom, l, 0.25, 256, 17));
    SelectOptions so;
    so.grid = config().strip.grid;
    std::size_t failed = 0;
    double worst = 0.0, spread = 0.0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        Rng rng(mix_seed(config().seed, 9000 + run));
        const std::size_t s = 2 + run % 30;
        std::vector<Vec2> pts;
        for (std::size_t k = 0; k < s; ++k) {
            const auto& st = strips[k % 2];
            pts.push_back(st.map(st.loop().parameter_at(rng.uniform(0.0, st.loop().length())),
                                 rng.uniform(-st.delta(), st.delta())));
        }
        const PunctureSet S(pts);
        const double p = p_schedule(S.size());
        try {
            const auto cb = common_base_select(strips, S, p, so);
            bool ok = cb.base_points.size() == 2;
            for (std::size_t j = 0; ok && j < 2; ++j) {
                const double h = holder_length_bound(strips[j], S, p, cb.u0);
                worst = std::max(worst, h / cb.summed_holder_bounds[j]);
                ok = h <= cb.summed_holder_bounds[j];
            }
            const double gap = distance(cb.base_points.at(0), cb.base_points.at(1));
            spread = std::max(spread, gap);
            failed += !(ok && gap <= 1e-12);
        } catch (const std::exception&) {
            ++failed;
        }
    }
    return {failed == 0, std::to_string(100 - failed) + "/100 runs, max holder/prediction " + fmt(worst) +
                             ", base spread " + fmt(spread)};
}

Outcome lattice_halving() {
    const auto& c = config();
    auto k = c.schedule();
    const std::size_t s_max = *std::max_element(c.lattice.s.begin(), c.lattice.s.end());
    if (k.c_sublinear <= 0.0) k.c_sublinear = matched_sublinear_constant(k.c_linear, s_max);
    const auto gens = c.generators();
    const auto rows = halving_experiment(gens, c.lattice.s, k, c.lattice.budget);
    std::vector<double> x, yl, ys;
    double Hmax = 0.0;
    for (const auto& r : rows) {
        x.push_back(static_cast<double>(r.s));
        yl.push_back(static_cast<double>(r.N_linear));
        ys.push_back(static_cast<double>(r.N_sublinear));
        Hmax = std::max({Hmax, r.H_linear, r.H_sublinear});
    }
    const auto fl = fit_loglog(x, yl);
    const auto fs = fit_loglog(x, ys);
    const bool ok = fl.slope >= 3.7 && fl.slope <= 4.3 && fs.slope >= 1.9 && fs.slope <= 2.4 && Hmax <= 250.0 + 1e-9 &&
                    gens.size() == 2 && gens[0].rank() == 2;
    return {ok, "c_sublinear " + fmt(k.c_sublinear) + ", linear slope " + fmt(fl.slope) + " [3.7, 4.3], sublinear slope " + fmt(fs.slope) +
                    " [1.9, 2.4], max H " + fmt(Hmax)};
}

Outcome lattice_bound() {
    const TorusLattice lattices[] = {TorusLattice::standard(2), TorusLattice(2, {2.0, 0.5, 0.5, 1.0}, {1, 1, 0, 1}),
                                     TorusLattice(2, {3.0, 1.0, 1.0, 1.0}, {0, 1, -1, 0}), TorusLattice::standard(4)};
    std::size_t tested = 0, violations = 0;
    double worst = 0.0;
    for (const auto& L : lattices) {
        const double Hmax = L.rank() == 4 ? 20.0 : 250.0;
        for (double H = 0.0; H <= Hmax; H += (H < 10.0 ? 0.25 : 5.0)) {
            const double N = static_cast<double>(count_displacement(L, H));
            const double m = lattice_count_bound(L, H);
            worst = std::max(worst, N / m);
            violations += !(N <= m);
            ++tested;
        }
    }
    std::size_t changed = 0, perms = 0;
    const std::vector<std::int64_t> ms2[] = {{0, 1, -1, 0}, {-1, 0, 0, 1}, {0, -1, -1, 0}, {-1, 0, 0, -1}, {0, 1, 1, 0}};
    std::vector<double> id4(16, 0.0);
    for (int i = 0; i < 4; ++i) id4[static_cast<std::size_t>(5 * i)] = 1.0;
    const std::vector<std::int64_t> ms4[] = {{0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, -1, 0, 0, 0},
                                             {-1, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1, 0}};
    for (double H : {1.0, 3.0, 7.5, 12.0, 40.0, 120.0}) {
        const auto base2 = count_displacement(TorusLattice::standard(2), H);
        for (const auto& m : ms2) {
            changed += count_displacement(TorusLattice(2, {1, 0, 0, 1}, m), H) != base2;
            ++perms;
        }
        if (H > 12.0) continue;
        const auto base4 = count_displacement(TorusLattice::standard(4), H);
        for (const auto& m : ms4) {
            changed += count_displacement(TorusLattice(4, id4, m), H) != base4;
            ++perms;
        }
    }
    return {violations == 0 && changed == 0,
            std::to_string(tested) + " (lattice, H) pairs, max N/m " + fmt(worst) + ", " + std::to_string(changed) +
                "/" + std::to_string(perms) + " monodromy counts changed"};
}

std::string run_cli(std::vector<std::string> args, int& code) {
    args.insert(args.begin(), "kbound");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str();
}

Outcome determinism() {
    const std::vector<std::vector<std::string>> commands = {
        {"verify", "--config", KBOUND_DEFAULT_CONFIG},
        {"growth", "--config", KBOUND_DEFAULT_CONFIG, "--strategy", "all"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& cmd : commands) {
        std::string first;
        bool same = true;
        int worst_code = 0;
        for (const char* t : {"1", "4", "8"}) {
            auto args = cmd;
            args.push_back("--threads");
            args.push_back(t);
            int code = 0;
            const auto out = run_cli(args, code);
            worst_code = std::max(worst_code, code);
            if (first.empty()) first = out;
            same = same && out == first && !out.empty();
        }
        // verify may exit 1 on an invariant; determinism only needs the bytes
        ok = ok && same && worst_code <= 1;
        detail += cmd[0] + (same ? " identical" : " differs") + " (" + std::to_string(first.size()) + " bytes); ";
    }
    set_worker_threads(1);
    return {ok, detail + "threads 1, 4, 8"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
        double time_limit = 0.0;  // seconds, 0: none
    };
    const std::vector<Criterion> criteria = {
        {"lemma_bound_suite", lemma_suite, 300.0},
        {"divergence_fit", divergence_fit},
        {"selection_soundness", selection_soundness},
        {"holder_chain", holder_chain},
        {"growth_exponent", growth_exponent, 600.0},
        {"density_oracle", density_oracle},
        {"layer_cake_oracle", layer_cake},
        {"common_base", common_base},
        {"lattice_exponent_halving", lattice_halving, 120.0},
        {"lattice_bound_property", lattice_bound},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (criteria[i].time_limit > 0.0 && sec > criteria[i].time_limit) {
            o.passed = false;
            o.detail += "; over the " + fmt(criteria[i].time_limit) + " s limit";
        }
        failures += !o.passed;
        std::printf("criterion %zu: %s %s: %s [%.1f s]\n", i + 1, o.passed ? "PASS" : "FAIL", criteria[i].name,
                    o.detail.c_str(), sec);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
