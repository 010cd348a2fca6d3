#include "kbound_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "kbound/csv.hpp"
#include "kbound/density.hpp"
#include "kbound/error.hpp"
#include "kbound/fermi.hpp"
#include "kbound/growth.hpp"
#include "kbound/lattice.hpp"
#include "kbound/loop_select.hpp"
#include "kbound/parallel.hpp"
#include "kbound/strip_analysis.hpp"
#include "kbound/svg.hpp"
#include "kbound/verify.hpp"
#include "kbound_cli/config.hpp"

#ifndef KBOUND_VERSION
#define KBOUND_VERSION "0.0.0"
#endif

namespace kbound::cli {

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::string svg;
    int threads = -1;
    std::optional<std::uint64_t> seed;
    std::string strategy;
    std::string s;
    std::optional<double> delta;
    std::string p;
    bool timing = false;
};

std::vector<std::size_t> parse_s_values(const std::string& text) {
    auto number = [&](std::string_view t) {
        std::size_t v = 0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail(ErrorKind::config, "--s: bad value '" + text + "'");
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) return {number(text)};
    const std::size_t a = number(std::string_view(text).substr(0, dots));
    const std::size_t b = number(std::string_view(text).substr(dots + 2));
    if (a == 0 || b < a) fail(ErrorKind::config, "--s: range A..B needs 0 < A <= B");
    std::vector<std::size_t> out;
    for (std::size_t v = a; v <= b; v *= 2) out.push_back(v);
    return out;
}

std::vector<double> parse_p_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) fail(ErrorKind::config, "--p: bad value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) fail(ErrorKind::config, "--p: empty list");
    return out;
}

Strategy parse_strategy_flag(const std::string& name) {
    const auto s = parse_strategy(name);
    if (!s) fail(ErrorKind::config, "--strategy: unknown strategy '" + name + "'");
    return *s;
}

std::size_t single_s(const Flags& f, std::size_t fallback) {
    if (f.s.empty()) return fallback;
    const auto v = parse_s_values(f.s);
    if (v.size() != 1) fail(ErrorKind::config, "--s: this command takes a single puncture count");
    return v.front();
}

Config effective_config(const Flags& f) {
    Config c = f.config.empty() ? Config{} : load_config(f.config);
    if (f.seed) c.seed = *f.seed;
    if (f.delta) {
        if (!(*f.delta > 0.0)) fail(ErrorKind::config, "--delta: expected a positive number");
        c.strip.delta = *f.delta;
    }
    return c;
}

void write_output(const Flags& f, const std::string& text, std::ostream& out) {
    if (f.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(f.out, std::ios::binary);
    if (!file) fail(ErrorKind::config, "cannot write '" + f.out + "'");
    file << text;
}

void write_svg(const Flags& f, const std::string& doc) {
    if (f.svg.empty()) return;
    std::ofstream file(f.svg, std::ios::binary);
    if (!file) fail(ErrorKind::config, "cannot write '" + f.svg + "'");
    file << doc;
}

void provenance(CsvTable& t, const char* command, const Config& c) {
    t.comment(std::string("kbound ") + KBOUND_VERSION + " " + command);
    t.comment("config " + config_json(c));
}

FermiStrip make_strip(const Config& c) {
    return build_fermi_strip(c.domain(), c.make_loop(), c.strip.delta, c.strip.n_tau, c.strip.n_u);
}

PunctureSet make_punctures(const Config& c, const FermiStrip& strip) {
    if (!c.punctures.points.empty()) {
        PunctureSet S(c.punctures.points);
        S.validate(c.domain());
        return S;
    }
    return place_punctures(c.punctures.strategy, c.punctures.s, strip, c.seed);
}

std::string winding_string(const std::vector<int>& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) out += (i ? ";" : "") + std::to_string(w[i]);
    return out;
}

int cmd_density(const Flags& f, std::ostream& out) {
    Config c = effective_config(f);
    if (!f.strategy.empty()) c.punctures.strategy = parse_strategy_flag(f.strategy);
    c.punctures.s = single_s(f, c.punctures.s);

    std::optional<ReferenceModel> model;
    if (c.density.reference == "disk") model = ReferenceModel::disk(c.density.R);
    if (c.density.reference == "punctured_disk") model = ReferenceModel::punctured_disk(c.density.R);
    if (c.density.reference == "annulus") model = ReferenceModel::annulus(c.density.r);

    const CircleDomain dom = model ? model->domain() : c.domain();
    const PunctureSet S = model ? model->punctures() : make_punctures(c, make_strip(c));

    CsvTable t({"x", "y", "lower", "upper", "reference"});
    provenance(t, "density", c);
    const int n = c.density.grid;
    const Vec2 o = dom.outer().center;
    const double R = dom.outer().radius;
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(n) * n);
    std::vector<char> bad(rows.size(), 0);
    parallel_for(rows.size(), [&](std::size_t k) {
        const int i = static_cast<int>(k) / n, j = static_cast<int>(k) % n;
        const Vec2 z{o.x - R + 2.0 * R * (i + 0.5) / n, o.y - R + 2.0 * R * (j + 0.5) / n};
        if (!dom.contains(z)) return;
        if (!S.empty() && dist_to_punctures(S, z) <= 0.0) return;
        const auto br = density_bracket(dom, S, z);
        std::string ref;
        bad[k] = !(br.lower <= br.upper * (1.0 + 1e-12));
        if (model) {
            const double r = reference_density(*model, z);
            bad[k] |= br.lower > r * (1.0 + 1e-12) || r > br.upper * (1.0 + 1e-12);
            ref = format_number(r);
        }
        rows[k] = {format_number(z.x), format_number(z.y), format_number(br.lower), format_number(br.upper), ref};
    });
    for (auto& r : rows) {
        if (!r.empty()) t.add_row(std::move(r));
    }
    write_output(f, t.str(), out);
    return std::any_of(bad.begin(), bad.end(), [](char b) { return b != 0; }) ? exit_invariant : exit_ok;
}

int cmd_lp(const Flags& f, std::ostream& out) {
    Config c = effective_config(f);
    if (!f.strategy.empty()) c.punctures.strategy = parse_strategy_flag(f.strategy);
    c.punctures.s = single_s(f, c.punctures.s);
    if (!f.p.empty()) c.lp.p = parse_p_list(f.p);

    const auto strip = make_strip(c);
    const auto S = make_punctures(c, strip);
    LpOptions opt;
    opt.max_depth = c.lp.max_depth;
    opt.order = c.lp.order;
    const auto reports = lp_bound_reports(c.domain(), strip, S, c.lp.p, opt);

    CsvTable t({"p", "s", "strategy", "integral", "constant_A", "certified_bound", "satisfied"});
    provenance(t, "lp-integral", c);
    const std::string strategy = c.punctures.points.empty() ? std::string(to_string(c.punctures.strategy)) : "explicit";
    bool ok = true;
    for (const auto& r : reports) {
        t.add_row({format_number(r.p), format_number(static_cast<std::uint64_t>(r.s)), strategy, format_number(r.integral),
                   format_number(r.constant_A), format_number(r.certified_bound), r.satisfied ? "true" : "false"});
        ok = ok && r.satisfied;
    }
    write_output(f, t.str(), out);
    if (!f.svg.empty()) write_svg(f, strip_svg(strip, S, voronoi_assign(strip, S), nullptr));
    return ok ? exit_ok : exit_invariant;
}

int cmd_select(const Flags& f, std::ostream& out) {
    Config c = effective_config(f);
    if (!f.strategy.empty()) c.punctures.strategy = parse_strategy_flag(f.strategy);
    c.punctures.s = single_s(f, c.punctures.s);
    if (!f.p.empty()) {
        const auto ps = parse_p_list(f.p);
        if (ps.size() != 1 || !(ps[0] > 1.0 && ps[0] < 2.0)) fail(ErrorKind::config, "--p: expected one value in (1, 2)");
        c.select.p = ps[0];
    }

    const auto strip = make_strip(c);
    const auto S = make_punctures(c, strip);
    const double p = c.select.p > 0.0 ? c.select.p : p_schedule(S.size());
    SelectOptions so;
    so.grid = c.strip.grid;
    const auto r = select_u0(strip, S, p, so);
    const auto w0 = winding_vector(c.domain(), c.make_loop());

    CsvTable t({"p", "s", "u0", "g_at_u0", "g_average", "M_threshold", "holder_bound", "measured_upper_length",
                "length_u0", "clearance", "winding", "constant_A", "kappa0", "L0", "upper_estimate", "u_best",
                "grid_size", "excluded"});
    provenance(t, "select-loop", c);
    t.add_row({format_number(r.p), format_number(static_cast<std::uint64_t>(r.s)), format_number(r.u0),
               format_number(r.g_at_u0), format_number(r.g_average), format_number(r.M_threshold),
               format_number(r.holder_bound), format_number(r.measured_upper_length), format_number(r.length_u0),
               format_number(r.clearance), winding_string(r.winding), format_number(r.constant_A),
               format_number(r.kappa0), format_number(r.L0), format_number(r.upper_estimate), format_number(r.u_best),
               format_number(r.grid_size), format_number(r.excluded)});
    write_output(f, t.str(), out);
    if (!f.svg.empty()) {
        const auto curve = parallel_curve(strip, r.u0);
        write_svg(f, strip_svg(strip, S, voronoi_assign(strip, S), &curve));
    }
    const bool ok = r.g_at_u0 <= 1.05 * r.M_threshold && r.clearance > 0.0 &&
                    r.measured_upper_length <= r.holder_bound * 1.001 && r.winding == w0;
    return ok ? exit_ok : exit_invariant;
}

int cmd_growth(const Flags& f, std::ostream& out) {
    Config c = effective_config(f);
    if (!f.strategy.empty()) {
        c.growth.strategies.clear();
        if (f.strategy == "all") {
            c.growth.strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
        } else {
            c.growth.strategies.push_back(parse_strategy_flag(f.strategy));
        }
    }
    if (!f.s.empty()) c.growth.s = parse_s_values(f.s);
    if (f.seed) c.growth.seeds = {*f.seed};

    const auto records = run_growth(c.domain(), c.make_loop(), c.growth.strategies, c.growth.s, c.growth.seeds, c.strip);

    std::vector<std::string> cols{"strategy", "s", "seed", "p_used", "u0", "upper_estimate", "holder_bound",
                                  "g_at_u0", "M_threshold", "reference_upper", "reference_lower"};
    if (f.timing) cols.push_back("runtime_ms");
    CsvTable t(cols);
    provenance(t, "growth", c);
    for (auto st : c.growth.strategies) {
        std::vector<GrowthRecord> mine;
        for (const auto& r : records) {
            if (r.strategy == st) mine.push_back(r);
        }
        try {
            const auto fit = fit_exponent(mine);
            t.comment("fit " + std::string(to_string(st)) + " slope " + format_number(fit.slope) + " intercept " +
                      format_number(fit.intercept) + " r2 " + format_number(fit.r2));
        } catch (const Error&) {
            t.comment("fit " + std::string(to_string(st)) + " unavailable (needs 5 s values over 2 decades)");
        }
    }
    bool ok = true;
    for (const auto& r : records) {
        const auto ref = reference_curves(r.s);
        std::vector<std::string> row{std::string(to_string(r.strategy)), format_number(static_cast<std::uint64_t>(r.s)),
                                     format_number(r.seed), format_number(r.p_used), format_number(r.u0),
                                     format_number(r.upper_estimate), format_number(r.holder_bound),
                                     format_number(r.g_at_u0), format_number(r.M_threshold), format_number(ref.upper),
                                     format_number(ref.lower)};
        if (f.timing) row.push_back(format_number(r.runtime_ms));
        t.add_row(std::move(row));
        ok = ok && r.upper_estimate <= r.holder_bound;
    }
    write_output(f, t.str(), out);
    if (!f.svg.empty()) write_svg(f, growth_svg(records));
    return ok ? exit_ok : exit_invariant;
}

int cmd_lattice(const Flags& f, std::ostream& out) {
    Config c = effective_config(f);
    if (!f.s.empty()) c.lattice.s = parse_s_values(f.s);
    if (c.lattice.s.empty()) fail(ErrorKind::config, "config: lattice.s: expected at least one value");
    const auto gens = c.generators();
    ScheduleConstants k = c.schedule();
    const std::size_t s_max = *std::max_element(c.lattice.s.begin(), c.lattice.s.end());
    if (k.c_sublinear <= 0.0) k.c_sublinear = matched_sublinear_constant(k.c_linear, s_max);
    const auto rows = halving_experiment(gens, c.lattice.s, k, c.lattice.budget);

    CsvTable t({"s", "schedule", "H", "N_total", "bound"});
    provenance(t, "lattice-count", c);
    t.comment("c_linear " + format_number(k.c_linear) + " c_sublinear " + format_number(k.c_sublinear) + " c0 " +
              format_number(k.c0));
    std::vector<double> x, yl, ys;
    for (const auto& r : rows) {
        x.push_back(static_cast<double>(r.s));
        yl.push_back(static_cast<double>(std::max<std::uint64_t>(r.N_linear, 1)));
        ys.push_back(static_cast<double>(std::max<std::uint64_t>(r.N_sublinear, 1)));
    }
    try {
        const auto fl = fit_loglog(x, yl);
        const auto fs = fit_loglog(x, ys);
        t.comment("slope linear " + format_number(fl.slope) + " r2 " + format_number(fl.r2));
        t.comment("slope sublinear " + format_number(fs.slope) + " r2 " + format_number(fs.r2));
    } catch (const Error&) {
        t.comment("slopes unavailable (needs 5 s values over 2 decades)");
    }
    auto bound = [&](double H) {
        double b = 1.0;
        for (const auto& g : gens) b *= lattice_count_bound(g, H);
        return b;
    };
    bool ok = true;
    for (const auto& r : rows) {
        for (int which = 0; which < 2; ++which) {
            const double H = which == 0 ? r.H_linear : r.H_sublinear;
            const auto N = which == 0 ? r.N_linear : r.N_sublinear;
            const double b = bound(H);
            t.add_row({format_number(static_cast<std::uint64_t>(r.s)),
                       std::string(to_string(which == 0 ? Schedule::linear : Schedule::sublinear)), format_number(H),
                       format_number(N), format_number(b)});
            ok = ok && static_cast<double>(N) <= b;
        }
    }
    write_output(f, t.str(), out);
    return ok ? exit_ok : exit_invariant;
}

int cmd_verify(const Flags& f, std::ostream& out) {
    const Config c = effective_config(f);
    VerifySettings vs(c.domain(), c.make_loop());
    vs.strip = c.strip;
    vs.lemma_s = c.verify.lemma_s;
    vs.lemma_p = c.verify.lemma_p;
    vs.growth_s = c.verify.growth_s;
    vs.seed = c.seed;
    vs.selection_runs = c.verify.selection_runs;
    vs.lattice_s = c.lattice.s;
    vs.schedule = c.schedule();
    const auto results = run_verify(vs);
    CsvTable t = verify_table(results);
    provenance(t, "verify", c);
    write_output(f, t.str(), out);
    return verify_passed(results) ? exit_ok : exit_invariant;
}

int exit_for(ErrorKind kind) { return kind == ErrorKind::budget ? exit_budget : exit_config; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified length bounds for loops in punctured circle domains"};
    app.set_version_flag("--version", KBOUND_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    std::uint64_t seed = 0;
    double delta = 0.0;
    app.add_option("--config", f.config, "JSON configuration file (schema_version 1)");
    app.add_option("--out", f.out, "write CSV here instead of stdout");
    app.add_option("--svg", f.svg, "also write an SVG plot to this path");
    app.add_option("--threads", f.threads, "worker threads (0: all cores)")->check(CLI::Range(0, 1024));
    auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--strategy", f.strategy, "puncture placement strategy");
    app.add_option("--s", f.s, "puncture count N, or A..B for the doubling sweep A, 2A, ..., <= B");
    auto* delta_opt = app.add_option("--delta", delta, "override strip.delta");
    app.add_option("--p", f.p, "exponent, or comma-separated exponents for lp-integral");
    app.add_flag("--timing", f.timing, "add a runtime_ms column to growth output");

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const Flags&, std::ostream&);
    };
    const Sub subs[] = {
        {"density", "density brackets on a grid", cmd_density},
        {"lp-integral", "L^p strip integrals against the certified bound", cmd_lp},
        {"select-loop", "select the parallel curve u0", cmd_select},
        {"growth", "length-bound growth sweep over s", cmd_growth},
        {"lattice-count", "lattice displacement counts under both schedules", cmd_lattice},
        {"verify", "run the invariant suite", cmd_verify},
    };
    for (const auto& s : subs) app.add_subcommand(s.name, s.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }
    if (seed_opt->count() > 0) f.seed = seed;
    if (delta_opt->count() > 0) f.delta = delta;

    try {
        int threads = f.threads;
        if (threads < 0 && !f.config.empty()) threads = load_config(f.config).threads;
        if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        set_worker_threads(threads);
        for (const auto& s : subs) {
            if (app.got_subcommand(s.name)) return s.fn(f, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_invariant;
    }
    return exit_config;
}

}  // namespace kbound::cli
