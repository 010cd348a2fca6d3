#include "kbound/growth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <tuple>

#include "kbound/error.hpp"
#include "kbound/loop_select.hpp"
#include "kbound/parallel.hpp"
#include "kbound/rng.hpp"
#include "kbound/strip_analysis.hpp"

namespace kbound {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::on_loop_equispaced: return "on_loop_equispaced";
        case Strategy::on_strip_random: return "on_strip_random";
        case Strategy::clustered: return "clustered";
        case Strategy::grid_adversarial: return "grid_adversarial";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (auto s : kAllStrategies) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

namespace {

Vec2 strip_point(const FermiStrip& strip, double tau, double u) {
    return strip.map(strip.loop().parameter_at(tau), u);
}

// Moves exact duplicates apart by 1e-9 steps, keeping the first occurrence.
std::vector<Vec2> repair_duplicates(std::vector<Vec2> pts) {
    auto less = [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
    for (int pass = 0; pass < 64; ++pass) {
        std::vector<std::size_t> order(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return less(pts[a], pts[b]) || (pts[a] == pts[b] && a < b);
        });
        bool moved = false;
        for (std::size_t k = 1; k < order.size(); ++k) {
            if (pts[order[k]] == pts[order[k - 1]]) {
                pts[order[k]].x += 1e-9 * static_cast<double>(pass + 1);
                moved = true;
            }
        }
        if (!moved) return pts;
    }
    fail(ErrorKind::invalid_argument, "could not separate duplicate punctures");
}

}  // namespace

PunctureSet place_punctures(Strategy strategy, std::size_t s, const FermiStrip& strip, std::uint64_t seed,
                            std::size_t max_punctures) {
    if (s > max_punctures) fail(ErrorKind::budget, "puncture count exceeds the configured maximum");
    const double len = strip.loop().length();
    const double delta = strip.delta();
    std::vector<Vec2> pts;
    pts.reserve(s);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(strategy) * 0x100000000ULL + s));

    switch (strategy) {
        case Strategy::on_loop_equispaced:
            for (std::size_t j = 0; j < s; ++j) pts.push_back(strip.loop().point(len * static_cast<double>(j) / s));
            break;
        case Strategy::on_strip_random:
            for (std::size_t j = 0; j < s; ++j) {
                const double tau = rng.uniform(0.0, len);
                const double u = rng.uniform(-delta, delta);
                pts.push_back(strip_point(strip, tau, u));
            }
            break;
        case Strategy::clustered: {
            const auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s))));
            std::vector<std::pair<double, double>> centers(m);
            for (auto& c : centers) c = {rng.uniform(0.0, len), rng.uniform(-delta, delta)};
            const double sigma = 0.25 * delta;
            for (std::size_t j = 0; j < s; ++j) {
                const auto& c = centers[j % m];
                double tau = std::fmod(c.first + sigma * rng.normal(), len);
                if (tau < 0.0) tau += len;
                const double u = std::clamp(c.second + sigma * rng.normal(), -delta, delta);
                pts.push_back(strip_point(strip, tau, u));
            }
            break;
        }
        case Strategy::grid_adversarial: {
            const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s))));
            const std::size_t rows = cols == 0 ? 0 : (s + cols - 1) / cols;
            for (std::size_t k = 0; k < s; ++k) {
                const std::size_t i = k / rows;
                const std::size_t j = k % rows;
                const double tau = len * (static_cast<double>(i) + 0.5) / static_cast<double>(cols);
                const double u = -delta + 2.0 * delta * (static_cast<double>(j) + 0.5) / static_cast<double>(rows);
                pts.push_back(strip_point(strip, tau, u));
            }
            break;
        }
    }
    PunctureSet S(repair_duplicates(std::move(pts)));
    S.validate(strip.domain());
    return S;
}

GrowthRecord estimate_L_upper(const FermiStrip& strip, std::size_t s, Strategy strategy, std::uint64_t seed,
                              const GrowthOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const PunctureSet S = place_punctures(strategy, s, strip, seed);
    GrowthRecord rec;
    rec.s = s;
    rec.strategy = strategy;
    rec.seed = seed;
    rec.p_used = p_schedule(s);
    SelectOptions so;
    so.grid = options.grid;
    so.winding = false;
    const auto r = select_u0(strip, S, rec.p_used, so);
    rec.u0 = r.u0;
    rec.upper_estimate = r.upper_estimate;
    rec.holder_bound = r.holder_bound;
    rec.g_at_u0 = r.g_at_u0;
    rec.M_threshold = r.M_threshold;
    rec.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

GrowthRecord estimate_L_upper(const CircleDomain& domain, const SmoothLoop& loop, std::size_t s, Strategy strategy,
                              std::uint64_t seed, const GrowthOptions& options) {
    const auto strip = build_fermi_strip(domain, loop, options.delta, options.n_tau, options.n_u);
    return estimate_L_upper(strip, s, strategy, seed, options);
}

ExponentFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::invalid_argument, "fit needs matching x and y");
    std::vector<double> distinct(x.begin(), x.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 5) fail(ErrorKind::invalid_argument, "fit needs at least 5 distinct s values");
    if (!(distinct.front() > 0.0) || distinct.back() < 100.0 * distinct.front()) {
        fail(ErrorKind::invalid_argument, "fit needs s values spanning at least 2 decades");
    }
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) fail(ErrorKind::invalid_argument, "fit needs positive values");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_linear(lx, ly);
}

ExponentFit fit_linear(std::span<const double> lx, std::span<const double> ly) {
    if (lx.size() != ly.size() || lx.size() < 2) fail(ErrorKind::invalid_argument, "fit needs at least 2 points");
    const std::size_t n = lx.size();
    const double mx = pairwise_sum(lx) / n;
    const double my = pairwise_sum(ly) / n;
    std::vector<double> sxy(n), sxx(n), syy(n);
    for (std::size_t i = 0; i < n; ++i) {
        sxy[i] = (lx[i] - mx) * (ly[i] - my);
        sxx[i] = (lx[i] - mx) * (lx[i] - mx);
        syy[i] = (ly[i] - my) * (ly[i] - my);
    }
    const double Sxy = pairwise_sum(sxy), Sxx = pairwise_sum(sxx), Syy = pairwise_sum(syy);
    ExponentFit f;
    f.slope = Sxy / Sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = Syy > 0.0 ? Sxy * Sxy / (Sxx * Syy) : 1.0;
    return f;
}

ExponentFit fit_exponent(std::span<const GrowthRecord> records) {
    std::vector<double> x, y;
    for (const auto& r : records) {
        x.push_back(static_cast<double>(r.s));
        y.push_back(r.upper_estimate);
    }
    return fit_loglog(x, y);
}

ReferenceCurves reference_curves(std::size_t s) {
    const double sd = static_cast<double>(s);
    const double l = std::log(sd + 2.0);
    return {std::sqrt((sd + 1.0) * l), std::sqrt(sd) / l};
}

std::vector<GrowthRecord> run_growth(const CircleDomain& domain, const SmoothLoop& loop,
                                     std::span<const Strategy> strategies, std::span<const std::size_t> s_values,
                                     std::span<const std::uint64_t> seeds, const GrowthOptions& options) {
    const auto strip = build_fermi_strip(domain, loop, options.delta, options.n_tau, options.n_u);
    struct Job {
        Strategy strategy;
        std::size_t s;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto st : strategies) {
        for (auto s : s_values) {
            for (auto seed : seeds) jobs.push_back({st, s, seed});
        }
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        return std::tie(a.strategy, a.s, a.seed) < std::tie(b.strategy, b.s, b.seed);
    });
    std::vector<GrowthRecord> out(jobs.size());
    // largest jobs first keeps the pool busy; results land in fixed slots
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return jobs[a].s > jobs[b].s; });
    parallel_for(order.size(), [&](std::size_t k) {
        const auto& j = jobs[order[k]];
        out[order[k]] = estimate_L_upper(strip, j.s, j.strategy, j.seed, options);
    });
    return out;
}

}  // namespace kbound
