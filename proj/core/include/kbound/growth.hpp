#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kbound/domain.hpp"
#include "kbound/fermi.hpp"
#include "kbound/loop.hpp"

namespace kbound {

enum class Strategy { on_loop_equispaced, on_strip_random, clustered, grid_adversarial };

inline constexpr Strategy kAllStrategies[] = {Strategy::on_loop_equispaced, Strategy::on_strip_random,
                                              Strategy::clustered, Strategy::grid_adversarial};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

inline constexpr std::size_t kMaxPunctures = 1000000;

PunctureSet place_punctures(Strategy strategy, std::size_t s, const FermiStrip& strip, std::uint64_t seed,
                            std::size_t max_punctures = kMaxPunctures);

struct GrowthRecord {
    std::size_t s = 0;
    Strategy strategy = Strategy::on_loop_equispaced;
    std::uint64_t seed = 0;
    double p_used = 1.5;
    double u0 = 0.0;
    double upper_estimate = 0.0;
    double holder_bound = 0.0;
    double g_at_u0 = 0.0;
    double M_threshold = 0.0;
    std::int64_t runtime_ms = 0;
};

struct GrowthOptions {
    double delta = 0.5;
    int n_tau = 256;
    int n_u = 33;
    int grid = 257;
};

GrowthRecord estimate_L_upper(const CircleDomain& domain, const SmoothLoop& loop, std::size_t s, Strategy strategy,
                              std::uint64_t seed, const GrowthOptions& options = {});
/// Same, reusing a prebuilt strip.
GrowthRecord estimate_L_upper(const FermiStrip& strip, std::size_t s, Strategy strategy, std::uint64_t seed,
                              const GrowthOptions& options = {});

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares of log y on log x; requires >= 5 distinct x spanning >= 2 decades.
ExponentFit fit_loglog(std::span<const double> x, std::span<const double> y);
ExponentFit fit_exponent(std::span<const GrowthRecord> records);
/// Ordinary least squares y = intercept + slope x.
ExponentFit fit_linear(std::span<const double> x, std::span<const double> y);

struct ReferenceCurves {
    double upper = 0.0;
    double lower = 0.0;
};

/// (sqrt((s+1) ln(s+2)), sqrt(s) / ln(s+2)).
ReferenceCurves reference_curves(std::size_t s);

/// Records for every (strategy, s, seed), sorted by (strategy, s, seed).
std::vector<GrowthRecord> run_growth(const CircleDomain& domain, const SmoothLoop& loop,
                                     std::span<const Strategy> strategies, std::span<const std::size_t> s_values,
                                     std::span<const std::uint64_t> seeds, const GrowthOptions& options = {});

}  // namespace kbound
