#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kbound/domain.hpp"
#include "kbound/growth.hpp"
#include "kbound/lattice.hpp"
#include "kbound/loop.hpp"

namespace kbound::cli {

inline constexpr int kSchemaVersion = 1;

struct LoopConfig {
    std::string type = "circle";  // circle | ellipse
    Vec2 center{-3.0, 0.0};
    double radius = 2.5;
    double a = 3.0;
    double b = 2.0;
    double rotation = 0.0;
    bool counterclockwise = true;
    double base_t = 0.0;
};

struct PunctureConfig {
    Strategy strategy = Strategy::on_loop_equispaced;
    std::size_t s = 50;
    /// When non-empty, used verbatim instead of a placement strategy.
    std::vector<Vec2> points;
};

struct DensityConfig {
    int grid = 64;
    std::string reference = "none";  // none | disk | punctured_disk | annulus
    double R = 1.0;
    double r = 0.2;
};

struct LpConfig {
    std::vector<double> p{1.0, 1.5, 1.9, 1.99};
    int max_depth = 10;
    int order = 4;
};

struct SelectConfig {
    double p = 0.0;  // <= 0: p_schedule(s)
};

struct GrowthConfig {
    std::vector<Strategy> strategies{Strategy::on_loop_equispaced};
    std::vector<std::size_t> s{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    std::vector<std::uint64_t> seeds{1};
};

struct GeneratorConfig {
    int rank = 2;
    std::vector<double> gram{1.0, 0.0, 0.0, 1.0};
    std::vector<std::int64_t> monodromy{1, 0, 0, 1};
};

struct LatticeConfig {
    std::vector<GeneratorConfig> generators{GeneratorConfig{}, GeneratorConfig{}};
    double c_linear = 250.0 / 4097.0;
    double c_sublinear = 0.0;  // <= 0: matched to the linear schedule at the largest s
    double c0 = 0.0;
    std::vector<std::size_t> s{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    std::uint64_t budget = kDefaultCountBudget;
};

struct VerifyConfig {
    std::vector<std::size_t> lemma_s{1, 5, 20, 50};
    std::vector<double> lemma_p{1.0, 1.5, 1.9, 1.99};
    std::vector<std::size_t> growth_s{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    int selection_runs = 8;
};

struct Config {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency; never affects results
    Circle outer{{0.0, 0.0}, 10.0};
    std::vector<Circle> inner{{{-3.0, 0.0}, 1.0}, {{3.0, 0.0}, 1.0}};
    LoopConfig loop;
    GrowthOptions strip;
    PunctureConfig punctures;
    DensityConfig density;
    LpConfig lp;
    SelectConfig select;
    GrowthConfig growth;
    LatticeConfig lattice;
    VerifyConfig verify;

    CircleDomain domain() const;
    SmoothLoop make_loop() const;
    std::vector<TorusLattice> generators() const;
    ScheduleConstants schedule() const;
};

/// Parses a JSON document. Unknown keys, type mismatches and out-of-range
/// values are config errors naming the offending field path.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);

/// Canonical single-line JSON of every result-affecting setting.
std::string config_json(const Config& config);

}  // namespace kbound::cli
