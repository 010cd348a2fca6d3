#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kbound/csv.hpp"
#include "kbound/domain.hpp"
#include "kbound/growth.hpp"
#include "kbound/lattice.hpp"
#include "kbound/loop.hpp"

namespace kbound {

struct VerifySettings {
    VerifySettings(CircleDomain d, SmoothLoop l) : domain(std::move(d)), loop(std::move(l)) {}

    CircleDomain domain;
    SmoothLoop loop;
    GrowthOptions strip;
    std::vector<std::size_t> lemma_s{1, 5, 20, 50};
    std::vector<double> lemma_p{1.0, 1.5, 1.9, 1.99};
    std::vector<std::size_t> growth_s{2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    std::uint64_t seed = 1;
    int selection_runs = 8;
    std::vector<std::size_t> lattice_s{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    ScheduleConstants schedule{250.0 / 4097.0, 0.0, 0.0};  // c_sublinear <= 0: matched at the largest s
};

struct InvariantResult {
    std::string module;
    std::string name;
    bool experiment = false;  // finite-s fits; reported, not gating
    bool passed = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

std::vector<InvariantResult> run_verify(const VerifySettings& settings);
CsvTable verify_table(const std::vector<InvariantResult>& results);
/// True when every non-experiment row passed.
bool verify_passed(const std::vector<InvariantResult>& results);

/// Sublinear constant whose schedule meets the linear one at s_max.
double matched_sublinear_constant(double c_linear, std::size_t s_max);

}  // namespace kbound
