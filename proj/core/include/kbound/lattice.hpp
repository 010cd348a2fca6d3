#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <optional>
#include <vector>

namespace kbound {

/// Z^rank with a positive-definite Gram form and a unimodular automorphism.
/// Matrices are row-major.
class TorusLattice {
public:
    TorusLattice(int rank, std::vector<double> gram, std::vector<std::int64_t> monodromy);
    static TorusLattice standard(int rank);

    int rank() const { return rank_; }
    const std::vector<double>& gram() const { return gram_; }
    const std::vector<std::int64_t>& monodromy() const { return monodromy_; }
    /// monodromy^T * gram * monodromy
    const std::vector<double>& effective_gram() const { return effective_; }
    double smallest_eigenvalue() const { return lambda_min_; }
    double effective_determinant() const { return det_effective_; }

private:
    int rank_;
    std::vector<double> gram_;
    std::vector<std::int64_t> monodromy_;
    std::vector<double> effective_;
    double lambda_min_ = 0.0;
    double det_effective_ = 0.0;
};

/// Exact integer determinant (fraction-free elimination).
std::int64_t integer_determinant(int n, std::vector<std::int64_t> m);

inline constexpr std::uint64_t kDefaultCountBudget = 400'000'000;

/// Number of beta in Z^rank with beta^T Q beta <= H^2, Q the effective Gram form.
std::uint64_t count_displacement(const TorusLattice& lattice, double H,
                                 std::uint64_t budget = kDefaultCountBudget);

/// Volume of the Euclidean unit ball in dimension d.
double unit_ball_volume(int d);
/// Volume of {x : x^T Q x <= 1}.
double ellipsoid_volume(const TorusLattice& lattice);
/// (1 + margin) * ellipsoid_volume * (H + 1)^rank.
double lattice_count_bound(const TorusLattice& lattice, double H, double margin = 0.5);

enum class Schedule { linear, sublinear };
std::string_view to_string(Schedule s);
std::optional<Schedule> parse_schedule(std::string_view name);

/// linear: c (s+1) + c0; sublinear: c sqrt((s+1) ln(s+2)) + c0.
double h_schedule(std::size_t s, Schedule kind, double c, double c0);

struct CountRecord {
    double H = 0.0;
    std::uint64_t N = 0;
    std::size_t s = 0;
    Schedule schedule = Schedule::linear;
};

struct ScheduleConstants {
    double c_linear = 1.0;
    double c_sublinear = 1.0;
    double c0 = 0.0;
};

struct HalvingRow {
    std::size_t s = 0;
    double H_linear = 0.0;
    double H_sublinear = 0.0;
    std::uint64_t N_linear = 0;
    std::uint64_t N_sublinear = 0;
};

/// N_total = product over generators of count_displacement(lattice_j, H(s)) for both schedules.
std::vector<HalvingRow> halving_experiment(std::span<const TorusLattice> lattices, std::span<const std::size_t> s_values,
                                           const ScheduleConstants& constants,
                                           std::uint64_t budget = kDefaultCountBudget);

}  // namespace kbound
