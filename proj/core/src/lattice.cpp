#include "kbound/lattice.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "kbound/error.hpp"
#include "kbound/parallel.hpp"

namespace kbound {

namespace {

using Matrix = Eigen::MatrixXd;
__extension__ typedef __int128 Wide;

Matrix to_matrix(int n, const std::vector<double>& v) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = v[static_cast<std::size_t>(i * n + j)];
    }
    return m;
}

}  // namespace

std::int64_t integer_determinant(int n, std::vector<std::int64_t> m) {
    if (n == 0) return 1;
    auto at = [&](int i, int j) -> std::int64_t& { return m[static_cast<std::size_t>(i * n + j)]; };
    int sign = 1;
    Wide prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (at(k, k) == 0) {
            int swap = -1;
            for (int i = k + 1; i < n; ++i) {
                if (at(i, k) != 0) {
                    swap = i;
                    break;
                }
            }
            if (swap < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(swap, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                const Wide v = (static_cast<Wide>(at(i, j)) * at(k, k) -
                                    static_cast<Wide>(at(i, k)) * at(k, j)) / prev;
                if (v > INT64_MAX || v < INT64_MIN) fail(ErrorKind::invalid_argument, "determinant overflow");
                at(i, j) = static_cast<std::int64_t>(v);
            }
        }
        prev = at(k, k);
    }
    return sign * at(n - 1, n - 1);
}

TorusLattice::TorusLattice(int rank, std::vector<double> gram, std::vector<std::int64_t> monodromy)
    : rank_(rank), gram_(std::move(gram)), monodromy_(std::move(monodromy)) {
    if (rank_ < 2 || rank_ % 2 != 0) fail(ErrorKind::invalid_argument, "lattice rank must be even and >= 2");
    const auto n2 = static_cast<std::size_t>(rank_ * rank_);
    if (gram_.size() != n2) fail(ErrorKind::invalid_argument, "gram matrix has the wrong size");
    if (monodromy_.size() != n2) fail(ErrorKind::invalid_argument, "monodromy matrix has the wrong size");
    const Matrix G = to_matrix(rank_, gram_);
    if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, G.cwiseAbs().maxCoeff())) {
        fail(ErrorKind::invalid_argument, "gram matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eg(0.5 * (G + G.transpose()));
    if (!(eg.eigenvalues().minCoeff() > 0.0)) fail(ErrorKind::invalid_argument, "gram matrix must be positive definite");
    const std::int64_t det = integer_determinant(rank_, monodromy_);
    if (det != 1 && det != -1) fail(ErrorKind::invalid_argument, "monodromy must be unimodular (|det| = 1)");

    Matrix M(rank_, rank_);
    for (int i = 0; i < rank_; ++i) {
        for (int j = 0; j < rank_; ++j) M(i, j) = static_cast<double>(monodromy_[static_cast<std::size_t>(i * rank_ + j)]);
    }
    Matrix Q = M.transpose() * (0.5 * (G + G.transpose())) * M;
    Q = 0.5 * (Q + Q.transpose());
    effective_.resize(n2);
    for (int i = 0; i < rank_; ++i) {
        for (int j = 0; j < rank_; ++j) effective_[static_cast<std::size_t>(i * rank_ + j)] = Q(i, j);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eq(Q);
    lambda_min_ = eq.eigenvalues().minCoeff();
    det_effective_ = eq.eigenvalues().prod();
}

TorusLattice TorusLattice::standard(int rank) {
    std::vector<double> g(static_cast<std::size_t>(rank * rank), 0.0);
    std::vector<std::int64_t> m(g.size(), 0);
    for (int i = 0; i < rank; ++i) {
        g[static_cast<std::size_t>(i * rank + i)] = 1.0;
        m[static_cast<std::size_t>(i * rank + i)] = 1;
    }
    return TorusLattice(rank, std::move(g), std::move(m));
}

std::uint64_t count_displacement(const TorusLattice& lattice, double H, std::uint64_t budget) {
    if (!(H >= 0.0) || !std::isfinite(H)) fail(ErrorKind::invalid_argument, "displacement radius must be >= 0");
    const int d = lattice.rank();
    if (d > 6) fail(ErrorKind::budget, "brute-force counting supports rank <= 6");
    const double H2 = H * H * (1.0 + 1e-12);
    const auto B = static_cast<std::int64_t>(std::floor(std::sqrt(H2 / lattice.smallest_eigenvalue())));
    const double side = 2.0 * static_cast<double>(B) + 1.0;
    if (std::pow(side, d) > static_cast<double>(budget)) {
        std::ostringstream os;
        os << "enumeration box of " << std::pow(side, d) << " points exceeds the budget of " << budget;
        fail(ErrorKind::budget, os.str());
    }
    const auto& Q = lattice.effective_gram();
    const auto width = static_cast<std::size_t>(2 * B + 1);
    std::vector<std::uint64_t> per_lead(width, 0);
    parallel_for(width, [&](std::size_t lead) {
        std::int64_t x[6] = {static_cast<std::int64_t>(lead) - B, -B, -B, -B, -B, -B};
        std::uint64_t count = 0;
        while (true) {
            double q = 0.0;
            for (int i = 0; i < d; ++i) {
                double row = 0.0;
                for (int j = 0; j < d; ++j) row += Q[static_cast<std::size_t>(i * d + j)] * static_cast<double>(x[j]);
                q += static_cast<double>(x[i]) * row;
            }
            count += q <= H2;
            int k = d - 1;
            while (k >= 1 && x[k] == B) {
                x[k] = -B;
                --k;
            }
            if (k < 1) break;
            ++x[k];
        }
        per_lead[lead] = count;
    });
    std::uint64_t total = 0;
    for (auto c : per_lead) total += c;
    return total;
}

double unit_ball_volume(int d) { return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

double ellipsoid_volume(const TorusLattice& lattice) {
    return unit_ball_volume(lattice.rank()) / std::sqrt(lattice.effective_determinant());
}

double lattice_count_bound(const TorusLattice& lattice, double H, double margin) {
    return (1.0 + margin) * ellipsoid_volume(lattice) * std::pow(H + 1.0, lattice.rank());
}

std::string_view to_string(Schedule s) { return s == Schedule::linear ? "linear" : "sublinear"; }

std::optional<Schedule> parse_schedule(std::string_view name) {
    if (name == "linear") return Schedule::linear;
    if (name == "sublinear") return Schedule::sublinear;
    return std::nullopt;
}

double h_schedule(std::size_t s, Schedule kind, double c, double c0) {
    const double sd = static_cast<double>(s);
    if (kind == Schedule::linear) return c * (sd + 1.0) + c0;
    return c * std::sqrt((sd + 1.0) * std::log(sd + 2.0)) + c0;
}

std::vector<HalvingRow> halving_experiment(std::span<const TorusLattice> lattices, std::span<const std::size_t> s_values,
                                           const ScheduleConstants& constants, std::uint64_t budget) {
    if (lattices.empty() || lattices.size() > 3) fail(ErrorKind::invalid_argument, "halving experiment needs 1 to 3 generators");
    const int rank = lattices[0].rank();
    if (rank != 2 && rank != 4) fail(ErrorKind::invalid_argument, "halving experiment needs n in {1, 2}");
    for (const auto& l : lattices) {
        if (l.rank() != rank) fail(ErrorKind::invalid_argument, "all generator lattices must share the rank");
    }
    std::vector<HalvingRow> rows;
    for (auto s : s_values) {
        HalvingRow r;
        r.s = s;
        r.H_linear = h_schedule(s, Schedule::linear, constants.c_linear, constants.c0);
        r.H_sublinear = h_schedule(s, Schedule::sublinear, constants.c_sublinear, constants.c0);
        r.N_linear = 1;
        r.N_sublinear = 1;
        for (const auto& l : lattices) {
            for (auto kind : {Schedule::linear, Schedule::sublinear}) {
                const double H = kind == Schedule::linear ? r.H_linear : r.H_sublinear;
                std::uint64_t n = 0;
                try {
                    n = count_displacement(l, H, budget);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::budget) throw;
                    std::ostringstream os;
                    os << "budget exceeded at s = " << s << ", schedule " << to_string(kind) << ": " << e.what();
                    fail(ErrorKind::budget, os.str());
                }
                (kind == Schedule::linear ? r.N_linear : r.N_sublinear) *= n;
            }
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace kbound
