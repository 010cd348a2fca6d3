#include "kbound/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <numeric>

#include "kbound/error.hpp"

namespace kbound {

namespace {

// Boost stores the non-negative half of each symmetric rule.
template <unsigned N>
QuadratureRule expand() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    QuadratureRule r;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            r.nodes.push_back(0.0);
            r.weights.push_back(w[i]);
        } else {
            r.nodes.push_back(x[i]);
            r.weights.push_back(w[i]);
            r.nodes.push_back(-x[i]);
            r.weights.push_back(w[i]);
        }
    }
    std::vector<std::size_t> idx(r.nodes.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.nodes[a] < r.nodes[b]; });
    QuadratureRule sorted;
    for (auto i : idx) {
        sorted.nodes.push_back(r.nodes[i]);
        sorted.weights.push_back(r.weights[i]);
    }
    return sorted;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
    static const QuadratureRule g2 = expand<2>();
    static const QuadratureRule g4 = expand<4>();
    static const QuadratureRule g8 = expand<8>();
    static const QuadratureRule g16 = expand<16>();
    switch (order) {
        case 2: return g2;
        case 4: return g4;
        case 8: return g8;
        case 16: return g16;
        default: fail(ErrorKind::invalid_argument, "unsupported Gauss-Legendre order");
    }
}

}  // namespace kbound
