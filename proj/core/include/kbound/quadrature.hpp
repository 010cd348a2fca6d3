#pragma once

#include <vector>

namespace kbound {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

/// Supported orders: 2, 4, 8, 16.
const QuadratureRule& gauss_legendre(int order);

}  // namespace kbound
