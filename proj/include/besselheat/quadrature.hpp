#pragma once

#include <vector>

namespace besselheat {

struct QuadratureRule {
    std::vector<double> nodes;    ///< on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton on the three-term recurrence).
QuadratureRule gauss_legendre(int n);

/// Composite rule on [a, b] with `panels` equal panels of `rule`.
QuadratureRule composite(const QuadratureRule& rule, double a, double b, int panels);

}  // namespace besselheat
