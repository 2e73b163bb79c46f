#include "besselheat/quadrature.hpp"

#include <cmath>

#include "besselheat/errors.hpp"

namespace besselheat {

QuadratureRule gauss_legendre(int n)
{
    if (n < 1) {
        throw DomainError("gauss_legendre: requires n >= 1");
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

QuadratureRule composite(const QuadratureRule& rule, double a, double b, int panels)
{
    if (panels < 1 || !(b > a)) {
        throw DomainError("composite: requires panels >= 1 and a < b");
    }
    QuadratureRule out;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            out.nodes.push_back(mid + 0.5 * width * rule.nodes[i]);
            out.weights.push_back(0.5 * width * rule.weights[i]);
        }
    }
    return out;
}

}  // namespace besselheat
