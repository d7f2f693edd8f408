#ifndef HBN_QUADRATURE_HPP
#define HBN_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace hbn::theory {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule for the weight exp(-x^2) on the real line (Golub-Welsch).
QuadratureRule gauss_hermite(int n);

// E[f(Z)] for Z ~ N(0, 1) with a fixed n-node Gauss-Hermite rule. Accurate for smooth f;
// f with a sharp transition near 0 needs the adaptive versions below.
double normal_expectation(const std::function<double(double)>& f, int n);

struct AdaptiveOptions {
    double tolerance = 1e-13;  // relative
    unsigned max_depth = 30;
};

// Integral over [0, inf) of phi(x) f(x), by adaptive Gauss-Kronrod on [0, 40]; phi is below
// 1e-340 beyond that.
double half_normal_integral(const std::function<double(double)>& f, const AdaptiveOptions& opts = {});

// E[f(Z)], folded onto the half line so that a transition at 0 sits on an interval end.
double normal_expectation_adaptive(const std::function<double(double)>& f, const AdaptiveOptions& opts = {});

}  // namespace hbn::theory

#endif  // HBN_QUADRATURE_HPP
