#include <hbn/quadrature.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hbn::theory {

namespace {

QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("quadrature: eigen-decomposition failed");
    QuadratureRule rule;
    const auto n = diag.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes.push_back(solver.eigenvalues()[i]);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights.push_back(mu0 * v0 * v0);
    }
    return rule;
}

// Rules are reused across many evaluations.
const QuadratureRule& cached(char family, int n) {
    static std::mutex mutex;
    static std::map<std::pair<char, int>, QuadratureRule> rules;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(family, n);
    auto it = rules.find(key);
    if (it == rules.end()) it = rules.emplace(key, gauss_hermite(n)).first;
    return it->second;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
    return golub_welsch(diag, off, std::sqrt(std::numbers::pi));
}

double normal_expectation(const std::function<double(double)>& f, int n) {
    const auto& rule = cached('h', n);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(std::numbers::sqrt2 * rule.nodes[i]);
    return sum / std::sqrt(std::numbers::pi);
}

double half_normal_integral(const std::function<double(double)>& f, const AdaptiveOptions& opts) {
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    auto g = [&](double x) { return norm * std::exp(-0.5 * x * x) * f(x); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 40.0, opts.max_depth, opts.tolerance);
}

double normal_expectation_adaptive(const std::function<double(double)>& f, const AdaptiveOptions& opts) {
    return half_normal_integral([&](double x) { return f(x) + f(-x); }, opts);
}

}  // namespace hbn::theory
