#ifndef HBN_THEORY_HPP
#define HBN_THEORY_HPP

#include <hbn/datagen.hpp>
#include <hbn/quadrature.hpp>
#include <hbn/rng.hpp>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hbn::theory {

using datagen::Scenario;

class TheoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters of a two-node scenario: beta is the dependence strength, sigma1/sigma2 the
// parent/child noise scales for continuous nodes, p the success probability of a Bernoulli
// parent.
struct LimitQuery {
    Scenario scenario = Scenario::cc;
    double beta = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double p = 0.5;

    void validate() const;
};

struct QuadratureConfig {
    AdaptiveOptions adaptive;
};

// P(X1 above its median, X2 above its median) in the limit of many rows. Not defined for dd.
double p11_tilde(const LimitQuery& q, const QuadratureConfig& quad = {});

// Limit of (1/N) log[P(G1 | X) / P(G0 | X)] under BGe on the raw data. Returns +inf for dd at |beta| = 1.
double r10_limit(const LimitQuery& q, const QuadratureConfig& quad = {});

// Same limit under BDe on the median-discretised data; always in [0, log 2].
double rtilde10_limit(const LimitQuery& q, const QuadratureConfig& quad = {});

// Covariance entries of (X1, X2) under the cd law, by adaptive quadrature.
struct CdMoments {
    double sigma11, sigma12, sigma22, mean2;
};
CdMoments cd_moments(double beta, double sigma1, const QuadratureConfig& quad = {});

struct McEstimate {
    double r10_mean = 0, r10_stderr = 0;
    double rtilde10_mean = 0, rtilde10_stderr = 0;
    std::size_t replications = 0;
};

// Finite-sample (1/N)[score(G1) - score(G0)] averaged over replicate datasets: BGe on the
// raw data for r10, BDe (ess = 1) on the median-discretised data for rtilde10.
McEstimate finite_sample_ratio_mc(const LimitQuery& q, std::size_t rows, std::size_t replications, Rng& rng);

struct CurveRow {
    double beta, r10, rtilde10;
};

// One row per grid value; `base` supplies the non-beta parameters.
std::vector<CurveRow> theory_curves(const LimitQuery& base, const std::vector<double>& beta_grid,
                                    const QuadratureConfig& quad = {});

}  // namespace hbn::theory

#endif  // HBN_THEORY_HPP
