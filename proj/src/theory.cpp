#include <hbn/theory.hpp>

#include <hbn/quadrature.hpp>
#include <hbn/scores.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace hbn::theory {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// log 4 + 2p log p + (1 - 2p) log(1/2 - p), the BDe limit for a symmetric median split.
double symmetric_split_information(double p) {
    double out = std::log(4.0);
    if (p > 0) out += 2.0 * p * std::log(p);
    if (0.5 - p > 0) out += (1.0 - 2.0 * p) * std::log(0.5 - p);
    return std::max(out, 0.0);
}

double plogq(double p, double q) { return p > 0 ? p * std::log(p / q) : 0.0; }

}  // namespace

void LimitQuery::validate() const {
    if (!std::isfinite(beta)) throw TheoryError("beta must be finite");
    if (!(sigma1 > 0) || !(sigma2 > 0)) throw TheoryError("sigma1 and sigma2 must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw TheoryError("p must lie in [0, 1]");
    if (scenario == Scenario::dd && std::abs(beta) > 1.0) throw TheoryError("dd requires |beta| <= 1");
    if (scenario == Scenario::dc && p != 0.5)
        throw TheoryError("the dc limits assume p = 1/2; use finite_sample_ratio_mc for other p");
}

CdMoments cd_moments(double beta, double sigma1, const QuadratureConfig& quad) {
    auto link = [&](double t) { return 1.0 / (1.0 + std::exp(-beta * sigma1 * t)); };
    CdMoments m{};
    m.sigma11 = sigma1 * sigma1;
    m.mean2 = normal_expectation_adaptive(link, quad.adaptive);
    m.sigma12 = normal_expectation_adaptive([&](double t) { return t * sigma1 * link(t); }, quad.adaptive);
    m.sigma22 = m.mean2 - m.mean2 * m.mean2;
    return m;
}

double p11_tilde(const LimitQuery& q, const QuadratureConfig& quad) {
    q.validate();
    switch (q.scenario) {
        case Scenario::cc: {
            const double slope = q.sigma1 * q.beta / q.sigma2;
            return 0.25 + half_normal_integral(
                              [slope](double x) { return 0.5 * std::erf(slope * x / std::numbers::sqrt2); }, quad.adaptive);
        }
        case Scenario::cd: {
            const double slope = q.beta * q.sigma1;
            return 0.25 +
                   half_normal_integral([slope](double x) { return 0.5 * std::tanh(0.5 * slope * x); }, quad.adaptive);
        }
        case Scenario::dc:
            return 0.5 * std_normal_cdf(q.beta / (2.0 * q.sigma2));
        case Scenario::dd:
            break;
    }
    throw TheoryError("p11_tilde is not defined for the dd scenario");
}

double r10_limit(const LimitQuery& q, const QuadratureConfig& quad) {
    q.validate();
    switch (q.scenario) {
        case Scenario::cc: {
            const double ratio = q.beta * q.sigma1 / q.sigma2;
            return 0.5 * std::log1p(ratio * ratio);
        }
        case Scenario::cd: {
            const auto m = cd_moments(q.beta, q.sigma1, quad);
            const double prod = m.sigma11 * m.sigma22;
            return 0.5 * std::log(prod / (prod - m.sigma12 * m.sigma12));
        }
        case Scenario::dc:
            return 0.5 * std::log1p(q.beta * q.beta / (4.0 * q.sigma2 * q.sigma2));
        case Scenario::dd: {
            const double b2 = q.beta * q.beta;
            if (b2 >= 1.0) return std::numeric_limits<double>::infinity();
            const double s = 2.0 * q.p - 1.0;
            return 0.5 * std::log((1.0 - s * s * b2) / (1.0 - b2));
        }
    }
    return 0.0;
}

double rtilde10_limit(const LimitQuery& q, const QuadratureConfig& quad) {
    q.validate();
    if (q.scenario != Scenario::dd) return symmetric_split_information(p11_tilde(q, quad));

    const double hi = 0.5 + q.beta / 2.0, lo = 0.5 - q.beta / 2.0;
    const double p11 = q.p * hi, p10 = q.p * lo, p01 = (1.0 - q.p) * lo, p00 = (1.0 - q.p) * hi;
    const double row1 = p11 + p10, row0 = p01 + p00;
    const double col1 = p11 + p01, col0 = p10 + p00;
    const double mi = plogq(p11, row1 * col1) + plogq(p10, row1 * col0) + plogq(p01, row0 * col1) +
                      plogq(p00, row0 * col0);
    return std::max(mi, 0.0);
}

McEstimate finite_sample_ratio_mc(const LimitQuery& q, std::size_t rows, std::size_t replications, Rng& rng) {
    if (rows < 100) throw TheoryError("finite-sample check needs at least 100 rows");
    if (replications < 2) throw TheoryError("finite-sample check needs at least two replications");
    datagen::ScenarioConfig cfg;
    cfg.scenario = q.scenario;
    cfg.node_count = 2;
    cfg.beta = q.beta;
    cfg.sigma1 = q.sigma1;
    cfg.sigma2 = q.sigma2;
    cfg.p = q.p;
    cfg.n_rows = rows;

    const double n = static_cast<double>(rows);
    double sum_r = 0, sum_r2 = 0, sum_t = 0, sum_t2 = 0;
    for (std::size_t rep = 0; rep < replications; ++rep) {
        const auto gen = datagen::gen_2node(cfg, rng);
        const scores::BgeScore bge(datagen::rag_view(gen.data), scores::BgeHyperparams::defaults(2));
        const scores::BdeScore bde(datagen::discretize(gen.data, 2), scores::BdeHyperparams{});
        const double r = (bge.local(1, graph::bit(0)) - bge.local(1, 0)) / n;
        const double t = (bde.local(1, graph::bit(0)) - bde.local(1, 0)) / n;
        sum_r += r;
        sum_r2 += r * r;
        sum_t += t;
        sum_t2 += t * t;
    }
    const double k = static_cast<double>(replications);
    auto stderr_of = [k](double s, double s2) {
        const double var = std::max((s2 - s * s / k) / (k - 1.0), 0.0);
        return std::sqrt(var / k);
    };
    McEstimate out;
    out.replications = replications;
    out.r10_mean = sum_r / k;
    out.r10_stderr = stderr_of(sum_r, sum_r2);
    out.rtilde10_mean = sum_t / k;
    out.rtilde10_stderr = stderr_of(sum_t, sum_t2);
    return out;
}

std::vector<CurveRow> theory_curves(const LimitQuery& base, const std::vector<double>& beta_grid,
                                    const QuadratureConfig& quad) {
    std::vector<CurveRow> rows;
    rows.reserve(beta_grid.size());
    for (double beta : beta_grid) {
        LimitQuery q = base;
        q.beta = beta;
        rows.push_back({beta, r10_limit(q, quad), rtilde10_limit(q, quad)});
    }
    return rows;
}

}  // namespace hbn::theory
