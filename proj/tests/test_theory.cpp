#include <doctest.h>

#include <hbn/quadrature.hpp>
#include <hbn/theory.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace hbn;
using namespace hbn::theory;

namespace {

LimitQuery query(Scenario s, double beta, double p = 0.5) {
    LimitQuery q;
    q.scenario = s;
    q.beta = beta;
    q.p = p;
    return q;
}

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

TEST_CASE("gauss hermite integrates polynomials exactly") {
    // E[Z^2k] = (2k-1)!!
    CHECK(normal_expectation([](double x) { return 1.0; }, 20) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(normal_expectation([](double x) { return x * x; }, 20) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(normal_expectation([](double x) { return std::pow(x, 6); }, 20) == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(std::abs(normal_expectation([](double x) { return std::pow(x, 5); }, 20)) < 1e-12);
}

TEST_CASE("adaptive half line rule") {
    // int_0^inf phi(x) x dx = 1/sqrt(2 pi)
    CHECK(half_normal_integral([](double x) { return x; }) ==
          doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-13));
    CHECK(half_normal_integral([](double) { return 1.0; }) == doctest::Approx(0.5).epsilon(1e-14));
    // agrees with the fixed Gauss-Hermite rule on a smooth integrand
    auto f = [](double x) { return std::cos(x) + x * x / (1 + std::exp(-x)); };
    CHECK(normal_expectation_adaptive(f) == doctest::Approx(normal_expectation(f, 80)).epsilon(1e-12));
}

TEST_CASE("p11 tilde against the orthant oracle") {
    for (double beta : {0.0, 0.3, 1.0, 2.5, 7.0}) {
        const double rho = beta / std::sqrt(1 + beta * beta);
        const double want = 0.25 + std::asin(rho) / (2 * std::numbers::pi);
        CHECK(std::abs(p11_tilde(query(Scenario::cc, beta)) - want) < 1e-10);
    }
    CHECK(std::abs(p11_tilde(query(Scenario::cc, 1.0)) - 0.375) < 1e-10);
    // sigma scaling enters only through sigma1 beta / sigma2
    LimitQuery q = query(Scenario::cc, 1.0);
    q.sigma1 = 2.0;
    q.sigma2 = 4.0;
    CHECK(p11_tilde(q) == doctest::Approx(p11_tilde(query(Scenario::cc, 0.5))).epsilon(1e-12));
}

TEST_CASE("p11 tilde for dc and cd") {
    CHECK(std::abs(p11_tilde(query(Scenario::dc, 2.0)) - 0.5 * phi_cdf(1.0)) < 1e-12);
    CHECK(p11_tilde(query(Scenario::cd, 0.0)) == doctest::Approx(0.25).epsilon(1e-12));
    const double v = p11_tilde(query(Scenario::cd, 1.0));
    CHECK(v > 0.25);
    CHECK(v < 0.5);
    CHECK_THROWS_AS(p11_tilde(query(Scenario::dd, 0.5)), TheoryError);
}

TEST_CASE("p11 tilde is stable against an independent half-line rule") {
    // exp-sinh shares no nodes with the Gauss-Kronrod rule used in the library
    boost::math::quadrature::exp_sinh<double> es;
    const double c = 1.0 / std::sqrt(2 * std::numbers::pi);
    for (int i = 0; i <= 20; ++i) {
        const double beta = 0.1 * i;
        const double cc = 0.25 + es.integrate([&](double x) { return c * std::exp(-x * x / 2) * 0.5 * std::erf(beta * x / std::numbers::sqrt2); });
        const double cd = 0.25 + es.integrate([&](double x) { return c * std::exp(-x * x / 2) * 0.5 * std::tanh(0.5 * beta * x); });
        CHECK(std::abs(p11_tilde(query(Scenario::cc, beta)) - cc) < 1e-10);
        CHECK(std::abs(p11_tilde(query(Scenario::cd, beta)) - cd) < 1e-10);
    }
}

TEST_CASE("r10 closed forms") {
    CHECK(std::abs(r10_limit(query(Scenario::cc, 1.0)) - 0.5 * std::log(2.0)) < 1e-12);
    CHECK(r10_limit(query(Scenario::cc, 0.0)) == 0.0);
    CHECK(std::abs(r10_limit(query(Scenario::dd, 0.5)) - 0.5 * std::log(4.0 / 3.0)) < 1e-12);
    CHECK(std::abs(r10_limit(query(Scenario::dc, 2.0)) - 0.5 * std::log(2.0)) < 1e-12);
    CHECK(std::isinf(r10_limit(query(Scenario::dd, 1.0))));
}

TEST_CASE("cd r10 against a Monte Carlo covariance") {
    Rng rng(99);
    const int n = 10'000'000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(-1.0, 1.0);
        const double y = rng.bernoulli(1.0 / (1.0 + std::exp(-(x + 1.0)))) ? 1.0 : 0.0;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double mx = sx / n, my = sy / n;
    const double s11 = sxx / n - mx * mx, s22 = syy / n - my * my, s12 = sxy / n - mx * my;
    const double mc = 0.5 * std::log(s11 * s22 / (s11 * s22 - s12 * s12));
    CHECK(std::abs(r10_limit(query(Scenario::cd, 1.0)) - mc) < 1e-3);
    const auto m = cd_moments(1.0, 1.0);
    CHECK(m.mean2 == doctest::Approx(0.5).epsilon(1e-12));
    // the fixed Hermite rule is an independent check at moderate slopes
    const double gh12 = normal_expectation([](double t) { return t / (1 + std::exp(-t)); }, 100);
    CHECK(m.sigma12 == doctest::Approx(gh12).epsilon(1e-12));
}

TEST_CASE("rtilde10 values and bounds") {
    CHECK(std::abs(rtilde10_limit(query(Scenario::cc, 1.0)) - 0.130812) < 1e-5);
    const double beta = 0.5;
    const double bsc = (1 + beta) / 2 * std::log(1 + beta) + (1 - beta) / 2 * std::log(1 - beta);
    CHECK(std::abs(rtilde10_limit(query(Scenario::dd, beta)) - bsc) < 1e-12);
    for (auto s : {Scenario::cc, Scenario::cd, Scenario::dc, Scenario::dd})
        CHECK(std::abs(rtilde10_limit(query(s, 0.0))) < 1e-12);
    // the bound is approached slowly: (1 - 2p) log(1/2 - p) decays like log(beta) / beta
    for (auto s : {Scenario::cc, Scenario::cd, Scenario::dc}) {
        double prev = 0;
        for (double b : {0.5, 2.0, 10.0, 100.0}) {
            const double v = rtilde10_limit(query(s, b));
            CHECK(v > prev);
            CHECK(v <= std::log(2.0));
            prev = v;
        }
        CHECK(std::abs(rtilde10_limit(query(s, 1e6)) - std::log(2.0)) < 1e-3);
    }
    // cc at beta = 10 from the orthant formula
    const double p10 = 0.25 + std::asin(10 / std::sqrt(101.0)) / (2 * std::numbers::pi);
    CHECK(std::abs(rtilde10_limit(query(Scenario::cc, 10.0)) -
                   (std::log(4.0) + 2 * p10 * std::log(p10) + (1 - 2 * p10) * std::log(0.5 - p10))) < 1e-9);
}

TEST_CASE("curves on the figure grids") {
    std::vector<double> dd_grid;
    for (int i = 0; i <= 19; ++i) dd_grid.push_back(0.05 * i);
    dd_grid.push_back(0.99);
    const auto dd = theory_curves(query(Scenario::dd, 0.0), dd_grid);
    for (std::size_t i = 1; i < dd.size(); ++i) CHECK(dd[i].r10 > dd[i - 1].r10);
    CHECK(dd.back().r10 > std::log(2.0));

    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
    for (auto s : {Scenario::cc, Scenario::cd, Scenario::dc}) {
        const auto rows = theory_curves(query(s, 0.0), grid);
        for (const auto& r : rows) {
            CHECK(r.rtilde10 <= std::log(2.0) + 1e-12);
            if (r.beta > 0) CHECK(r.r10 > r.rtilde10);
        }
    }
    for (const auto& r : dd) {
        CHECK(r.rtilde10 <= std::log(2.0) + 1e-12);
        if (r.beta > 0) CHECK(r.r10 > r.rtilde10);
    }
}

TEST_CASE("query validation") {
    CHECK_THROWS_AS(r10_limit(query(Scenario::dd, 1.5)), TheoryError);
    CHECK_THROWS_AS(r10_limit(query(Scenario::dc, 1.0, 0.3)), TheoryError);
    LimitQuery q = query(Scenario::cc, 1.0);
    q.sigma2 = 0;
    CHECK_THROWS_AS(r10_limit(q), TheoryError);
}

TEST_CASE("finite sample ratios approach the limits") {
    Rng rng(31);
    const auto cc = finite_sample_ratio_mc(query(Scenario::cc, 1.0), 100'000, 20, rng);
    CHECK(std::abs(cc.r10_mean - 0.346574) < 0.01);
    const auto dd = finite_sample_ratio_mc(query(Scenario::dd, 0.5), 100'000, 20, rng);
    CHECK(std::abs(dd.rtilde10_mean - 0.130812) < 0.01);
}

TEST_CASE("finite sample ratios under independence") {
    // the score difference carries a -log(N)/2 complexity term, so the per-row mean sits
    // just below zero rather than at it
    Rng rng(32);
    const std::size_t n = 2000;
    for (auto s : {Scenario::cc, Scenario::cd, Scenario::dc, Scenario::dd}) {
        const auto r = finite_sample_ratio_mc(query(s, 0.0), n, 20, rng);
        CHECK(r.r10_mean < 0);
        CHECK(r.r10_mean > -std::log(double(n)) / n);
        CHECK(r.rtilde10_mean < 0);
        CHECK(r.rtilde10_mean > -std::log(double(n)) / n);
    }
    CHECK_THROWS_AS(finite_sample_ratio_mc(query(Scenario::cc, 0.0), 10, 20, rng), TheoryError);
}
