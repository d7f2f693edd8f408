#ifndef HBN_DATAGEN_HPP
#define HBN_DATAGEN_HPP

#include <hbn/dataset.hpp>
#include <hbn/graph.hpp>
#include <hbn/rng.hpp>

#include <cstdint>
#include <string>
#include <utility>

namespace hbn::datagen {

// cc: both continuous, cd: continuous parent / binary child, dc: binary parent /
// continuous child, dd: both discrete.
enum class Scenario { cc, cd, dc, dd };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& text);  // throws DataError

struct ScenarioConfig {
    Scenario scenario = Scenario::cc;
    int node_count = 2;
    double beta = 1.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double p = 0.5;
    std::size_t n_rows = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Generated {
    Dataset data;
    graph::Dag truth;
};

// Two-node network A -> B:
//   cc: A ~ N(-1, sigma1^2),  B | a ~ N(beta a, sigma2^2)
//   cd: A ~ N(-1, sigma1^2),  B | a ~ Bernoulli(logistic(beta (a + 1)))
//   dc: A ~ Bernoulli(p),     B | a ~ N(beta a, sigma2^2)
//   dd: A ~ Bernoulli(p),     B | A=1 ~ Bernoulli(1/2 + beta/2), B | A=0 ~ Bernoulli(1/2 - beta/2)
Generated gen_2node(const ScenarioConfig& cfg, Rng& rng);
Generated gen_2node(const ScenarioConfig& cfg);

// Four-node network A -> B <- C, A -> D <- C with columns A, B, C, D.
Generated gen_4node(const ScenarioConfig& cfg, Rng& rng);
Generated gen_4node(const ScenarioConfig& cfg);

Generated generate(const ScenarioConfig& cfg, Rng& rng);

// Type-7 sample quantile of sorted values at probability `prob`.
double quantile_sorted(const std::vector<double>& sorted, double prob);

// Cuts every continuous column at its empirical i/q quantiles; a value equal to a cut lands
// in the lower bin. Categorical columns pass through.
Dataset discretize(const Dataset& data, int q);

// All columns re-kinded continuous; categorical codes become reals unchanged.
Dataset rag_view(const Dataset& data);

}  // namespace hbn::datagen

#endif  // HBN_DATAGEN_HPP
