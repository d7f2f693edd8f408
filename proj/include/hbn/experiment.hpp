#ifndef HBN_EXPERIMENT_HPP
#define HBN_EXPERIMENT_HPP

#include <hbn/datagen.hpp>
#include <hbn/io.hpp>
#include <hbn/sampler.hpp>
#include <hbn/scores.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbn::cli {

namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// rag: every column scored with BGe as if continuous. disc-q: continuous columns cut at
// equal quantiles into q levels, everything scored with BDe.
struct Strategy {
    int levels = 0;  // 0 for rag

    bool is_rag() const { return levels == 0; }
    std::string name() const;
    static Strategy parse(const std::string& text);  // throws ConfigError
    bool operator==(const Strategy&) const = default;
};

// The dataset and score configuration a strategy learns from.
struct LearningView {
    datagen::Dataset data;
    scores::ScoreConfig score;
};
LearningView apply_strategy(const datagen::Dataset& raw, const Strategy& s, double alpha_mu, double ess);

struct LearnOptions {
    Strategy strategy;
    sampler::ChainConfig chain;
    double alpha_mu = 1.0;
    double ess = 1.0;
    std::optional<int> max_parents;
    scores::Blacklist blacklist;
};

sampler::PosteriorSamples learn(const datagen::Dataset& raw, const LearnOptions& opts);

struct ExperimentConfig {
    std::vector<datagen::Scenario> scenarios{datagen::Scenario::cc};
    std::vector<double> betas{1.0};
    std::vector<Strategy> strategies{Strategy{0}, Strategy{2}};
    std::size_t replicates = 20;
    std::size_t rows = 200;
    int nodes = 2;
    double sigma1 = 1.0, sigma2 = 1.0, p = 0.5;
    sampler::ChainConfig chain;
    double alpha_mu = 1.0;
    double ess = 1.0;
    std::optional<int> max_parents;
    std::optional<fs::path> blacklist;
    fs::path out = "results";
    std::uint64_t seed = 1;
    bool write_samples = true;
    unsigned threads = 0;  // 0: one per hardware thread

    void validate() const;  // throws ConfigError
};

// Keyed `name = value` lines with optional one-level [section] headers; '#' and ';' start comments.
ExperimentConfig load_config(const fs::path& path);

// Seeds of one cell. The data seed ignores the strategy so strategies see the same data.
std::uint64_t data_seed(std::uint64_t master, datagen::Scenario s, int nodes, double beta, std::size_t replicate);
std::uint64_t chain_seed(std::uint64_t master, datagen::Scenario s, int nodes, double beta, const Strategy& strategy,
                         std::size_t replicate);

struct ExperimentResult {
    std::vector<io::MetricsRow> rows;
    std::vector<fs::path> sample_files;
};

// Runs every (scenario, beta, strategy, replicate) cell; writes metrics.csv (and sample files) under cfg.out.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& metrics_name = "metrics.csv");

enum class Target { table2, table3, fig3 };
Target parse_target(const std::string& text);

struct ReproduceOptions {
    std::size_t replicates = 20;
    std::uint64_t seed = 1;
    std::uint64_t iterations = 100'000;
    fs::path out = "results";
    bool write_samples = false;
    unsigned threads = 0;
};

// Returns the written CSV paths.
std::vector<fs::path> reproduce(Target target, const ReproduceOptions& opts);

// The experiment configurations behind a table target, one per scenario.
std::vector<ExperimentConfig> table_configs(Target target, const ReproduceOptions& opts);

}  // namespace hbn::cli

#endif  // HBN_EXPERIMENT_HPP
