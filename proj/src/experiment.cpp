#include <hbn/experiment.hpp>

#include <hbn/metrics.hpp>
#include <hbn/theory.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace hbn::cli {

using datagen::Scenario;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    try {
        return io::parse_double(text);
    } catch (const io::IoError&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
    }
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || text[0] == '-')
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config: '" + key + "' expects true or false, got '" + text + "'");
}

// Strips trailing `# ...` comments, which the ini parser keeps as part of the value.
std::string clean_value(std::string v) {
    const auto hash = v.find('#');
    if (hash != std::string::npos) v.erase(hash);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.pop_back();
    return v;
}

std::uint64_t beta_key(double beta) { return std::bit_cast<std::uint64_t>(beta == 0.0 ? 0.0 : beta); }

struct Cell {
    Scenario scenario;
    double beta;
    std::size_t strategy;
    std::size_t replicate;
};

struct CellOutcome {
    std::optional<metrics::ReplicateSummary> summary;
    std::string error;
    fs::path samples;
};

std::string cell_stem(Scenario s, int nodes, double beta, const Strategy& strategy, std::size_t rep) {
    std::string stem = datagen::to_string(s) + "_n" + std::to_string(nodes);
    if (nodes == 2) stem += "_b" + io::format_double(beta);
    return stem + "_" + strategy.name() + "_r" + std::to_string(rep);
}

}  // namespace

std::string Strategy::name() const { return is_rag() ? "rag" : "disc-" + std::to_string(levels); }

Strategy Strategy::parse(const std::string& text) {
    if (text == "rag") return Strategy{0};
    if (text.rfind("disc-", 0) == 0) {
        const std::string digits = text.substr(5);
        if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 4) {
            const int q = std::stoi(digits);
            if (q >= 2) return Strategy{q};
        }
    }
    throw ConfigError("unknown strategy '" + text + "' (expected rag or disc-q with q >= 2)");
}

LearningView apply_strategy(const datagen::Dataset& raw, const Strategy& s, double alpha_mu, double ess) {
    LearningView v;
    if (s.is_rag()) {
        v.data = datagen::rag_view(raw);
        v.score.kind = scores::ScoreKind::bge;
        v.score.bge = scores::BgeHyperparams::defaults(raw.cols(), alpha_mu);
    } else {
        v.data = datagen::discretize(raw, s.levels);
        v.score.kind = scores::ScoreKind::bde;
        v.score.bde.ess = ess;
    }
    return v;
}

sampler::PosteriorSamples learn(const datagen::Dataset& raw, const LearnOptions& opts) {
    const auto view = apply_strategy(raw, opts.strategy, opts.alpha_mu, opts.ess);
    scores::TableOptions table_opts;
    table_opts.max_parents = opts.max_parents;
    table_opts.blacklist = opts.blacklist;
    const auto table = scores::build_score_table(view.data, view.score, table_opts);
    return sampler::partition_mcmc(table, opts.chain);
}

void ExperimentConfig::validate() const {
    if (scenarios.empty()) throw ConfigError("no scenarios given");
    if (strategies.empty()) throw ConfigError("no strategies given");
    if (nodes != 2 && nodes != 4) throw ConfigError("nodes must be 2 or 4");
    if (nodes == 2 && betas.empty()) throw ConfigError("no beta values given");
    if (replicates == 0) throw ConfigError("replicates must be positive");
    if (rows < 2) throw ConfigError("rows must be at least 2");
    if (!(alpha_mu > 0)) throw ConfigError("alpha_mu must be positive");
    if (!(ess > 0)) throw ConfigError("ess must be positive");
    if (max_parents && *max_parents < 0) throw ConfigError("max_parents must be non-negative");
    try {
        chain.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    for (const auto& s : strategies)
        if (std::count(strategies.begin(), strategies.end(), s) > 1)
            throw ConfigError("strategy '" + s.name() + "' listed twice");
    for (auto sc : scenarios) {
        for (double b : nodes == 2 ? betas : std::vector<double>{0.0}) {
            datagen::ScenarioConfig g{sc, nodes, b, sigma1, sigma2, p, rows, 0};
            try {
                g.validate();
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (blacklist && !fs::exists(*blacklist)) throw ConfigError("blacklist file not found: " + blacklist->string());
}

ExperimentConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig cfg;
    auto apply = [&](const std::string& key, const std::string& raw) {
        const std::string v = clean_value(raw);
        if (key == "seed") cfg.seed = to_uint(key, v);
        else if (key == "replicates") cfg.replicates = to_uint(key, v);
        else if (key == "rows") cfg.rows = to_uint(key, v);
        else if (key == "nodes") cfg.nodes = static_cast<int>(to_uint(key, v));
        else if (key == "out") cfg.out = v;
        else if (key == "blacklist") cfg.blacklist = v.empty() ? std::nullopt : std::optional<fs::path>(v);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(to_uint(key, v));
        else if (key == "write_samples") cfg.write_samples = to_bool(key, v);
        else if (key == "scenarios") {
            cfg.scenarios.clear();
            for (const auto& s : split_list(v)) {
                try {
                    cfg.scenarios.push_back(datagen::parse_scenario(s));
                } catch (const std::exception& e) {
                    throw ConfigError(std::string("config: ") + e.what());
                }
            }
        } else if (key == "betas") {
            cfg.betas.clear();
            for (const auto& s : split_list(v)) cfg.betas.push_back(to_double(key, s));
        } else if (key == "strategies") {
            cfg.strategies.clear();
            for (const auto& s : split_list(v)) cfg.strategies.push_back(Strategy::parse(s));
        } else if (key == "chain.iterations") cfg.chain.iterations = to_uint(key, v);
        else if (key == "chain.burn_in") cfg.chain.burn_in_fraction = to_double(key, v);
        else if (key == "chain.thinning") cfg.chain.thinning = to_uint(key, v);
        else if (key == "chain.split") cfg.chain.moves.split = to_double(key, v);
        else if (key == "chain.merge") cfg.chain.moves.merge = to_double(key, v);
        else if (key == "chain.relocate") cfg.chain.moves.relocate = to_double(key, v);
        else if (key == "chain.swap") cfg.chain.moves.swap = to_double(key, v);
        else if (key == "scenario.sigma1") cfg.sigma1 = to_double(key, v);
        else if (key == "scenario.sigma2") cfg.sigma2 = to_double(key, v);
        else if (key == "scenario.p") cfg.p = to_double(key, v);
        else if (key == "bge.alpha_mu") cfg.alpha_mu = to_double(key, v);
        else if (key == "bde.ess") cfg.ess = to_double(key, v);
        else if (key == "table.max_parents") cfg.max_parents = static_cast<int>(to_uint(key, v));
        else throw ConfigError("config: unknown key '" + key + "'");
    };
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            apply(name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) {
            if (!leaf.empty()) throw ConfigError("config: nested sections are not supported");
            apply(name + "." + key, leaf.data());
        }
    }
    if (cfg.blacklist && cfg.blacklist->is_relative()) cfg.blacklist = path.parent_path() / *cfg.blacklist;
    cfg.validate();
    return cfg;
}

std::uint64_t data_seed(std::uint64_t master, Scenario s, int nodes, double beta, std::size_t replicate) {
    return derive_seed(master, {1, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(nodes), beta_key(beta),
                                replicate});
}

std::uint64_t chain_seed(std::uint64_t master, Scenario s, int nodes, double beta, const Strategy& strategy,
                         std::size_t replicate) {
    return derive_seed(master, {2, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(nodes), beta_key(beta),
                                static_cast<std::uint64_t>(strategy.levels), replicate});
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& metrics_name) {
    cfg.validate();
    const std::vector<double> betas = cfg.nodes == 2 ? cfg.betas : std::vector<double>{std::nan("")};

    std::vector<Cell> cells;
    for (auto sc : cfg.scenarios)
        for (double b : betas)
            for (std::size_t s = 0; s < cfg.strategies.size(); ++s)
                for (std::size_t r = 0; r < cfg.replicates; ++r) cells.push_back({sc, b, s, r});

    const std::vector<std::string> names =
        cfg.nodes == 2 ? std::vector<std::string>{"A", "B"} : std::vector<std::string>{"A", "B", "C", "D"};
    scores::Blacklist blacklist;
    if (cfg.blacklist) blacklist = io::load_blacklist(*cfg.blacklist, names);

    std::vector<CellOutcome> outcomes(cells.size());
    auto run_cell = [&](std::size_t i) {
        const Cell& c = cells[i];
        const Strategy& strategy = cfg.strategies[c.strategy];
        const double beta = cfg.nodes == 2 ? c.beta : 0.0;
        CellOutcome& out = outcomes[i];
        try {
            datagen::ScenarioConfig g{c.scenario, cfg.nodes, beta, cfg.sigma1, cfg.sigma2, cfg.p, cfg.rows, 0};
            Rng data_rng(data_seed(cfg.seed, c.scenario, cfg.nodes, beta, c.replicate));
            const auto gen = datagen::generate(g, data_rng);

            LearnOptions opts;
            opts.strategy = strategy;
            opts.chain = cfg.chain;
            opts.chain.seed = chain_seed(cfg.seed, c.scenario, cfg.nodes, beta, strategy, c.replicate);
            opts.alpha_mu = cfg.alpha_mu;
            opts.ess = cfg.ess;
            opts.max_parents = cfg.max_parents;
            opts.blacklist = blacklist;
            const auto samples = learn(gen.data, opts);

            if (cfg.write_samples) {
                out.samples = cfg.out / "samples" / (cell_stem(c.scenario, cfg.nodes, beta, strategy, c.replicate) + ".jsonl");
                io::write_samples(samples, names, out.samples, opts.chain.seed);
            }
            out.summary = metrics::summarize_replicate(samples, gen.truth);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    };

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cells.size()));
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
            });
    }

    ExperimentResult result;
    const std::size_t per_row = cfg.replicates;
    for (std::size_t start = 0; start < cells.size(); start += per_row) {
        const Cell& c = cells[start];
        io::MetricsRow row;
        row.scenario = datagen::to_string(c.scenario) + (cfg.nodes == 4 ? "-4node" : "");
        row.beta = c.beta;
        row.strategy = cfg.strategies[c.strategy].name();
        std::vector<metrics::ReplicateSummary> summaries;
        std::string first_error;
        std::size_t failures = 0;
        for (std::size_t i = start; i < start + per_row; ++i) {
            if (!outcomes[i].samples.empty()) result.sample_files.push_back(outcomes[i].samples);
            if (outcomes[i].summary) summaries.push_back(*outcomes[i].summary);
            else if (failures++ == 0) first_error = outcomes[i].error;
        }
        if (failures > 0) {
            row.status = "error: " + std::to_string(failures) + " of " + std::to_string(per_row) +
                         " replicates failed: " + first_error;
            row.report.replicates = summaries.size();
            row.report.tp = row.report.fp = row.report.fn = row.report.tpr = row.report.shd = row.report.fr =
                std::nan("");
        } else {
            row.report = metrics::pool_summaries(summaries);
        }
        result.rows.push_back(std::move(row));
    }
    io::atomic_write(cfg.out / metrics_name, io::metrics_csv(result.rows, cfg.seed));
    return result;
}

Target parse_target(const std::string& text) {
    if (text == "table2") return Target::table2;
    if (text == "table3") return Target::table3;
    if (text == "fig3") return Target::fig3;
    throw ConfigError("unknown reproduction target '" + text + "' (expected table2, table3 or fig3)");
}

std::vector<ExperimentConfig> table_configs(Target target, const ReproduceOptions& opts) {
    std::vector<ExperimentConfig> out;
    for (auto sc : {Scenario::cc, Scenario::cd, Scenario::dc, Scenario::dd}) {
        ExperimentConfig cfg;
        cfg.scenarios = {sc};
        cfg.replicates = opts.replicates;
        cfg.rows = 200;
        cfg.seed = opts.seed;
        cfg.chain.iterations = opts.iterations;
        cfg.out = opts.out;
        cfg.write_samples = opts.write_samples;
        cfg.threads = opts.threads;
        if (target == Target::table2) {
            cfg.nodes = 2;
            cfg.strategies = {Strategy{0}, Strategy{2}};
            if (sc == Scenario::dd) {
                cfg.betas = {0.1, 0.25, 0.4, 0.6, 0.75, 0.9};
                cfg.p = 0.1;
            } else {
                cfg.betas = {0.05, 0.1, 0.5, 1.0, 1.5, 2.0};
                cfg.p = 0.5;
            }
        } else if (target == Target::table3) {
            cfg.nodes = 4;
            // with every column already categorical, higher-q discretisation changes nothing
            if (sc == Scenario::dd) cfg.strategies = {Strategy{0}, Strategy{2}};
            else cfg.strategies = {Strategy{0}, Strategy{2}, Strategy{4}};
        } else {
            throw ConfigError("fig3 has no experiment configuration");
        }
        out.push_back(std::move(cfg));
    }
    return out;
}

std::vector<fs::path> reproduce(Target target, const ReproduceOptions& opts) {
    if (target == Target::fig3) {
        std::vector<fs::path> written;
        for (auto sc : {Scenario::cc, Scenario::cd, Scenario::dc, Scenario::dd}) {
            std::vector<double> grid;
            if (sc == Scenario::dd) {
                for (int i = 0; i <= 19; ++i) grid.push_back(0.05 * i);
                grid.push_back(0.99);
            } else {
                for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
            }
            theory::LimitQuery q;
            q.scenario = sc;
            const auto rows = theory::theory_curves(q, grid);
            const fs::path path = opts.out / ("fig3_" + datagen::to_string(sc) + ".csv");
            io::atomic_write(path, io::curves_csv(rows, "scenario=" + datagen::to_string(sc) +
                                                            " sigma1=1 sigma2=1 p=0.5 seed=" + std::to_string(opts.seed)));
            written.push_back(path);
        }
        return written;
    }

    const std::string name = target == Target::table2 ? "table2" : "table3";
    std::vector<io::MetricsRow> rows;
    for (const auto& cfg : table_configs(target, opts)) {
        const auto part = run_experiment(cfg, "." + name + "_" + datagen::to_string(cfg.scenarios[0]) + ".csv");
        fs::remove(cfg.out / ("." + name + "_" + datagen::to_string(cfg.scenarios[0]) + ".csv"));
        rows.insert(rows.end(), part.rows.begin(), part.rows.end());
    }
    const fs::path path = opts.out / (name + ".csv");
    io::atomic_write(path, io::metrics_csv(rows, opts.seed));
    return {path};
}

}  // namespace hbn::cli
