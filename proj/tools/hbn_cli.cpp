#include <hbn/datagen.hpp>
#include <hbn/experiment.hpp>
#include <hbn/io.hpp>
#include <hbn/metrics.hpp>
#include <hbn/theory.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace hbn;

namespace {

std::vector<double> beta_grid(const std::vector<double>& betas, double from, double to, double step) {
    if (!betas.empty()) return betas;
    if (!(step > 0) || to < from) throw std::runtime_error("need --beta or a valid --from/--to/--step grid");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(from + step * static_cast<double>(i));
    return out;
}

void print_report(const std::string& label, const metrics::EvalReport& r) {
    std::printf("%-12s replicates=%zu shd=%.3f tp=%.3f fp=%.3f fn=%.3f tpr=%.3f fr=%s\n", label.c_str(), r.replicates,
                r.shd, r.tp, r.fp, r.fn, r.tpr, io::format_double(r.fr).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure learning for mixed continuous/discrete Bayesian networks"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset and its true DAG");
    std::string sim_scenario = "cc";
    double sim_beta = 1.0, sim_sigma1 = 1.0, sim_sigma2 = 1.0, sim_p = 0.5;
    int sim_nodes = 2;
    std::size_t sim_rows = 200;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "data";
    sim->add_option("--scenario", sim_scenario, "cc, cd, dc or dd")->capture_default_str();
    sim->add_option("--beta", sim_beta, "Dependence strength (two-node networks)")->capture_default_str();
    sim->add_option("--nodes", sim_nodes, "2 or 4")->capture_default_str();
    sim->add_option("--rows", sim_rows, "Number of observations")->capture_default_str();
    sim->add_option("--sigma1", sim_sigma1)->capture_default_str();
    sim->add_option("--sigma2", sim_sigma2)->capture_default_str();
    sim->add_option("--p", sim_p, "Bernoulli parent probability")->capture_default_str();
    sim->add_option("--seed", sim_seed)->capture_default_str();
    sim->add_option("--out", sim_out, "Output directory (data.csv, data.schema.json, truth.csv, truth.nodes)")
        ->capture_default_str();

    // learn
    auto* lrn = app.add_subcommand("learn", "Sample DAGs from the posterior with partition MCMC");
    std::string lrn_data, lrn_schema, lrn_blacklist, lrn_out = "samples.jsonl", lrn_strategy = "rag";
    std::uint64_t lrn_seed = 1, lrn_iterations = 100'000, lrn_thinning = 1;
    double lrn_burn = 0.2, lrn_alpha_mu = 1.0, lrn_ess = 1.0;
    int lrn_max_parents = -1;
    lrn->add_option("data", lrn_data, "Data CSV")->required();
    lrn->add_option("--schema", lrn_schema, "Schema JSON (default: <data>.schema.json)");
    lrn->add_option("--strategy", lrn_strategy, "rag or disc-q")->capture_default_str();
    lrn->add_option("--iterations", lrn_iterations)->capture_default_str();
    lrn->add_option("--burn-in", lrn_burn, "Fraction of iterations discarded")->capture_default_str();
    lrn->add_option("--thinning", lrn_thinning)->capture_default_str();
    lrn->add_option("--seed", lrn_seed)->capture_default_str();
    lrn->add_option("--blacklist", lrn_blacklist, "CSV of forbidden edges (from,to)");
    lrn->add_option("--max-parents", lrn_max_parents, "Parent-set size cap (default depends on node count)");
    lrn->add_option("--alpha-mu", lrn_alpha_mu, "BGe alpha_mu")->capture_default_str();
    lrn->add_option("--ess", lrn_ess, "BDe equivalent sample size")->capture_default_str();
    lrn->add_option("--out", lrn_out, "Samples JSON-lines file")->capture_default_str();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Score posterior samples against a true DAG");
    std::vector<std::string> ev_samples;
    std::string ev_truth, ev_out, ev_label = "samples";
    std::uint64_t ev_seed = 0;
    ev->add_option("samples", ev_samples, "Samples JSON-lines files, one per replicate")->required();
    ev->add_option("--truth", ev_truth, "True DAG edge list (with .nodes sidecar)")->required();
    ev->add_option("--strategy", ev_label, "Label for the metrics row")->capture_default_str();
    ev->add_option("--seed", ev_seed, "Seed recorded in the metrics header")->capture_default_str();
    ev->add_option("--out", ev_out, "Metrics CSV (default: print only)");

    // theory
    auto* th = app.add_subcommand("theory", "Limiting log posterior ratios for the two-node scenarios");
    std::string th_scenario = "cc", th_out;
    std::vector<double> th_betas;
    double th_from = 0, th_to = 2, th_step = 0.1, th_sigma1 = 1, th_sigma2 = 1, th_p = 0.5;
    std::size_t th_mc_rows = 0, th_mc_reps = 20;
    std::uint64_t th_seed = 1;
    th->add_option("--scenario", th_scenario)->capture_default_str();
    th->add_option("--beta", th_betas, "Beta values (overrides the grid)");
    th->add_option("--from", th_from)->capture_default_str();
    th->add_option("--to", th_to)->capture_default_str();
    th->add_option("--step", th_step)->capture_default_str();
    th->add_option("--sigma1", th_sigma1)->capture_default_str();
    th->add_option("--sigma2", th_sigma2)->capture_default_str();
    th->add_option("--p", th_p)->capture_default_str();
    th->add_option("--mc-rows", th_mc_rows, "Also estimate the finite-sample ratios with this many rows");
    th->add_option("--replicates", th_mc_reps, "Replications for the finite-sample estimate")->capture_default_str();
    th->add_option("--seed", th_seed)->capture_default_str();
    th->add_option("--out", th_out, "Curve CSV (default: stdout)");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Run the published simulation layouts or a config file");
    std::string rep_target, rep_config, rep_out = "results";
    std::size_t rep_replicates = 20;
    std::uint64_t rep_seed = 1, rep_iterations = 100'000;
    unsigned rep_threads = 0;
    bool rep_samples = false;
    auto* target_opt = rep->add_option("target", rep_target, "table2, table3 or fig3");
    auto* config_opt = rep->add_option("--config", rep_config, "Experiment config file");
    target_opt->excludes(config_opt);
    rep->add_option("--replicates", rep_replicates)->capture_default_str();
    rep->add_option("--seed", rep_seed)->capture_default_str();
    rep->add_option("--iterations", rep_iterations)->capture_default_str();
    rep->add_option("--threads", rep_threads, "Worker threads (0: all cores)")->capture_default_str();
    rep->add_flag("--samples", rep_samples, "Also write per-replicate sample files");
    rep->add_option("--out", rep_out, "Output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            datagen::ScenarioConfig cfg;
            cfg.scenario = datagen::parse_scenario(sim_scenario);
            cfg.node_count = sim_nodes;
            cfg.beta = sim_beta;
            cfg.sigma1 = sim_sigma1;
            cfg.sigma2 = sim_sigma2;
            cfg.p = sim_p;
            cfg.n_rows = sim_rows;
            cfg.seed = sim_seed;
            cfg.validate();
            Rng rng(sim_seed, {3});
            const auto gen = datagen::generate(cfg, rng);
            const fs::path dir = sim_out;
            const std::string comment = "seed=" + std::to_string(sim_seed) + " scenario=" + sim_scenario +
                                        " beta=" + io::format_double(sim_beta);
            io::write_dataset(gen.data, dir / "data.csv", dir / "data.schema.json", comment);
            io::write_dag(gen.truth, gen.data.names(), dir / "truth.csv", comment);
            std::cout << "wrote " << (dir / "data.csv").string() << " and " << (dir / "truth.csv").string() << "\n";
        } else if (*lrn) {
            const fs::path data_path = lrn_data;
            const fs::path schema = lrn_schema.empty() ? io::default_schema_path(data_path) : fs::path(lrn_schema);
            const auto data = io::read_dataset(data_path, schema);
            cli::LearnOptions opts;
            opts.strategy = cli::Strategy::parse(lrn_strategy);
            opts.chain.iterations = lrn_iterations;
            opts.chain.burn_in_fraction = lrn_burn;
            opts.chain.thinning = lrn_thinning;
            opts.chain.seed = lrn_seed;
            opts.alpha_mu = lrn_alpha_mu;
            opts.ess = lrn_ess;
            if (lrn_max_parents >= 0) opts.max_parents = lrn_max_parents;
            if (!lrn_blacklist.empty()) opts.blacklist = io::load_blacklist(lrn_blacklist, data.names());
            const auto samples = cli::learn(data, opts);
            io::write_samples(samples, data.names(), lrn_out, lrn_seed);
            std::printf("wrote %zu samples to %s (acceptance rate %.3f)\n", samples.samples.size(), lrn_out.c_str(),
                        samples.acceptance_rate());
        } else if (*ev) {
            std::vector<std::string> names;
            const auto truth = io::read_dag(ev_truth, &names);
            std::vector<metrics::ReplicateSummary> summaries;
            for (const auto& path : ev_samples)
                summaries.push_back(metrics::summarize_replicate(io::read_samples(path, names), truth));
            io::MetricsRow row;
            row.scenario = "custom";
            row.beta = std::nan("");
            row.strategy = ev_label;
            row.report = metrics::pool_summaries(summaries);
            print_report(ev_label, row.report);
            if (!ev_out.empty()) io::atomic_write(ev_out, io::metrics_csv({row}, ev_seed));
        } else if (*th) {
            theory::LimitQuery q;
            q.scenario = datagen::parse_scenario(th_scenario);
            q.sigma1 = th_sigma1;
            q.sigma2 = th_sigma2;
            q.p = th_p;
            const auto grid = beta_grid(th_betas, th_from, th_to, th_step);
            const auto rows = theory::theory_curves(q, grid);
            const std::string comment = "scenario=" + th_scenario + " sigma1=" + io::format_double(th_sigma1) +
                                        " sigma2=" + io::format_double(th_sigma2) + " p=" + io::format_double(th_p);
            const std::string csv = io::curves_csv(rows, comment);
            if (th_out.empty()) std::cout << csv;
            else io::atomic_write(th_out, csv);
            if (th_mc_rows > 0) {
                for (double b : grid) {
                    q.beta = b;
                    Rng rng(th_seed, {5, static_cast<std::uint64_t>(q.scenario)});
                    const auto mc = theory::finite_sample_ratio_mc(q, th_mc_rows, th_mc_reps, rng);
                    std::printf("beta=%g finite-sample r10=%.6f (se %.6f) rtilde10=%.6f (se %.6f)\n", b, mc.r10_mean,
                                mc.r10_stderr, mc.rtilde10_mean, mc.rtilde10_stderr);
                }
            }
        } else if (*rep) {
            if (!rep_config.empty()) {
                auto cfg = cli::load_config(rep_config);
                if (rep->count("--seed")) cfg.seed = rep_seed;
                if (rep->count("--replicates")) cfg.replicates = rep_replicates;
                if (rep->count("--iterations")) cfg.chain.iterations = rep_iterations;
                if (rep->count("--out")) cfg.out = rep_out;
                if (rep->count("--threads")) cfg.threads = rep_threads;
                const auto result = cli::run_experiment(cfg);
                std::size_t failed = 0;
                for (const auto& r : result.rows) failed += r.status != "ok";
                std::cout << "wrote " << (cfg.out / "metrics.csv").string() << " (" << result.rows.size() << " rows, "
                          << failed << " failed)\n";
                return failed ? 3 : 0;
            }
            if (rep_target.empty()) throw std::runtime_error("reproduce needs a target or --config");
            cli::ReproduceOptions opts;
            opts.replicates = rep_replicates;
            opts.seed = rep_seed;
            opts.iterations = rep_iterations;
            opts.out = rep_out;
            opts.write_samples = rep_samples;
            opts.threads = rep_threads;
            for (const auto& p : cli::reproduce(cli::parse_target(rep_target), opts))
                std::cout << "wrote " << p.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
