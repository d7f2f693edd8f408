// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Criteria 7 and 8 run the full desk-scale simulation tables and take several minutes.
#include <hbn/datagen.hpp>
#include <hbn/experiment.hpp>
#include <hbn/graph.hpp>
#include <hbn/sampler.hpp>
#include <hbn/scores.hpp>
#include <hbn/theory.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

using namespace hbn;
using datagen::Scenario;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

theory::LimitQuery query(Scenario s, double beta, double p = 0.5) {
    theory::LimitQuery q;
    q.scenario = s;
    q.beta = beta;
    q.p = p;
    return q;
}

Outcome criterion1() {
    Outcome o;
    const double cc = theory::r10_limit(query(Scenario::cc, 1.0));
    const double dd = theory::r10_limit(query(Scenario::dd, 0.5));
    const double dc = theory::r10_limit(query(Scenario::dc, 2.0));
    o.require(std::abs(cc - 0.3465736) <= 1e-9 + 5e-8, "cc " + fmt("%.10f", cc));
    o.require(std::abs(dd - 0.1438410) <= 1e-9 + 5e-8, "dd " + fmt("%.10f", dd));
    o.require(std::abs(dc - 0.3465736) <= 1e-9 + 5e-8, "dc " + fmt("%.10f", dc));
    // the constants are printed to 7 decimals, so they are held to their rounding; the closed forms to 1e-9
    o.require(std::abs(cc - 0.5 * std::log(2.0)) <= 1e-9, "cc closed form");
    o.require(std::abs(dd - 0.5 * std::log(4.0 / 3.0)) <= 1e-9, "dd closed form");
    o.require(std::abs(dc - 0.5 * std::log(2.0)) <= 1e-9, "dc closed form");
    if (o.pass)
        o.detail = "cc=" + fmt("%.10f", cc) + " dd=" + fmt("%.10f", dd) + " dc=" + fmt("%.10f", dc) +
                   " (gaps to 7-decimal constants " + fmt("%.1e", std::abs(cc - 0.3465736)) + ", " +
                   fmt("%.1e", std::abs(dd - 0.1438410)) + ")";
    return o;
}

Outcome criterion2() {
    Outcome o;
    const double p11 = theory::p11_tilde(query(Scenario::cc, 1.0));
    const double oracle_p11 = 0.25 + std::asin(1.0 / std::sqrt(2.0)) / (2 * std::numbers::pi);
    const double rt_cc = theory::rtilde10_limit(query(Scenario::cc, 1.0));
    const double rt_dd = theory::rtilde10_limit(query(Scenario::dd, 0.5));
    o.require(std::abs(p11 - 0.375) <= 1e-8 && std::abs(p11 - oracle_p11) <= 1e-8, "p11 " + fmt("%.12f", p11));
    o.require(std::abs(rt_cc - 0.130812) <= 1e-5, "rtilde cc " + fmt("%.8f", rt_cc));
    o.require(std::abs(rt_dd - 0.130812) <= 1e-6, "rtilde dd " + fmt("%.8f", rt_dd));
    if (o.pass) o.detail = "p11=" + fmt("%.10f", p11) + " rtilde cc=" + fmt("%.7f", rt_cc) + " dd=" + fmt("%.7f", rt_dd);
    return o;
}

Outcome criterion3() {
    Outcome o;
    int rows = 0;
    for (auto s : {Scenario::cc, Scenario::cd, Scenario::dc, Scenario::dd}) {
        std::vector<double> grid;
        if (s == Scenario::dd)
            for (int i = 0; i <= 18; ++i) grid.push_back(0.05 * i);
        else
            for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
        for (const auto& r : theory::theory_curves(query(s, 0.0), grid)) {
            ++rows;
            const std::string at = datagen::to_string(s) + " beta=" + fmt("%g", r.beta);
            o.require(r.rtilde10 <= std::log(2.0) + 1e-12, at + " rtilde above log 2");
            if (r.beta > 0) o.require(r.r10 > r.rtilde10, at + " r10 <= rtilde10");
            else o.require(r.r10 == 0.0 && std::abs(r.rtilde10) < 1e-12, at + " nonzero at beta 0");
        }
    }
    if (o.pass) o.detail = std::to_string(rows) + " grid rows checked";
    return o;
}

Outcome criterion4() {
    Outcome o;
    std::ostringstream worst;
    double worst_gap = 0;
    for (auto s : {Scenario::cc, Scenario::cd, Scenario::dc, Scenario::dd}) {
        const std::vector<double> betas = s == Scenario::dd ? std::vector<double>{0.25, 0.5} : std::vector<double>{0.5, 1.0};
        for (double b : betas) {
            const auto q = query(s, b);
            Rng rng(2024, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(b * 1000)});
            const auto mc = theory::finite_sample_ratio_mc(q, 100'000, 20, rng);
            const double r10 = theory::r10_limit(q), rt = theory::rtilde10_limit(q);
            const double tol_r = std::max(0.01, 3 * mc.r10_stderr), tol_t = std::max(0.01, 3 * mc.rtilde10_stderr);
            const std::string at = datagen::to_string(s) + " beta=" + fmt("%g", b);
            o.require(std::abs(mc.r10_mean - r10) <= tol_r,
                      at + " r10 mc=" + fmt("%.5f", mc.r10_mean) + " limit=" + fmt("%.5f", r10));
            o.require(std::abs(mc.rtilde10_mean - rt) <= tol_t,
                      at + " rtilde10 mc=" + fmt("%.5f", mc.rtilde10_mean) + " limit=" + fmt("%.5f", rt));
            worst_gap = std::max({worst_gap, std::abs(mc.r10_mean - r10), std::abs(mc.rtilde10_mean - rt)});
        }
    }
    if (o.pass) o.detail = "largest |mc - limit| = " + fmt("%.5f", worst_gap);
    return o;
}

Outcome criterion5() {
    Outcome o;
    Rng rng(555);
    const auto data = oracle::random_gaussian(3, 15, rng);
    const auto table = scores::build_score_table(scores::BgeScore(data, scores::BgeHyperparams::defaults(3)));
    const auto dags = oracle::all_dags(3);
    o.require(dags.size() == 25, "expected 25 DAGs");
    std::vector<double> s;
    for (const auto& g : dags) s.push_back(table.dag_score(g));
    const double z = oracle::log_sum_exp(s);
    std::map<std::vector<graph::NodeMask>, double> exact;
    for (std::size_t i = 0; i < dags.size(); ++i) exact[dags[i].parent_masks()] = std::exp(s[i] - z);

    sampler::ChainConfig cfg;
    cfg.iterations = 62'500;
    cfg.burn_in_fraction = 0.2;
    cfg.seed = 77;
    auto tv_of = [&](const sampler::PosteriorSamples& ps) {
        std::map<std::vector<graph::NodeMask>, double> f;
        for (const auto& x : ps.samples) f[x.dag.parent_masks()] += 1.0 / static_cast<double>(ps.samples.size());
        return oracle::total_variation(f, exact);
    };
    const auto part = sampler::partition_mcmc(table, cfg);
    const auto structure = sampler::structure_mcmc(table, cfg);
    o.require(part.samples.size() == 50'000 && structure.samples.size() == 50'000, "kept sample count");
    const double tv_p = tv_of(part), tv_s = tv_of(structure);
    o.require(tv_p < 0.05, "partition TV " + fmt("%.4f", tv_p));
    o.require(tv_s < 0.05, "structure TV " + fmt("%.4f", tv_s));
    if (o.pass) o.detail = "TV partition=" + fmt("%.4f", tv_p) + " structure=" + fmt("%.4f", tv_s);
    return o;
}

Outcome criterion6() {
    Outcome o;
    Rng rng(666);
    double worst = 0;
    std::map<int, std::vector<graph::Dag>> dags;
    for (int n = 2; n <= 4; ++n) dags[n] = oracle::all_dags(n);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 3;
        const auto gd = oracle::random_gaussian(n, 20 + rng.below(200), rng);
        std::vector<int> levels;
        for (int i = 0; i < n; ++i) levels.push_back(2 + static_cast<int>(rng.below(3)));
        const auto cd = oracle::random_categorical(levels, 20 + rng.below(200), rng);
        const scores::BgeScore bge(gd, scores::BgeHyperparams::defaults(n));
        const scores::BdeScore bde(cd, scores::BdeHyperparams{0.5 + 3 * rng.uniform()});
        // pairs: each DAG against a random equivalent DAG
        const auto& all = dags[n];
        for (const auto& a : all) {
            std::vector<const graph::Dag*> eq;
            for (const auto& b : all)
                if (oracle::equivalent(a, b)) eq.push_back(&b);
            const auto& b = *eq[rng.below(eq.size())];
            worst = std::max(worst, std::abs(scores::dag_log_score(a, bge) - scores::dag_log_score(b, bge)));
            worst = std::max(worst, std::abs(scores::dag_log_score(a, bde) - scores::dag_log_score(b, bde)));
        }
    }
    o.require(worst < 1e-9, "equivalence gap " + fmt("%.3g", worst));

    double worst_closed = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const scores::TwoByTwo c{double(rng.below(30)), double(rng.below(30)), double(rng.below(30)),
                                 double(1 + rng.below(30))};
        const double a = 0.1 + 3 * rng.uniform();
        datagen::Dataset d({{"X1", datagen::ColumnKind::categorical, 2}, {"X2", datagen::ColumnKind::categorical, 2}},
                           static_cast<std::size_t>(c.n11 + c.n10 + c.n01 + c.n00));
        std::size_t r = 0;
        auto fill = [&](double count, int x1, int x2) {
            for (int i = 0; i < count; ++i, ++r) {
                d.at(r, 0) = x1;
                d.at(r, 1) = x2;
            }
        };
        fill(c.n11, 1, 1);
        fill(c.n10, 1, 0);
        fill(c.n01, 0, 1);
        fill(c.n00, 0, 0);
        const scores::BdeScore s(d, scores::BdeHyperparams{4 * a});
        const auto closed = scores::bde_two_node_marginals(c, {a, a, a, a});
        const double dep = s.local(0, 0) + s.local(1, graph::bit(0));
        const double ind = s.local(0, 0) + s.local(1, 0);
        worst_closed = std::max({worst_closed, std::abs(dep - closed.log_dependent) / std::max(1.0, std::abs(dep)),
                                 std::abs(ind - closed.log_independent) / std::max(1.0, std::abs(ind))});
    }
    o.require(worst_closed < 1e-12, "closed form gap " + fmt("%.3g", worst_closed));
    if (o.pass) o.detail = "equivalence gap " + fmt("%.2g", worst) + ", closed-form gap " + fmt("%.2g", worst_closed);
    return o;
}

const io::MetricsRow* find_row(const std::vector<io::MetricsRow>& rows, const std::string& scenario, double beta,
                               const std::string& strategy) {
    for (const auto& r : rows)
        if (r.scenario == scenario && r.strategy == strategy && (std::isnan(beta) || std::abs(r.beta - beta) < 1e-12))
            return &r;
    return nullptr;
}

void print_rows(const std::vector<io::MetricsRow>& rows) {
    for (const auto& r : rows)
        std::printf("    %-9s beta=%-5s %-7s shd=%.2f tp=%.2f fp=%.2f fn=%.2f tpr=%.2f fr=%s %s\n", r.scenario.c_str(),
                    io::format_double(r.beta).c_str(), r.strategy.c_str(), r.report.shd, r.report.tp, r.report.fp,
                    r.report.fn, r.report.tpr, io::format_double(r.report.fr).c_str(),
                    r.status == "ok" ? "" : r.status.c_str());
}

std::vector<io::MetricsRow> run_table(cli::Target target, const fs::path& out) {
    cli::ReproduceOptions opts;
    opts.replicates = 20;
    opts.iterations = 100'000;
    opts.seed = 20240601;
    opts.out = out;
    std::vector<io::MetricsRow> rows;
    for (const auto& cfg : cli::table_configs(target, opts)) {
        const auto part = cli::run_experiment(
            cfg, std::string(target == cli::Target::table2 ? "table2_" : "table3_") + datagen::to_string(cfg.scenarios[0]) + ".csv");
        rows.insert(rows.end(), part.rows.begin(), part.rows.end());
    }
    print_rows(rows);
    return rows;
}

Outcome criterion7(const fs::path& out) {
    Outcome o;
    const auto rows = run_table(cli::Target::table2, out);
    for (const auto& r : rows) o.require(r.status == "ok", r.scenario + " " + r.strategy + " failed");
    const auto* rag = find_row(rows, "cc", 0.5, "rag");
    const auto* disc = find_row(rows, "cc", 0.5, "disc-2");
    if (!rag || !disc) {
        o.require(false, "missing cc rows");
        return o;
    }
    o.require(rag->report.tpr >= 0.9, "(a) cc rag tpr " + fmt("%.2f", rag->report.tpr));
    o.require(disc->report.tpr >= 0.65 && disc->report.tpr <= 0.95, "(a) cc disc-2 tpr " + fmt("%.2f", disc->report.tpr));
    for (const auto& [s, mid, top] : std::vector<std::tuple<std::string, double, double>>{
             {"cc", 0.5, 2.0}, {"cd", 0.5, 2.0}, {"dc", 0.5, 2.0}, {"dd", 0.4, 0.9}}) {
        const auto* r = find_row(rows, s, mid, "rag");
        const auto* d = find_row(rows, s, mid, "disc-2");
        const auto* rt = find_row(rows, s, top, "rag");
        const auto* dt = find_row(rows, s, top, "disc-2");
        if (!r || !d || !rt || !dt) {
            o.require(false, "missing rows for " + s);
            continue;
        }
        o.require(r->report.tpr >= d->report.tpr, "(b) " + s + " rag " + fmt("%.2f", r->report.tpr) + " < disc-2 " +
                                                      fmt("%.2f", d->report.tpr));
        o.require(rt->report.tpr == 1.0 && dt->report.tpr == 1.0,
                  "(c) " + s + " top beta tpr rag " + fmt("%.2f", rt->report.tpr) + " disc-2 " + fmt("%.2f", dt->report.tpr));
    }
    if (o.pass)
        o.detail = "cc beta=0.5 tpr rag=" + fmt("%.2f", rag->report.tpr) + " disc-2=" + fmt("%.2f", disc->report.tpr);
    return o;
}

Outcome criterion8(const fs::path& out) {
    Outcome o;
    const auto rows = run_table(cli::Target::table3, out);
    for (const auto& r : rows) o.require(r.status == "ok", r.scenario + " " + r.strategy + " failed");
    const double nan = std::nan("");
    const auto* rag = find_row(rows, "cc-4node", nan, "rag");
    const auto* disc = find_row(rows, "cc-4node", nan, "disc-2");
    if (!rag || !disc) {
        o.require(false, "missing cc rows");
        return o;
    }
    o.require(rag->report.shd <= 0.5, "cc rag shd " + fmt("%.2f", rag->report.shd));
    o.require(disc->report.shd >= 3.0, "cc disc-2 shd " + fmt("%.2f", disc->report.shd));
    for (const std::string s : {"cc", "cd", "dc", "dd"}) {
        const auto* r = find_row(rows, s + "-4node", nan, "rag");
        const auto* d = find_row(rows, s + "-4node", nan, "disc-2");
        if (!r || !d) {
            o.require(false, "missing rows for " + s);
            continue;
        }
        o.require(r->report.shd < d->report.shd,
                  s + " rag shd " + fmt("%.2f", r->report.shd) + " >= disc-2 " + fmt("%.2f", d->report.shd));
    }
    if (o.pass) o.detail = "cc shd rag=" + fmt("%.2f", rag->report.shd) + " disc-2=" + fmt("%.2f", disc->report.shd);
    return o;
}

Outcome criterion9() {
    Outcome o;
    // X1..X5 are nodes 0..4
    const graph::Dag g(5, {{2, 0}, {3, 0}, {0, 1}, {4, 1}});
    const auto p = graph::dag_to_partition(g);
    o.require(p.permutation == std::vector<int>{1, 0, 2, 3, 4}, "permutation");
    o.require(p.block_sizes == std::vector<int>{1, 1, 3}, "block sizes");
    if (o.pass) o.detail = "(X2,X1,X3,X4,X5) blocks [1,1,3]";
    return o;
}

Outcome criterion10() {
    Outcome o;
    datagen::ScenarioConfig g;
    g.scenario = Scenario::cc;
    g.node_count = 4;
    g.seed = 10;
    const auto gen = datagen::gen_4node(g);
    // includes two true edges, so the sampler is pushed against the constraint
    const scores::Blacklist bl{{0, 1}, {2, 3}, {1, 0}, {3, 2}, {1, 3}};
    scores::TableOptions opts;
    opts.blacklist = bl;
    const auto table = scores::build_score_table(gen.data, scores::ScoreConfig{}, opts);
    sampler::ChainConfig cfg;
    cfg.iterations = 20'000;
    cfg.seed = 10;
    const auto s = sampler::partition_mcmc(table, cfg);
    std::size_t hits = 0;
    for (const auto& x : s.samples)
        for (const auto& [a, b] : bl) hits += x.dag.has_edge(a, b);
    o.require(!s.samples.empty(), "no samples");
    o.require(hits == 0, std::to_string(hits) + " blacklisted edges sampled");
    if (o.pass) o.detail = "0 blacklisted edges in " + std::to_string(s.samples.size()) + " samples";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    fs::path out = "acceptance_out";
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--quick") quick = true;
        else out = arg;
    }

    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, criterion1},
        {2, criterion2},
        {3, criterion3},
        {4, criterion4},
        {5, criterion5},
        {6, criterion6},
        {7, [&] { return criterion7(out); }},
        {8, [&] { return criterion8(out); }},
        {9, criterion9},
        {10, criterion10},
    };
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        if (quick && (id == 7 || id == 8)) {
            std::printf("criterion %2d: SKIP (--quick)\n", id);
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d: %s (%.1fs) %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d criteria failed\n", failed);
    return failed ? 1 : 0;
}
