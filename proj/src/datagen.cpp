#include <hbn/datagen.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace hbn::datagen {

namespace {

constexpr double kMuA2Node = -1.0;
constexpr double kMuA4Node = -3.0;
constexpr double kMuC4Node = 6.0;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Column continuous(std::string name) { return Column{std::move(name), ColumnKind::continuous, 0}; }
Column categorical(std::string name, int levels) { return Column{std::move(name), ColumnKind::categorical, levels}; }

// P(B = 1 | A, C) and P(D = 1 | A, C) for the all-discrete four-node network, indexed
// [a][c] with a in {1, 2} and c in {1, .., 4} shifted to zero-based codes.
constexpr std::array<std::array<double, 4>, 2> kProbB{{{0.05, 0.10, 0.30, 0.70}, {0.10, 0.30, 0.70, 0.95}}};
constexpr std::array<std::array<double, 4>, 2> kProbD{{{0.95, 0.90, 0.70, 0.30}, {0.90, 0.70, 0.30, 0.05}}};

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::cc: return "cc";
        case Scenario::cd: return "cd";
        case Scenario::dc: return "dc";
        case Scenario::dd: return "dd";
    }
    return "?";
}

Scenario parse_scenario(const std::string& text) {
    if (text == "cc") return Scenario::cc;
    if (text == "cd") return Scenario::cd;
    if (text == "dc") return Scenario::dc;
    if (text == "dd") return Scenario::dd;
    throw DataError("unknown scenario '" + text + "' (expected cc, cd, dc or dd)");
}

void ScenarioConfig::validate() const {
    if (node_count != 2 && node_count != 4) throw DataError("scenario node count must be 2 or 4");
    if (n_rows < 1) throw DataError("scenario needs at least one row");
    if (!(sigma1 > 0) || !(sigma2 > 0)) throw DataError("standard deviations must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("probability p must lie in [0, 1]");
    if (!std::isfinite(beta)) throw DataError("beta must be finite");
    if (scenario == Scenario::dd && node_count == 2 && !(beta >= 0.0 && beta <= 1.0))
        throw DataError("dd scenario requires beta in [0, 1]");
}

Generated gen_2node(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    if (cfg.node_count != 2) throw DataError("gen_2node needs node_count = 2");
    const bool a_discrete = cfg.scenario == Scenario::dc || cfg.scenario == Scenario::dd;
    const bool b_discrete = cfg.scenario == Scenario::cd || cfg.scenario == Scenario::dd;
    Dataset data({a_discrete ? categorical("A", 2) : continuous("A"), b_discrete ? categorical("B", 2) : continuous("B")},
                 cfg.n_rows);

    for (std::size_t r = 0; r < cfg.n_rows; ++r) {
        double a = 0.0, b = 0.0;
        switch (cfg.scenario) {
            case Scenario::cc:
                a = rng.normal(kMuA2Node, cfg.sigma1);
                b = rng.normal(cfg.beta * a, cfg.sigma2);
                break;
            case Scenario::cd:
                a = rng.normal(kMuA2Node, cfg.sigma1);
                b = rng.bernoulli(logistic(cfg.beta * (a - kMuA2Node))) ? 1.0 : 0.0;
                break;
            case Scenario::dc:
                a = rng.bernoulli(cfg.p) ? 1.0 : 0.0;
                b = rng.normal(cfg.beta * a, cfg.sigma2);
                break;
            case Scenario::dd:
                a = rng.bernoulli(cfg.p) ? 1.0 : 0.0;
                b = rng.bernoulli(a == 1.0 ? 0.5 + cfg.beta / 2 : 0.5 - cfg.beta / 2) ? 1.0 : 0.0;
                break;
        }
        data.at(r, 0) = a;
        data.at(r, 1) = b;
    }
    return {std::move(data), graph::Dag(2, {{0, 1}})};
}

Generated gen_2node(const ScenarioConfig& cfg) {
    Rng rng(cfg.seed, {2});
    return gen_2node(cfg, rng);
}

Generated gen_4node(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    if (cfg.node_count != 4) throw DataError("gen_4node needs node_count = 4");
    const bool parents_discrete = cfg.scenario == Scenario::dc || cfg.scenario == Scenario::dd;
    const bool children_discrete = cfg.scenario == Scenario::cd || cfg.scenario == Scenario::dd;
    // dc uses labels {1, 2} for A; dd draws A ~ Bernoulli(0.5) over the same two labels
    Dataset data({parents_discrete ? categorical("A", 2) : continuous("A"),
                  children_discrete ? categorical("B", 2) : continuous("B"),
                  parents_discrete ? categorical("C", 4) : continuous("C"),
                  children_discrete ? categorical("D", 2) : continuous("D")},
                 cfg.n_rows);

    for (std::size_t r = 0; r < cfg.n_rows; ++r) {
        double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
        switch (cfg.scenario) {
            case Scenario::cc:
                a = rng.normal(kMuA4Node, 1.0);
                c = rng.normal(kMuC4Node, 1.0);
                b = rng.normal(1.5 * a + 3.0 * c, 1.0);
                d = rng.normal(2.0 * a + 1.5 * c, 1.0);
                break;
            case Scenario::cd: {
                a = rng.normal(kMuA4Node, 1.0);
                c = rng.normal(kMuC4Node, 1.0);
                const double centred = a + c - kMuA4Node - kMuC4Node;
                b = rng.bernoulli(logistic(2.0 * centred)) ? 1.0 : 0.0;
                d = rng.bernoulli(logistic(-1.5 * centred)) ? 1.0 : 0.0;
                break;
            }
            case Scenario::dc: {
                a = static_cast<double>(rng.below(2));
                c = static_cast<double>(rng.below(4));
                // child means use the printed 1-based labels
                const double la = a + 1.0, lc = c + 1.0;
                b = rng.normal(1.5 * la + 3.0 * lc, 1.0);
                d = rng.normal(2.0 * la + 1.5 * lc, 1.0);
                break;
            }
            case Scenario::dd: {
                a = rng.bernoulli(0.5) ? 1.0 : 0.0;
                c = static_cast<double>(rng.below(4));
                const auto ia = static_cast<std::size_t>(a), ic = static_cast<std::size_t>(c);
                b = rng.bernoulli(kProbB[ia][ic]) ? 1.0 : 0.0;
                d = rng.bernoulli(kProbD[ia][ic]) ? 1.0 : 0.0;
                break;
            }
        }
        data.at(r, 0) = a;
        data.at(r, 1) = b;
        data.at(r, 2) = c;
        data.at(r, 3) = d;
    }
    return {std::move(data), graph::Dag(4, {{0, 1}, {2, 1}, {0, 3}, {2, 3}})};
}

Generated gen_4node(const ScenarioConfig& cfg) {
    Rng rng(cfg.seed, {4});
    return gen_4node(cfg, rng);
}

Generated generate(const ScenarioConfig& cfg, Rng& rng) {
    return cfg.node_count == 2 ? gen_2node(cfg, rng) : gen_4node(cfg, rng);
}

double quantile_sorted(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw DataError("quantile of an empty sample");
    const double h = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Dataset discretize(const Dataset& data, int q) {
    if (q < 2) throw DataError("discretize needs at least two levels");
    Dataset out = data;
    for (int c = 0; c < data.cols(); ++c) {
        if (data.column(c).kind != ColumnKind::continuous) continue;
        auto values = data.column_values(c);
        auto sorted = values;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.empty() || sorted.front() == sorted.back())
            throw DataError("column '" + data.column(c).name + "' is constant; no valid cut points");
        std::vector<double> cuts;
        for (int i = 1; i < q; ++i) cuts.push_back(quantile_sorted(sorted, static_cast<double>(i) / q));
        for (auto& v : values) {
            const double x = v;
            v = static_cast<double>(std::count_if(cuts.begin(), cuts.end(), [x](double cut) { return x > cut; }));
        }
        out.set_column(c, categorical(data.column(c).name, q), values);
    }
    return out;
}

Dataset rag_view(const Dataset& data) {
    Dataset out = data;
    for (int c = 0; c < data.cols(); ++c)
        if (data.column(c).kind == ColumnKind::categorical)
            out.set_column(c, continuous(data.column(c).name), data.column_values(c));
    return out;
}

}  // namespace hbn::datagen
