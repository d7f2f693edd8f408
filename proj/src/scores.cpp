#include <hbn/scores.hpp>

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace hbn::scores {

using graph::bit;

namespace {

// log of the multivariate gamma function Gamma_p(a)
double log_mvgamma(int p, double a) {
    double out = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
    for (int j = 1; j <= p; ++j) out += std::lgamma(a + 0.5 * (1 - j));
    return out;
}

std::vector<int> members(NodeMask mask) {
    std::vector<int> out;
    for (; mask; mask &= mask - 1) out.push_back(std::countr_zero(mask));
    return out;
}

double log_binomial(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace

BgeHyperparams BgeHyperparams::defaults(int n, double alpha_mu) {
    BgeHyperparams hp;
    hp.alpha_mu = alpha_mu;
    hp.alpha_w = n + alpha_mu + 1;
    hp.t = alpha_mu * (hp.alpha_w - n - 1) / (alpha_mu + 1);
    hp.nu.assign(static_cast<std::size_t>(n), 0.0);
    return hp;
}

void BgeHyperparams::validate(int n) const {
    if (!(alpha_mu > 0)) throw ScoreError("BGe: alpha_mu must be positive");
    if (!(alpha_w > n + 1)) throw ScoreError("BGe: alpha_w must exceed n + 1");
    if (!(t > 0)) throw ScoreError("BGe: t must be positive");
    if (!nu.empty() && static_cast<int>(nu.size()) != n)
        throw ScoreError("BGe: nu has the wrong dimension");
}

BgeScore::BgeScore(const Dataset& data, BgeHyperparams hp) : m_n(data.cols()), m_hp(std::move(hp)) {
    if (!data.all_continuous()) throw ScoreError("BGe requires an all-continuous view of the data");
    if (data.rows() < 1) throw ScoreError("BGe requires at least one row");
    m_hp.validate(m_n);
    if (m_hp.nu.empty()) m_hp.nu.assign(static_cast<std::size_t>(m_n), 0.0);

    const auto rows = data.rows();
    m_rows = static_cast<double>(rows);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m_n);
    for (std::size_t r = 0; r < rows; ++r)
        for (int c = 0; c < m_n; ++c) mean[c] += data.at(r, c);
    mean /= m_rows;

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(m_n, m_n);
    Eigen::VectorXd centered(m_n);
    for (std::size_t r = 0; r < rows; ++r) {
        for (int c = 0; c < m_n; ++c) centered[c] = data.at(r, c) - mean[c];
        scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered);
    }
    scatter = scatter.selfadjointView<Eigen::Lower>();

    const Eigen::VectorXd shift = mean - Eigen::Map<const Eigen::VectorXd>(m_hp.nu.data(), m_n);
    m_r = m_hp.t * Eigen::MatrixXd::Identity(m_n, m_n) + scatter +
          (m_rows * m_hp.alpha_mu / (m_rows + m_hp.alpha_mu)) * shift * shift.transpose();
}

double BgeScore::log_marginal(NodeMask subset) const {
    if (subset == 0) return 0.0;
    const auto idx = members(subset);
    const int l = static_cast<int>(idx.size());
    if (idx.back() >= m_n) throw ScoreError("BGe: subset references a missing column");

    Eigen::MatrixXd sub(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) sub(i, j) = m_r(idx[i], idx[j]);
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) throw ScoreError("BGe: R_YY is not positive definite");
    double log_det_r = 0.0;
    for (int i = 0; i < l; ++i) log_det_r += 2.0 * std::log(llt.matrixL()(i, i));

    const double n = m_rows;
    const double df = m_hp.alpha_w - m_n + l;
    return 0.5 * l * std::log(m_hp.alpha_mu / (n + m_hp.alpha_mu)) + log_mvgamma(l, 0.5 * (n + df)) -
           log_mvgamma(l, 0.5 * df) - 0.5 * l * n * std::log(std::numbers::pi) +
           0.5 * df * l * std::log(m_hp.t) - 0.5 * (n + df) * log_det_r;
}

double BgeScore::local(int node, NodeMask parents) const {
    if (parents & bit(node)) throw ScoreError("BGe: node listed among its own parents");
    return log_marginal(parents | bit(node)) - log_marginal(parents);
}

BdeScore::BdeScore(const Dataset& data, BdeHyperparams hp) : m_data(data), m_hp(hp) {
    if (!data.all_categorical()) throw ScoreError("BDe requires an all-categorical view of the data");
    if (!(hp.ess > 0)) throw ScoreError("BDe: equivalent sample size must be positive");
    try {
        m_data.validate();
    } catch (const datagen::DataError& e) {
        throw ScoreError(std::string("BDe: ") + e.what());
    }
}

double BdeScore::local(int node, NodeMask parents) const {
    if (parents & bit(node)) throw ScoreError("BDe: node listed among its own parents");
    const auto pa = members(parents);
    const int r = m_data.column(node).levels;
    double configs = 1.0;
    for (int p : pa) configs *= m_data.column(p).levels;

    const double alpha_cell = m_hp.ess / (configs * r);
    const double alpha_config = m_hp.ess / configs;

    // counts keyed by parent configuration index, laid out [config][level]
    std::unordered_map<std::size_t, std::vector<double>> counts;
    for (std::size_t row = 0; row < m_data.rows(); ++row) {
        std::size_t config = 0;
        for (int p : pa) config = config * m_data.column(p).levels + m_data.code(row, p);
        auto& cell = counts[config];
        if (cell.empty()) cell.assign(static_cast<std::size_t>(r), 0.0);
        cell[m_data.code(row, node)] += 1.0;
    }

    double score = 0.0;
    const double lg_cell = std::lgamma(alpha_cell);
    const double lg_config = std::lgamma(alpha_config);
    for (const auto& [config, cell] : counts) {
        double total = 0.0;
        for (double c : cell) {
            total += c;
            if (c > 0) score += std::lgamma(alpha_cell + c) - lg_cell;
        }
        score += lg_config - std::lgamma(alpha_config + total);
    }
    return score;
}

double bge_log_marginal(const Dataset& data, NodeMask subset, const BgeHyperparams& hp) {
    return BgeScore(data, hp).log_marginal(subset);
}

double bge_local_score(int node, NodeMask parents, const Dataset& data, const BgeHyperparams& hp) {
    return BgeScore(data, hp).local(node, parents);
}

double bde_local_score(int node, NodeMask parents, const Dataset& data, const BdeHyperparams& hp) {
    return BdeScore(data, hp).local(node, parents);
}

TwoNodeMarginals bde_two_node_marginals(const TwoByTwo& n, const std::array<double, 4>& a) {
    for (double v : a)
        if (!(v > 0)) throw ScoreError("BDe: pseudocounts must be positive");
    auto log_beta = [](double x, double y) { return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y); };
    const double total = n.n11 + n.n10 + n.n01 + n.n00;
    const double a_sum = a[0] + a[1] + a[2] + a[3];
    const double a12 = a[0] + a[1];
    const double a34 = a[2] + a[3];
    const double log_b_alpha =
        std::lgamma(a[0]) + std::lgamma(a[1]) + std::lgamma(a[2]) + std::lgamma(a[3]) - std::lgamma(a_sum);

    TwoNodeMarginals out{};
    out.log_dependent = std::lgamma(a[0] + n.n11) + std::lgamma(a[1] + n.n10) + std::lgamma(a[2] + n.n01) +
                        std::lgamma(a[3] + n.n00) - log_b_alpha - std::lgamma(a_sum + total);
    const double row1 = n.n11 + n.n10, row0 = n.n01 + n.n00;
    const double col1 = n.n11 + n.n01, col0 = n.n10 + n.n00;
    out.log_independent = -2.0 * log_beta(a12, a34) + std::lgamma(a12 + row1) + std::lgamma(a34 + row0) +
                          std::lgamma(a12 + col1) + std::lgamma(a34 + col0) - 2.0 * std::lgamma(a12 + a34 + total);
    return out;
}

std::unique_ptr<LocalScore> make_scorer(const Dataset& data, const ScoreConfig& cfg) {
    if (cfg.kind == ScoreKind::bge)
        return std::make_unique<BgeScore>(data, cfg.bge.value_or(BgeHyperparams::defaults(data.cols())));
    return std::make_unique<BdeScore>(data, cfg.bde);
}

double dag_log_score(const graph::Dag& dag, const LocalScore& scorer) {
    if (dag.node_count() != scorer.node_count()) throw ScoreError("DAG and data disagree on node count");
    double total = 0.0;
    for (int v = 0; v < dag.node_count(); ++v) total += scorer.local(v, dag.parents(v));
    return total;
}

double dag_log_score(const graph::Dag& dag, const Dataset& data, const ScoreConfig& cfg) {
    return dag_log_score(dag, *make_scorer(data, cfg));
}

ScoreTable::ScoreTable(int node_count, int max_parents, Blacklist blacklist)
    : m_n(node_count),
      m_max_parents(max_parents),
      m_blacklist(std::move(blacklist)),
      m_forbidden(static_cast<std::size_t>(node_count), 0),
      m_entries(static_cast<std::size_t>(node_count)),
      m_index(static_cast<std::size_t>(node_count)) {
    for (const auto& [from, to] : m_blacklist) {
        if (from < 0 || to < 0 || from >= m_n || to >= m_n) throw ScoreError("blacklist edge out of range");
        m_forbidden[to] |= bit(from);
    }
}

bool ScoreTable::admissible(int node, NodeMask parents) const {
    return (parents & bit(node)) == 0 && (parents & m_forbidden[node]) == 0 &&
           std::popcount(parents) <= m_max_parents && (m_n == 64 || parents < bit(m_n));
}

std::optional<double> ScoreTable::find(int node, NodeMask parents) const {
    const auto& index = m_index[node];
    auto it = index.find(parents);
    if (it == index.end()) return std::nullopt;
    return m_entries[node][it->second].score;
}

double ScoreTable::score(int node, NodeMask parents) const {
    if (auto s = find(node, parents)) return *s;
    throw ScoreError("score table has no entry for node " + std::to_string(node));
}

std::size_t ScoreTable::size() const {
    std::size_t total = 0;
    for (const auto& e : m_entries) total += e.size();
    return total;
}

void ScoreTable::insert(int node, NodeMask parents, double score) {
    if (!admissible(node, parents)) throw ScoreError("inadmissible parent set inserted into score table");
    if (!std::isfinite(score)) throw ScoreError("non-finite local score");
    auto [it, fresh] = m_index[node].emplace(parents, m_entries[node].size());
    if (fresh)
        m_entries[node].push_back({parents, score});
    else
        m_entries[node][it->second].score = score;
}

double ScoreTable::dag_score(const graph::Dag& dag) const {
    double total = 0.0;
    for (int v = 0; v < m_n; ++v) total += score(v, dag.parents(v));
    return total;
}

int default_max_parents(int node_count) { return node_count <= 8 ? std::max(node_count - 1, 0) : 3; }

namespace {

// Calls fn(mask) for every subset of `pool` with at most `cap` members.
template <typename Fn>
void for_each_subset(const std::vector<int>& pool, int cap, Fn&& fn) {
    std::vector<int> chosen;
    auto recurse = [&](auto&& self, std::size_t start, NodeMask mask) -> void {
        fn(mask);
        if (static_cast<int>(chosen.size()) == cap) return;
        for (std::size_t i = start; i < pool.size(); ++i) {
            chosen.push_back(pool[i]);
            self(self, i + 1, mask | bit(pool[i]));
            chosen.pop_back();
        }
    };
    recurse(recurse, 0, 0);
}

}  // namespace

ScoreTable build_score_table(const LocalScore& scorer, const TableOptions& options) {
    const int n = scorer.node_count();
    const int cap = options.max_parents.value_or(default_max_parents(n));
    if (cap < 0) throw ScoreError("max_parents must be nonnegative");
    ScoreTable table(n, cap, options.blacklist);

    std::vector<std::vector<int>> pools(static_cast<std::size_t>(n));
    double planned = 0.0;
    for (int v = 0; v < n; ++v) {
        for (int u = 0; u < n; ++u)
            if (u != v && !(table.forbidden_parents(v) & bit(u))) pools[v].push_back(u);
        const double m = static_cast<double>(pools[v].size());
        for (int k = 0; k <= std::min<int>(cap, static_cast<int>(m)); ++k) planned += std::exp(log_binomial(m, k));
    }
    if (planned > static_cast<double>(options.max_entries) + 0.5)
        throw ScoreError("score table would hold " + std::to_string(static_cast<long long>(planned)) +
                         " entries, above the budget of " + std::to_string(options.max_entries));

    for (int v = 0; v < n; ++v)
        for_each_subset(pools[v], cap, [&](NodeMask mask) { table.insert(v, mask, scorer.local(v, mask)); });
    return table;
}

ScoreTable build_score_table(const Dataset& data, const ScoreConfig& cfg, const TableOptions& options) {
    return build_score_table(*make_scorer(data, cfg), options);
}

}  // namespace hbn::scores
