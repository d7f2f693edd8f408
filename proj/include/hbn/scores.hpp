#ifndef HBN_SCORES_HPP
#define HBN_SCORES_HPP

#include <hbn/dataset.hpp>
#include <hbn/graph.hpp>

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace hbn::scores {

using graph::NodeMask;
using datagen::Dataset;

class ScoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Normal-Wishart prior: W ~ Wishart(T^{-1}, alpha_w), mu | W ~ N(nu, (alpha_mu W)^{-1}), T = t I.
struct BgeHyperparams {
    double alpha_mu = 1.0;
    double alpha_w = 0.0;
    std::vector<double> nu;  // empty means all zeros
    double t = 0.0;

    // alpha_mu = 1, alpha_w = n + alpha_mu + 1, t = alpha_mu (alpha_w - n - 1) / (alpha_mu + 1).
    static BgeHyperparams defaults(int n, double alpha_mu = 1.0);
    void validate(int n) const;
};

// Equivalent sample size spread uniformly over the joint cells of each family.
struct BdeHyperparams {
    double ess = 1.0;
};

enum class ScoreKind { bge, bde };

struct ScoreConfig {
    ScoreKind kind = ScoreKind::bge;
    std::optional<BgeHyperparams> bge;  // defaults(n) when unset
    BdeHyperparams bde;
};

// Decomposable log local score of a node given a parent set.
class LocalScore {
public:
    virtual ~LocalScore() = default;
    virtual int node_count() const = 0;
    virtual double local(int node, NodeMask parents) const = 0;
};

class BgeScore final : public LocalScore {
public:
    // Requires every column to be continuous.
    BgeScore(const Dataset& data, BgeHyperparams hp);

    int node_count() const override { return m_n; }
    double local(int node, NodeMask parents) const override;

    // log P(X^Y); the empty subset has log marginal 0.
    double log_marginal(NodeMask subset) const;

    const Eigen::MatrixXd& posterior_scale() const { return m_r; }

private:
    int m_n = 0;
    double m_rows = 0;
    BgeHyperparams m_hp;
    Eigen::MatrixXd m_r;  // T + S_N + (N alpha_mu / (N + alpha_mu)) (xbar - nu)(xbar - nu)^T
};

class BdeScore final : public LocalScore {
public:
    // Requires every column to be categorical with valid level codes.
    BdeScore(const Dataset& data, BdeHyperparams hp);

    int node_count() const override { return m_data.cols(); }
    double local(int node, NodeMask parents) const override;

private:
    Dataset m_data;
    BdeHyperparams m_hp;
};

double bge_log_marginal(const Dataset& data, NodeMask subset, const BgeHyperparams& hp);
double bge_local_score(int node, NodeMask parents, const Dataset& data, const BgeHyperparams& hp);
double bde_local_score(int node, NodeMask parents, const Dataset& data, const BdeHyperparams& hp);

// 2x2 table of a binary pair, cells ordered (1,1), (1,0), (0,1), (0,0).
struct TwoByTwo {
    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
};

struct TwoNodeMarginals {
    double log_dependent;    // log P(X | X1 -> X2)
    double log_independent;  // log P(X | empty graph)
};

// Closed-form Dirichlet marginals of the dependent and independent two-node graphs with
// per-cell pseudocounts alpha, cells in the same order as TwoByTwo.
TwoNodeMarginals bde_two_node_marginals(const TwoByTwo& counts, const std::array<double, 4>& alpha);

// Throws ScoreError when the data's column kinds do not match the scorer.
std::unique_ptr<LocalScore> make_scorer(const Dataset& data, const ScoreConfig& cfg);

double dag_log_score(const graph::Dag& dag, const LocalScore& scorer);
double dag_log_score(const graph::Dag& dag, const Dataset& data, const ScoreConfig& cfg);

using Blacklist = std::set<graph::Edge>;

struct TableOptions {
    std::optional<int> max_parents;  // unlimited for n <= 8, else 3
    Blacklist blacklist;
    std::size_t max_entries = 20'000'000;
};

// Local scores for every admissible (node, parent set) pair.
class ScoreTable {
public:
    struct Entry {
        NodeMask parents;
        double score;
    };

    ScoreTable() = default;
    ScoreTable(int node_count, int max_parents, Blacklist blacklist);

    int node_count() const { return m_n; }
    int max_parents() const { return m_max_parents; }
    const Blacklist& blacklist() const { return m_blacklist; }

    // Parents that may never point into `node`.
    NodeMask forbidden_parents(int node) const { return m_forbidden[node]; }
    bool admissible(int node, NodeMask parents) const;

    const std::vector<Entry>& entries(int node) const { return m_entries[node]; }
    std::optional<double> find(int node, NodeMask parents) const;
    double score(int node, NodeMask parents) const;  // throws ScoreError if absent
    std::size_t size() const;

    void insert(int node, NodeMask parents, double score);

    // Sum of table entries for the DAG's families; throws when a family is inadmissible.
    double dag_score(const graph::Dag& dag) const;

private:
    int m_n = 0;
    int m_max_parents = 0;
    Blacklist m_blacklist;
    std::vector<NodeMask> m_forbidden;
    std::vector<std::vector<Entry>> m_entries;
    std::vector<std::unordered_map<NodeMask, std::size_t>> m_index;
};

int default_max_parents(int node_count);

ScoreTable build_score_table(const LocalScore& scorer, const TableOptions& options = {});
ScoreTable build_score_table(const Dataset& data, const ScoreConfig& cfg, const TableOptions& options = {});

}  // namespace hbn::scores

#endif  // HBN_SCORES_HPP
