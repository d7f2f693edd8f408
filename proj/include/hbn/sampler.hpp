#ifndef HBN_SAMPLER_HPP
#define HBN_SAMPLER_HPP

#include <hbn/graph.hpp>
#include <hbn/rng.hpp>
#include <hbn/scores.hpp>

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace hbn::sampler {

using graph::Dag;
using graph::NodeMask;
using graph::OrderedPartition;
using scores::ScoreTable;

// Relative frequencies of the partition moves; only moves available at the current state
// compete, so the weights are renormalised per state.
struct MoveWeights {
    double split = 0.25;
    double merge = 0.25;
    double relocate = 0.3;
    double swap = 0.2;
};

struct ChainConfig {
    std::uint64_t iterations = 100'000;
    double burn_in_fraction = 0.2;
    std::uint64_t thinning = 1;
    std::uint64_t seed = 0;
    MoveWeights moves;

    void validate() const;
    std::uint64_t burn_in() const;
};

struct Sample {
    std::uint64_t iteration = 0;
    Dag dag;
    double log_score = 0.0;
};

struct PosteriorSamples {
    std::vector<Sample> samples;
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;

    double acceptance_rate() const {
        return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
    }
};

// log sum over the DAGs compatible with the partition of exp(DAG score).
double partition_log_score(const OrderedPartition& partition, const ScoreTable& table);

enum class MoveKind { split, merge, relocate, swap };

struct PartitionMove {
    OrderedPartition partition;
    double log_proposal_ratio = 0.0;  // log q(current | proposed) - log q(proposed | current)
    MoveKind kind = MoveKind::split;
};

// Number of distinct proposals of each kind from a state given as block masks.
struct MoveCounts {
    double split = 0, merge = 0, relocate = 0, swap = 0;
};
MoveCounts count_moves(const std::vector<NodeMask>& blocks);

PartitionMove propose_partition_move(const OrderedPartition& partition, Rng& rng, const MoveWeights& weights = {});

// Per-node sums over partition-valid parent sets, memoised by (node, allowed, required) masks.
class PartitionScorer {
public:
    explicit PartitionScorer(const ScoreTable& table) : m_table(&table) {}

    // Log score of node v whose parents must lie in `allowed` and intersect `required`
    // (required == 0 means the parent set must be empty).
    double node_score(int node, NodeMask allowed, NodeMask required);
    double score(const std::vector<NodeMask>& blocks);
    NodeMask draw_parents(int node, NodeMask allowed, NodeMask required, Rng& rng);
    Dag draw_dag(const std::vector<NodeMask>& blocks, Rng& rng);

private:
    struct Key {
        int node;
        NodeMask allowed;
        NodeMask required;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };
    struct Family {
        double log_total;
        std::vector<NodeMask> parents;
        std::vector<double> cumulative;  // normalised, last element 1
    };
    const Family& family(int node, NodeMask allowed, NodeMask required);

    const ScoreTable* m_table;
    std::unordered_map<Key, Family, KeyHash> m_cache;
};

Dag sample_dag_given_partition(const OrderedPartition& partition, const ScoreTable& table, Rng& rng);

PosteriorSamples partition_mcmc(const ScoreTable& table, const ChainConfig& cfg, Rng& rng);
PosteriorSamples partition_mcmc(const ScoreTable& table, const ChainConfig& cfg);

// Single-edge addition, deletion and reversal moves that keep the graph acyclic and admissible.
struct EdgeMove {
    enum class Kind { add, remove, reverse } kind;
    int from;
    int to;
};
std::vector<EdgeMove> structure_neighbourhood(const Dag& dag, const ScoreTable& table);

PosteriorSamples structure_mcmc(const ScoreTable& table, const ChainConfig& cfg, Rng& rng);
PosteriorSamples structure_mcmc(const ScoreTable& table, const ChainConfig& cfg);

}  // namespace hbn::sampler

#endif  // HBN_SAMPLER_HPP
