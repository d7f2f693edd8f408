#include <hbn/sampler.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hbn::sampler {

using graph::bit;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCacheEntries = 1'000'000;

NodeMask nth_member(NodeMask mask, std::uint64_t k) {
    for (; k > 0; --k) mask &= mask - 1;
    return mask & (~mask + 1);
}

// Spreads the low bits of `pattern` over the members of `mask`.
NodeMask deposit(std::uint64_t pattern, NodeMask mask) {
    NodeMask out = 0;
    for (NodeMask rest = mask; rest; rest &= rest - 1, pattern >>= 1)
        if (pattern & 1) out |= rest & (~rest + 1);
    return out;
}

double split_count(int size) { return size < 2 ? 0.0 : std::ldexp(1.0, size) - 2.0; }

struct BlockMove {
    std::vector<NodeMask> blocks;
    double log_ratio = 0.0;
    MoveKind kind = MoveKind::split;
    bool moved = false;
};

double kind_count(const MoveCounts& c, MoveKind kind) {
    switch (kind) {
        case MoveKind::split: return c.split;
        case MoveKind::merge: return c.merge;
        case MoveKind::relocate: return c.relocate;
        case MoveKind::swap: return c.swap;
    }
    return 0.0;
}

double kind_weight(const MoveWeights& w, MoveKind kind) {
    switch (kind) {
        case MoveKind::split: return w.split;
        case MoveKind::merge: return w.merge;
        case MoveKind::relocate: return w.relocate;
        case MoveKind::swap: return w.swap;
    }
    return 0.0;
}

constexpr MoveKind kKinds[] = {MoveKind::split, MoveKind::merge, MoveKind::relocate, MoveKind::swap};

MoveKind inverse(MoveKind kind) {
    if (kind == MoveKind::split) return MoveKind::merge;
    if (kind == MoveKind::merge) return MoveKind::split;
    return kind;
}

double available_weight(const MoveCounts& c, const MoveWeights& w) {
    double total = 0.0;
    for (auto kind : kKinds)
        if (kind_count(c, kind) > 0) total += kind_weight(w, kind);
    return total;
}

// Move kinds are disjoint in their effect (split/merge change the block count, relocate
// changes the block sizes, swap keeps both), and each kind reaches distinct states from
// distinct choices, so q(y|x) = (w_k / W(x)) / N_k(x).
BlockMove propose_blocks(const std::vector<NodeMask>& blocks, Rng& rng, const MoveWeights& weights) {
    const MoveCounts counts = count_moves(blocks);
    const double total_weight = available_weight(counts, weights);
    BlockMove out;
    out.blocks = blocks;
    if (total_weight <= 0.0) return out;

    double u = rng.uniform() * total_weight;
    MoveKind kind = MoveKind::swap;
    for (auto k : kKinds) {
        if (kind_count(counts, k) <= 0 || kind_weight(weights, k) <= 0) continue;
        kind = k;
        if (u < kind_weight(weights, k)) break;
        u -= kind_weight(weights, k);
    }

    auto& next = out.blocks;
    const int m = static_cast<int>(blocks.size());
    switch (kind) {
        case MoveKind::split: {
            double pick = rng.uniform() * counts.split;
            int j = 0;
            for (; j < m; ++j) {
                const double c = split_count(std::popcount(blocks[j]));
                if (c > 0 && pick < c) break;
                pick -= c;
            }
            if (j == m)  // rounding guard
                for (j = m - 1; split_count(std::popcount(blocks[j])) == 0; --j) {}
            const int size = std::popcount(blocks[j]);
            std::uint64_t pattern;
            if (size < 63) {
                pattern = rng.below((std::uint64_t{1} << size) - 2) + 1;
            } else {
                const std::uint64_t full = size == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << size) - 1;
                do {
                    pattern = rng() & full;
                } while (pattern == 0 || pattern == full);
            }
            const NodeMask first = deposit(pattern, blocks[j]);
            next[j] = first;
            next.insert(next.begin() + j + 1, blocks[j] & ~first);
            break;
        }
        case MoveKind::merge: {
            const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(m - 1)));
            next[j] = blocks[j] | blocks[j + 1];
            next.erase(next.begin() + j + 1);
            break;
        }
        case MoveKind::relocate: {
            NodeMask movable = 0;
            for (auto b : blocks)
                if (std::popcount(b) >= 2) movable |= b;
            const NodeMask node = nth_member(movable, rng.below(static_cast<std::uint64_t>(std::popcount(movable))));
            int source = 0;
            while (!(blocks[source] & node)) ++source;
            auto target = static_cast<int>(rng.below(static_cast<std::uint64_t>(m - 1)));
            if (target >= source) ++target;
            next[source] &= ~node;
            next[target] |= node;
            break;
        }
        case MoveKind::swap: {
            NodeMask all = 0;
            for (auto b : blocks) all |= b;
            const auto n = static_cast<std::uint64_t>(std::popcount(all));
            NodeMask a, b;
            int ia, ib;
            do {
                a = nth_member(all, rng.below(n));
                b = nth_member(all, rng.below(n));
                ia = ib = 0;
                while (!(blocks[ia] & a)) ++ia;
                while (!(blocks[ib] & b)) ++ib;
            } while (ia == ib);
            next[ia] = (blocks[ia] & ~a) | b;
            next[ib] = (blocks[ib] & ~b) | a;
            break;
        }
    }

    const MoveCounts back = count_moves(next);
    const double log_forward = std::log(kind_weight(weights, kind) / total_weight) - std::log(kind_count(counts, kind));
    const MoveKind rev = inverse(kind);
    const double log_backward =
        std::log(kind_weight(weights, rev) / available_weight(back, weights)) - std::log(kind_count(back, rev));
    out.log_ratio = log_backward - log_forward;
    out.kind = kind;
    out.moved = true;
    return out;
}

double log_sum_exp(const std::vector<double>& xs) {
    if (xs.empty()) return kNegInf;
    const double top = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double x : xs) sum += std::exp(x - top);
    return top + std::log(sum);
}

Sample make_sample(std::uint64_t iteration, Dag dag, const ScoreTable& table) {
    const double score = table.dag_score(dag);
    return Sample{iteration, std::move(dag), score};
}

bool keep(std::uint64_t it, const ChainConfig& cfg, std::uint64_t burn_in) {
    return it >= burn_in && (it - burn_in) % cfg.thinning == 0;
}

NodeMask all_nodes(int n) { return n == 64 ? ~NodeMask{0} : bit(n) - 1; }

}  // namespace

void ChainConfig::validate() const {
    if (iterations == 0) throw std::invalid_argument("chain needs at least one iteration");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw std::invalid_argument("burn-in fraction must lie in [0, 1)");
    if (thinning == 0) throw std::invalid_argument("thinning must be positive");
    const double w[] = {moves.split, moves.merge, moves.relocate, moves.swap};
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) throw std::invalid_argument("move weights must be nonnegative");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("move weights must sum to 1");
    if (burn_in() >= iterations) throw std::invalid_argument("burn-in leaves no iterations");
}

std::uint64_t ChainConfig::burn_in() const {
    return static_cast<std::uint64_t>(std::floor(burn_in_fraction * static_cast<double>(iterations)));
}

MoveCounts count_moves(const std::vector<NodeMask>& blocks) {
    MoveCounts c;
    const double m = static_cast<double>(blocks.size());
    double n = 0.0, sum_sq = 0.0, movable = 0.0;
    for (auto b : blocks) {
        const int k = std::popcount(b);
        c.split += split_count(k);
        n += k;
        sum_sq += static_cast<double>(k) * k;
        if (k >= 2) movable += k;
    }
    c.merge = m > 1 ? m - 1 : 0;
    c.relocate = movable * (m - 1);
    c.swap = 0.5 * (n * n - sum_sq);
    return c;
}

PartitionMove propose_partition_move(const OrderedPartition& partition, Rng& rng, const MoveWeights& weights) {
    partition.validate();
    auto move = propose_blocks(partition.block_masks(), rng, weights);
    return PartitionMove{OrderedPartition::from_blocks(move.blocks), move.log_ratio, move.kind};
}

std::size_t PartitionScorer::KeyHash::operator()(const Key& k) const noexcept {
    return static_cast<std::size_t>(splitmix64(k.allowed ^ splitmix64(k.required ^ splitmix64(k.node))));
}

const PartitionScorer::Family& PartitionScorer::family(int node, NodeMask allowed, NodeMask required) {
    const Key key{node, allowed, required};
    if (auto it = m_cache.find(key); it != m_cache.end()) return it->second;
    if (m_cache.size() >= kMaxCacheEntries) m_cache.clear();

    Family fam;
    std::vector<double> scores;
    for (const auto& e : m_table->entries(node)) {
        const bool valid = required == 0 ? e.parents == 0
                                         : (e.parents & ~allowed) == 0 && (e.parents & required) != 0;
        if (valid) {
            fam.parents.push_back(e.parents);
            scores.push_back(e.score);
        }
    }
    if (fam.parents.empty() && required != 0 && m_table->max_parents() == 0)
        throw scores::ScoreError("partition needs a parent set beyond the table's parent cap");
    fam.log_total = log_sum_exp(scores);
    double acc = 0.0;
    for (double s : scores) {
        acc += std::exp(s - fam.log_total);
        fam.cumulative.push_back(acc);
    }
    if (!fam.cumulative.empty()) fam.cumulative.back() = 1.0;
    return m_cache.emplace(key, std::move(fam)).first->second;
}

double PartitionScorer::node_score(int node, NodeMask allowed, NodeMask required) {
    return family(node, allowed, required).log_total;
}

double PartitionScorer::score(const std::vector<NodeMask>& blocks) {
    double total = 0.0;
    NodeMask later = 0;
    for (int i = static_cast<int>(blocks.size()) - 1; i >= 0; --i) {
        const NodeMask required = i + 1 < static_cast<int>(blocks.size()) ? blocks[i + 1] : 0;
        for (NodeMask rest = blocks[i]; rest; rest &= rest - 1)
            total += node_score(std::countr_zero(rest), later, required);
        later |= blocks[i];
    }
    return total;
}

NodeMask PartitionScorer::draw_parents(int node, NodeMask allowed, NodeMask required, Rng& rng) {
    const Family& fam = family(node, allowed, required);
    if (fam.parents.empty()) throw scores::ScoreError("no admissible parent set for this partition");
    const double u = rng.uniform();
    const auto it = std::upper_bound(fam.cumulative.begin(), fam.cumulative.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - fam.cumulative.begin()), fam.parents.size() - 1);
    return fam.parents[idx];
}

Dag PartitionScorer::draw_dag(const std::vector<NodeMask>& blocks, Rng& rng) {
    Dag dag(m_table->node_count());
    NodeMask later = 0;
    for (int i = static_cast<int>(blocks.size()) - 1; i >= 0; --i) {
        const NodeMask required = i + 1 < static_cast<int>(blocks.size()) ? blocks[i + 1] : 0;
        for (NodeMask rest = blocks[i]; rest; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            dag.set_parents(v, draw_parents(v, later, required, rng));
        }
        later |= blocks[i];
    }
    return dag;
}

double partition_log_score(const OrderedPartition& partition, const ScoreTable& table) {
    partition.validate();
    if (partition.node_count() != table.node_count())
        throw scores::ScoreError("partition and score table disagree on node count");
    PartitionScorer scorer(table);
    return scorer.score(partition.block_masks());
}

Dag sample_dag_given_partition(const OrderedPartition& partition, const ScoreTable& table, Rng& rng) {
    partition.validate();
    PartitionScorer scorer(table);
    return scorer.draw_dag(partition.block_masks(), rng);
}

PosteriorSamples partition_mcmc(const ScoreTable& table, const ChainConfig& cfg, Rng& rng) {
    cfg.validate();
    PartitionScorer scorer(table);
    std::vector<NodeMask> blocks{all_nodes(table.node_count())};
    if (table.node_count() == 0) blocks.clear();
    double current = scorer.score(blocks);

    PosteriorSamples out;
    const auto burn_in = cfg.burn_in();
    out.samples.reserve(static_cast<std::size_t>((cfg.iterations - burn_in) / cfg.thinning + 1));
    for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
        auto move = propose_blocks(blocks, rng, cfg.moves);
        if (move.moved) {
            ++out.proposals;
            const double proposed = scorer.score(move.blocks);
            const double log_accept = proposed - current + move.log_ratio;
            if (std::isfinite(proposed) && (log_accept >= 0.0 || std::log(rng.uniform()) < log_accept)) {
                blocks = std::move(move.blocks);
                current = proposed;
                ++out.accepted;
            }
        }
        if (keep(it, cfg, burn_in)) out.samples.push_back(make_sample(it, scorer.draw_dag(blocks, rng), table));
    }
    return out;
}

PosteriorSamples partition_mcmc(const ScoreTable& table, const ChainConfig& cfg) {
    Rng rng(cfg.seed, {0});
    return partition_mcmc(table, cfg, rng);
}

namespace {

// desc[v]: nodes reachable from v.
std::vector<NodeMask> descendants(const Dag& dag) {
    const int n = dag.node_count();
    std::vector<NodeMask> children(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v)
        for (NodeMask pa = dag.parents(v); pa; pa &= pa - 1) children[std::countr_zero(pa)] |= bit(v);
    // repeated relaxation; at most n rounds for a DAG
    std::vector<NodeMask> desc = children;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            NodeMask grown = desc[v];
            for (NodeMask c = desc[v]; c; c &= c - 1) grown |= desc[std::countr_zero(c)];
            if (grown != desc[v]) {
                desc[v] = grown;
                changed = true;
            }
        }
    }
    return desc;
}

}  // namespace

std::vector<EdgeMove> structure_neighbourhood(const Dag& dag, const ScoreTable& table) {
    const int n = dag.node_count();
    const auto desc = descendants(dag);
    std::vector<EdgeMove> moves;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dag.has_edge(i, j)) {
                moves.push_back({EdgeMove::Kind::remove, i, j});
                // i reaching j through another parent of j would close a cycle once j -> i is added
                const bool cycle = ((dag.parents(j) & ~bit(i)) & desc[i]) != 0;
                if (!cycle && table.admissible(i, dag.parents(i) | bit(j)))
                    moves.push_back({EdgeMove::Kind::reverse, i, j});
            } else if (!dag.has_edge(j, i)) {
                if (!(desc[j] & bit(i)) && table.admissible(j, dag.parents(j) | bit(i)))
                    moves.push_back({EdgeMove::Kind::add, i, j});
            }
        }
    }
    return moves;
}

PosteriorSamples structure_mcmc(const ScoreTable& table, const ChainConfig& cfg, Rng& rng) {
    cfg.validate();
    Dag current(table.node_count());
    auto neighbours = structure_neighbourhood(current, table);

    PosteriorSamples out;
    const auto burn_in = cfg.burn_in();
    for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
        if (!neighbours.empty()) {
            ++out.proposals;
            const EdgeMove mv = neighbours[rng.below(neighbours.size())];
            Dag proposed = current;
            double delta = 0.0;
            auto change = [&](int node, NodeMask parents) {
                delta += table.score(node, parents) - table.score(node, proposed.parents(node));
                proposed.set_parents(node, parents);
            };
            switch (mv.kind) {
                case EdgeMove::Kind::add: change(mv.to, current.parents(mv.to) | bit(mv.from)); break;
                case EdgeMove::Kind::remove: change(mv.to, current.parents(mv.to) & ~bit(mv.from)); break;
                case EdgeMove::Kind::reverse:
                    change(mv.to, current.parents(mv.to) & ~bit(mv.from));
                    change(mv.from, current.parents(mv.from) | bit(mv.to));
                    break;
            }
            auto back = structure_neighbourhood(proposed, table);
            const double log_accept = delta + std::log(static_cast<double>(neighbours.size())) -
                                      std::log(static_cast<double>(back.size()));
            if (log_accept >= 0.0 || std::log(rng.uniform()) < log_accept) {
                current = std::move(proposed);
                neighbours = std::move(back);
                ++out.accepted;
            }
        }
        if (keep(it, cfg, burn_in)) out.samples.push_back(make_sample(it, current, table));
    }
    return out;
}

PosteriorSamples structure_mcmc(const ScoreTable& table, const ChainConfig& cfg) {
    Rng rng(cfg.seed, {0});
    return structure_mcmc(table, cfg, rng);
}

}  // namespace hbn::sampler
