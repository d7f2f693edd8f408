#ifndef HBN_GRAPH_HPP
#define HBN_GRAPH_HPP

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hbn::graph {

// Node sets are bitmasks; the library supports up to 64 nodes.
using NodeMask = std::uint64_t;
inline constexpr int kMaxNodes = 64;

inline constexpr NodeMask bit(int node) { return NodeMask{1} << node; }

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Edge = std::pair<int, int>;

// Directed acyclic graph stored as one parent mask per node.
class Dag {
public:
    Dag() = default;
    explicit Dag(int node_count);
    Dag(int node_count, const std::vector<Edge>& edges);

    int node_count() const { return static_cast<int>(m_parents.size()); }

    NodeMask parents(int node) const { return m_parents[node]; }
    bool has_edge(int from, int to) const { return (m_parents[to] & bit(from)) != 0; }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }
    int edge_count() const;

    // Edges sorted by (from, to).
    std::vector<Edge> edges() const;

    // Throws GraphError on self-loops or cycles; the graph is left untouched.
    void add_edge(int from, int to);
    void remove_edge(int from, int to);

    // True if `to` is reachable from `from` along directed edges (from != to).
    bool reachable(int from, int to) const;

    void set_parents(int node, NodeMask parents) { m_parents[node] = parents; }

    bool operator==(const Dag&) const = default;
    auto operator<=>(const Dag&) const = default;

    // Checks acyclicity of the current parent masks.
    bool is_acyclic() const;

    const std::vector<NodeMask>& parent_masks() const { return m_parents; }

private:
    std::vector<NodeMask> m_parents;
};

// Equivalence-class representative: compelled edges directed, reversible edges undirected.
struct Cpdag {
    int node_count = 0;
    std::set<Edge> directed;
    std::set<Edge> undirected;  // stored with first < second

    bool operator==(const Cpdag&) const = default;
};

struct OrderedPartition {
    std::vector<int> permutation;
    std::vector<int> block_sizes;

    int node_count() const { return static_cast<int>(permutation.size()); }

    // One mask per block, in listed order.
    std::vector<NodeMask> block_masks() const;
    static OrderedPartition from_blocks(const std::vector<NodeMask>& blocks);

    // Throws GraphError when the permutation/blocks are malformed.
    void validate() const;

    bool operator==(const OrderedPartition&) const = default;
    auto operator<=>(const OrderedPartition&) const = default;
};

std::set<Edge> skeleton(const Dag& dag);

// v-structures a -> c <- b with a < b and a, b non-adjacent, as (a, c, b).
std::set<std::tuple<int, int, int>> v_structures(const Dag& dag);

Cpdag cpdag(const Dag& dag);

// FN + FP on skeletons plus orientation mismatches between the two CPDAGs.
int shd(const Dag& estimate, const Dag& truth);

OrderedPartition dag_to_partition(const Dag& dag);

// Every node of block i (except the last) has a parent in block i+1, parents only come from
// later blocks, and last-block nodes are parentless.
bool is_compatible(const Dag& dag, const OrderedPartition& partition);

std::string to_string(const Dag& dag, const std::vector<std::string>& names = {});

}  // namespace hbn::graph

#endif  // HBN_GRAPH_HPP
