#include <hbn/graph.hpp>

#include <algorithm>
#include <bit>
#include <sstream>

namespace hbn::graph {

Dag::Dag(int node_count) {
    if (node_count < 0 || node_count > kMaxNodes)
        throw GraphError("node count must be in [0, 64]");
    m_parents.assign(static_cast<std::size_t>(node_count), 0);
}

Dag::Dag(int node_count, const std::vector<Edge>& edges) : Dag(node_count) {
    for (const auto& [from, to] : edges) add_edge(from, to);
}

int Dag::edge_count() const {
    int count = 0;
    for (auto mask : m_parents) count += std::popcount(mask);
    return count;
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (int from = 0; from < node_count(); ++from)
        for (int to = 0; to < node_count(); ++to)
            if (has_edge(from, to)) out.emplace_back(from, to);
    return out;
}

bool Dag::reachable(int from, int to) const {
    // children of a node are found by scanning parent masks
    NodeMask visited = bit(from);
    NodeMask frontier = bit(from);
    while (frontier) {
        NodeMask next = 0;
        for (int v = 0; v < node_count(); ++v)
            if ((m_parents[v] & frontier) && !(visited & bit(v))) next |= bit(v);
        if (next & bit(to)) return true;
        visited |= next;
        frontier = next;
    }
    return false;
}

void Dag::add_edge(int from, int to) {
    const int n = node_count();
    if (from < 0 || to < 0 || from >= n || to >= n)
        throw GraphError("edge endpoint out of range");
    if (from == to) throw GraphError("self-loop " + std::to_string(from));
    if (has_edge(from, to)) throw GraphError("duplicate edge");
    if (reachable(to, from)) throw GraphError("edge would create a cycle");
    m_parents[to] |= bit(from);
}

void Dag::remove_edge(int from, int to) { m_parents[to] &= ~bit(from); }

bool Dag::is_acyclic() const {
    NodeMask removed = 0;
    const NodeMask all = node_count() == 64 ? ~NodeMask{0} : bit(node_count()) - 1;
    while (removed != all) {
        NodeMask layer = 0;
        for (int v = 0; v < node_count(); ++v)
            if (!(removed & bit(v)) && (m_parents[v] & ~removed) == 0) layer |= bit(v);
        if (!layer) return false;
        removed |= layer;
    }
    return true;
}

std::vector<NodeMask> OrderedPartition::block_masks() const {
    std::vector<NodeMask> blocks;
    std::size_t pos = 0;
    for (int size : block_sizes) {
        NodeMask mask = 0;
        for (int k = 0; k < size; ++k) mask |= bit(permutation[pos++]);
        blocks.push_back(mask);
    }
    return blocks;
}

OrderedPartition OrderedPartition::from_blocks(const std::vector<NodeMask>& blocks) {
    OrderedPartition out;
    for (NodeMask block : blocks) {
        out.block_sizes.push_back(std::popcount(block));
        for (NodeMask rest = block; rest; rest &= rest - 1)
            out.permutation.push_back(std::countr_zero(rest));
    }
    return out;
}

void OrderedPartition::validate() const {
    const int n = node_count();
    if (n > kMaxNodes) throw GraphError("partition has more than 64 nodes");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int v : permutation) {
        if (v < 0 || v >= n || seen[v]) throw GraphError("permutation is not a bijection");
        seen[v] = true;
    }
    int total = 0;
    for (int size : block_sizes) {
        if (size <= 0) throw GraphError("block sizes must be positive");
        total += size;
    }
    if (total != n) throw GraphError("block sizes do not sum to the node count");
}

std::set<Edge> skeleton(const Dag& dag) {
    std::set<Edge> out;
    for (const auto& [a, b] : dag.edges()) out.emplace(std::min(a, b), std::max(a, b));
    return out;
}

std::set<std::tuple<int, int, int>> v_structures(const Dag& dag) {
    std::set<std::tuple<int, int, int>> out;
    const int n = dag.node_count();
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (dag.has_edge(a, c) && dag.has_edge(b, c) && !dag.adjacent(a, b))
                    out.emplace(a, c, b);
    return out;
}

Cpdag cpdag(const Dag& dag) {
    const int n = dag.node_count();
    // dir[a][b]: a -> b compelled; und[a][b]: a - b still undirected (symmetric)
    std::vector<std::vector<bool>> dir(n, std::vector<bool>(n, false));
    std::vector<std::vector<bool>> und(n, std::vector<bool>(n, false));
    for (const auto& [a, b] : dag.edges()) und[a][b] = und[b][a] = true;

    auto orient = [&](int a, int b) {
        und[a][b] = und[b][a] = false;
        dir[a][b] = true;
    };
    for (const auto& [a, c, b] : v_structures(dag)) {
        if (und[a][c]) orient(a, c);
        if (und[b][c]) orient(b, c);
    }
    auto adjacent = [&](int a, int b) { return dir[a][b] || dir[b][a] || und[a][b]; };

    // Meek rules 1-3 are complete when starting from a pattern.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                if (!und[b][c]) continue;
                bool force = false;
                for (int a = 0; a < n && !force; ++a) {
                    // R1: a -> b - c, a and c non-adjacent
                    if (a != c && dir[a][b] && !adjacent(a, c)) force = true;
                    // R2: b -> a -> c
                    if (dir[b][a] && dir[a][c]) force = true;
                }
                // R3: b - x -> c, b - y -> c, x and y non-adjacent
                for (int x = 0; x < n && !force; ++x) {
                    if (!und[b][x] || !dir[x][c]) continue;
                    for (int y = x + 1; y < n && !force; ++y)
                        if (und[b][y] && dir[y][c] && !adjacent(x, y)) force = true;
                }
                if (force) {
                    orient(b, c);
                    changed = true;
                }
            }
        }
    }

    Cpdag out;
    out.node_count = n;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (dir[a][b]) out.directed.emplace(a, b);
            if (a < b && und[a][b]) out.undirected.emplace(a, b);
        }
    return out;
}

namespace {

enum class Mark { none, forward, backward, undirected };

// Orientation status of the skeleton pair (a, b), a < b.
Mark mark_of(const Cpdag& g, int a, int b) {
    if (g.directed.count({a, b})) return Mark::forward;
    if (g.directed.count({b, a})) return Mark::backward;
    if (g.undirected.count({a, b})) return Mark::undirected;
    return Mark::none;
}

}  // namespace

int shd(const Dag& estimate, const Dag& truth) {
    if (estimate.node_count() != truth.node_count())
        throw GraphError("shd: node counts differ");
    const auto est_skel = skeleton(estimate);
    const auto true_skel = skeleton(truth);
    const Cpdag est_class = cpdag(estimate);
    const Cpdag true_class = cpdag(truth);

    int distance = 0;
    for (const auto& e : true_skel)
        if (!est_skel.count(e)) ++distance;  // FN
    for (const auto& e : est_skel) {
        if (!true_skel.count(e)) {
            ++distance;  // FP
        } else if (mark_of(est_class, e.first, e.second) != mark_of(true_class, e.first, e.second)) {
            ++distance;
        }
    }
    return distance;
}

OrderedPartition dag_to_partition(const Dag& dag) {
    const int n = dag.node_count();
    std::vector<NodeMask> layers;  // in removal order: outpoints first
    NodeMask removed = 0;
    while (std::popcount(removed) < n) {
        NodeMask layer = 0;
        for (int v = 0; v < n; ++v)
            if (!(removed & bit(v)) && (dag.parents(v) & ~removed) == 0) layer |= bit(v);
        if (!layer) throw GraphError("dag_to_partition: graph has a cycle");
        layers.push_back(layer);
        removed |= layer;
    }
    std::reverse(layers.begin(), layers.end());
    return OrderedPartition::from_blocks(layers);
}

bool is_compatible(const Dag& dag, const OrderedPartition& partition) {
    if (dag.node_count() != partition.node_count()) return false;
    const auto blocks = partition.block_masks();
    NodeMask later = 0;  // union of blocks after the current one
    for (int i = static_cast<int>(blocks.size()) - 1; i >= 0; --i) {
        const bool last = i == static_cast<int>(blocks.size()) - 1;
        for (NodeMask rest = blocks[i]; rest; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            const NodeMask pa = dag.parents(v);
            if (last) {
                if (pa != 0) return false;
            } else if ((pa & ~later) != 0 || (pa & blocks[i + 1]) == 0) {
                return false;
            }
        }
        later |= blocks[i];
    }
    return true;
}

std::string to_string(const Dag& dag, const std::vector<std::string>& names) {
    auto name = [&](int v) {
        return v < static_cast<int>(names.size()) ? names[v] : "X" + std::to_string(v + 1);
    };
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [a, b] : dag.edges()) {
        os << (first ? "" : ", ") << name(a) << "->" << name(b);
        first = false;
    }
    os << '}';
    return os.str();
}

}  // namespace hbn::graph
