#include <doctest.h>

#include <hbn/graph.hpp>

#include "oracles.hpp"

using namespace hbn::graph;

TEST_CASE("dag rejects self loops, duplicates and cycles") {
    Dag g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    CHECK_THROWS_AS(g.add_edge(2, 0), GraphError);
    CHECK_THROWS_AS(g.add_edge(1, 1), GraphError);
    CHECK_THROWS_AS(g.add_edge(0, 1), GraphError);
    CHECK(g.edge_count() == 2);
    CHECK(g.reachable(0, 2));
    CHECK_FALSE(g.reachable(2, 0));
    g.remove_edge(1, 2);
    CHECK_NOTHROW(g.add_edge(2, 0));
}

TEST_CASE("skeleton drops orientation") {
    CHECK(skeleton(Dag(2, {{0, 1}})) == std::set<Edge>{{0, 1}});
    CHECK(skeleton(Dag(3)).empty());
    CHECK(skeleton(Dag(3, {{0, 1}, {2, 1}})) == std::set<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("cpdag on small examples") {
    const auto two = cpdag(Dag(2, {{0, 1}}));
    CHECK(two.directed.empty());
    CHECK(two.undirected == std::set<Edge>{{0, 1}});

    const auto collider = cpdag(Dag(3, {{0, 1}, {2, 1}}));
    CHECK(collider.directed == std::set<Edge>{{0, 1}, {2, 1}});
    CHECK(collider.undirected.empty());

    const auto chain = cpdag(Dag(3, {{0, 1}, {1, 2}}));
    CHECK(chain.directed.empty());
    CHECK(chain.undirected.size() == 2);
}

TEST_CASE("cpdag matches the equivalence-class oracle on every DAG up to 4 nodes") {
    for (int n = 2; n <= 4; ++n) {
        const auto dags = oracle::all_dags(n);
        for (const auto& g : dags) {
            const auto got = cpdag(g);
            const auto want = oracle::class_graph(g, dags);
            REQUIRE(got.directed == want.directed);
            REQUIRE(got.undirected == want.undirected);
        }
    }
}

TEST_CASE("equivalent DAGs share one cpdag and inequivalent ones do not") {
    const auto dags = oracle::all_dags(4);
    hbn::Rng rng(11);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto& a = dags[rng.below(dags.size())];
        const auto& b = dags[rng.below(dags.size())];
        CHECK((cpdag(a) == cpdag(b)) == oracle::equivalent(a, b));
    }
}

TEST_CASE("number of DAGs on small node counts") {
    CHECK(oracle::all_dags(2).size() == 3);
    CHECK(oracle::all_dags(3).size() == 25);
    CHECK(oracle::all_dags(4).size() == 543);
}

TEST_CASE("structural hamming distance") {
    CHECK(shd(Dag(3, {{0, 1}, {2, 1}}), Dag(3, {{0, 1}, {2, 1}})) == 0);
    CHECK(shd(Dag(2), Dag(2, {{0, 1}})) == 1);
    CHECK(shd(Dag(2, {{1, 0}}), Dag(2, {{0, 1}})) == 0);
    // A->B->C against the collider A->B<-C
    CHECK(shd(Dag(3, {{0, 1}, {1, 2}}), Dag(3, {{0, 1}, {2, 1}})) == 2);
    // one missing, one extra
    CHECK(shd(Dag(3, {{0, 2}}), Dag(3, {{0, 1}})) == 2);
}

TEST_CASE("shd is symmetric and zero exactly on equivalent pairs") {
    const auto dags = oracle::all_dags(3);
    for (const auto& a : dags)
        for (const auto& b : dags) {
            CHECK(shd(a, b) == shd(b, a));
            CHECK((shd(a, b) == 0) == oracle::equivalent(a, b));
        }
}

TEST_CASE("dag_to_partition on the five node example") {
    // X1..X5 are nodes 0..4: X3->X1, X4->X1, X1->X2, X5->X2
    const Dag g(5, {{2, 0}, {3, 0}, {0, 1}, {4, 1}});
    const auto p = dag_to_partition(g);
    CHECK(p.permutation == std::vector<int>{1, 0, 2, 3, 4});
    CHECK(p.block_sizes == std::vector<int>{1, 1, 3});
    CHECK(is_compatible(g, p));
}

TEST_CASE("dag_to_partition small cases") {
    const auto empty = dag_to_partition(Dag(4));
    CHECK(empty.block_sizes == std::vector<int>{4});
    const auto chain = dag_to_partition(Dag(3, {{0, 1}, {1, 2}}));
    CHECK(chain.permutation == std::vector<int>{2, 1, 0});
    CHECK(chain.block_sizes == std::vector<int>{1, 1, 1});
}

TEST_CASE("every DAG is compatible with exactly one ordered partition") {
    const auto dags = oracle::all_dags(4);
    // enumerate ordered partitions of 4 nodes as block-mask sequences
    std::vector<OrderedPartition> parts;
    std::vector<NodeMask> stack;
    auto rec = [&](auto&& self, NodeMask remaining) -> void {
        if (remaining == 0) {
            parts.push_back(OrderedPartition::from_blocks(stack));
            return;
        }
        for (NodeMask sub = remaining; sub; sub = (sub - 1) & remaining) {
            stack.push_back(sub);
            self(self, remaining & ~sub);
            stack.pop_back();
        }
    };
    rec(rec, 0xF);
    CHECK(parts.size() == 75);  // ordered Bell number for 4
    for (const auto& g : dags) {
        int hits = 0;
        for (const auto& p : parts) hits += is_compatible(g, p);
        REQUIRE(hits == 1);
        CHECK(is_compatible(g, dag_to_partition(g)));
    }
}

TEST_CASE("partition validation") {
    OrderedPartition p{{0, 1, 2}, {1, 2}};
    CHECK_NOTHROW(p.validate());
    OrderedPartition bad{{0, 0, 2}, {1, 2}};
    CHECK_THROWS_AS(bad.validate(), GraphError);
    OrderedPartition sizes{{0, 1, 2}, {1, 1}};
    CHECK_THROWS_AS(sizes.validate(), GraphError);
}
