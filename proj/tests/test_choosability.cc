#include <d2p/choosability.hh>
#include <d2p/error.hh>
#include <d2p/fragments.hh>

#include "support.hh"
#include "sweep.hh"

#include <doctest.h>

#include <random>

using namespace d2p;

namespace
{
    auto graph(const std::string & text) -> ListSizeGraph
    {
        return parse_list_size_graph(text);
    }

    auto complete_bipartite(int a, int b, int ell) -> ListSizeGraph
    {
        ListSizeGraph g;
        for (int i = 0; i < a + b; ++i)
            g.add_vertex("x" + std::to_string(i), ell);
        for (int i = 0; i < a; ++i)
            for (int j = a; j < a + b; ++j)
                g.add_edge(i, j);
        return g;
    }
}

TEST_CASE("list-size graph text round trips")
{
    auto g = graph("v a 1\nv b 2\nv c 3\ne a b\ne b c\ne a c\n");
    CHECK(g.size() == 3);
    CHECK(g.adjacent(g.index_of("a"), g.index_of("c")));
    CHECK(parse_list_size_graph(g.str()).str() == g.str());
    CHECK_THROWS_AS(graph("v a 1\ne a z\n"), UnknownVertex);
    CHECK_THROWS_AS(graph("x a\n"), ParseError);
}

TEST_CASE("the triangle with lists 1, 2, 3 is settled by the happy cascade")
{
    auto g = graph("v a 1\nv b 2\nv c 3\ne a b\ne b c\ne a c\n");
    CHECK(is_happy(g, "c"));
    CHECK(! is_happy(g, "a"));
    auto r = algorithm_a_detailed(g);
    CHECK(r.choosable);
    CHECK(r.happy_order == std::vector<std::string>{"c", "b", "a"});
    CHECK(r.core.empty());
    CHECK(oracle_choosable(g));
    CHECK(is_happy_graph(g));
}

TEST_CASE("an edge with two one-colour lists fails with diagnostics")
{
    auto g = graph("v a 1\nv b 1\ne a b\n");
    auto r = algorithm_a_detailed(g);
    CHECK(! r.choosable);
    CHECK(r.core.size() == 2);
    CHECK(r.matrix.size() == 2);
    CHECK(! oracle_choosable(g));
}

TEST_CASE("an empty list fails at once")
{
    auto r = algorithm_a_detailed(graph("v a 0\nv b 2\ne a b\n"));
    CHECK(! r.choosable);
    CHECK(r.hit_nonpositive);
}

TEST_CASE("K2,4 is not 2-choosable and algorithm A does not claim it")
{
    auto g = complete_bipartite(2, 4, 2);
    CHECK(! oracle_choosable(g));
    CHECK(! algorithm_a(g));
}

TEST_CASE("the even 4-cycle is 2-choosable")
{
    auto g = graph("v a 2\nv b 2\nv c 2\nv d 2\ne a b\ne b c\ne c d\ne d a\n");
    CHECK(oracle_choosable(g));
    if (algorithm_a(g))
        CHECK(oracle_choosable(g));
}

TEST_CASE("the oracle refuses problems it cannot finish")
{
    ListSizeGraph g;
    for (int i = 0; i < 9; ++i)
        g.add_vertex("x" + std::to_string(i), 2);
    CHECK_THROWS_AS(oracle_choosable(g), TooLarge);
}

TEST_CASE("algorithm A agrees with the oracle contract on random small graphs")
{
    std::mt19937 rng(11);
    int unsound = 0, contract = 0;
    for (int t = 0; t < 300; ++t) {
        int n = 2 + rng() % 4;
        ListSizeGraph g;
        for (int v = 0; v < n; ++v)
            g.add_vertex("v" + std::to_string(v), 1 + rng() % 4);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng() % 100 < 60)
                    g.add_edge(a, b);
        if (algorithm_a(g) && ! oracle_choosable(g))
            ++unsound;
        if (! oracle_inclusion_contract_holds(g, compute_inclusion_matrix(g)))
            ++contract;
    }
    CHECK(unsound == 0);
    CHECK(contract == 0);
}

TEST_CASE("oracle sweep over graphs on at most 4 vertices")
{
    auto r = test::oracle_sweep(4, 4);
    CHECK(r.graphs == 1 + 2 + 4 + 11);
    CHECK(r.accepted > 0);
    CHECK(r.violations == 0);
}

TEST_CASE("the pair merge settles C1 to C6")
{
    for (int i = 1; i <= 6; ++i) {
        auto id = "c" + std::to_string(i);
        INFO(id);
        auto f = parse_fragment(test::fragment_text(id));
        auto p = build_reduction_problem(f);
        REQUIRE(p.distant_pairs.size() == 1);
        auto r = reduce_with_identified_pair(p.h, f.pivot, p.distant_pairs);
        CHECK(r.reducible);
        CHECK(! r.by_algorithm_a);
        REQUIRE(r.pair_used);
        CHECK(r.pair_used->first == "b");
        CHECK(r.pair_used->second == "c");
        for (auto & [v, n] : r.decrements)
            CHECK(n == 1);
    }
}

TEST_CASE("the pair merge refuses a pair that is close in H")
{
    auto g = graph("v a 1\nv b 2\nv c 2\ne a b\ne a c\ne b c\n");
    CHECK_THROWS_AS(reduce_with_identified_pair(g, "a", {{"b", "c"}}), PairAdjacent);
}
