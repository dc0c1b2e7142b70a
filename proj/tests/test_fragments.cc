#include <d2p/error.hh>
#include <d2p/fragments.hh>

#include "planar.hh"
#include "support.hh"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace d2p;

namespace
{
    auto fixture_ids() -> std::vector<std::string>
    {
        std::vector<std::string> ids;
        for (auto & f : std::filesystem::directory_iterator(test::fixtures() / "fragments"))
            if (f.path().extension() == ".frag")
                ids.push_back(f.path().stem().string());
        std::sort(ids.begin(), ids.end());
        return ids;
    }
}

TEST_CASE("every fixture parses, validates and round trips")
{
    auto ids = fixture_ids();
    CHECK(ids.size() >= 41);
    for (auto & id : ids) {
        INFO(id);
        auto f = parse_fragment(test::fragment_text(id));
        CHECK_NOTHROW(validate(f));
        auto again = parse_fragment(f.str());
        CHECK(again.str() == f.str());
    }
}

TEST_CASE("list sizes reproduce every labelled value in the fixtures")
{
    int labelled = 0;
    for (auto & id : fixture_ids()) {
        auto text = test::fragment_text(id);
        auto expected = test::expected_ell(text);
        if (expected.empty())
            continue;
        auto got = derive_list_sizes(parse_fragment(text));
        std::map<std::string, int> actual(got.ell.begin(), got.ell.end());
        for (auto & [v, e] : expected) {
            INFO(id, " ", v);
            REQUIRE(actual.contains(v));
            CHECK(actual[v] == e);
            ++labelled;
        }
    }
    CHECK(labelled >= 1 + 1 + 3 + 8 + 12);
}

TEST_CASE("labelled list sizes in the fixtures")
{
    auto ell = [](const std::string & id) {
        auto got = derive_list_sizes(parse_fragment(test::fragment_text(id)));
        return std::map<std::string, int>(got.ell.begin(), got.ell.end());
    };
    CHECK(ell("deg2")["v"] == 4);
    CHECK(ell("config1")["a"] == 2);
    auto c0 = ell("c0");
    CHECK(std::vector<int>{c0["a"], c0["b"], c0["c"]} == std::vector<int>{1, 2, 3});
    auto c1 = ell("c1");
    CHECK(std::vector<int>{c1["g"], c1["a"], c1["d"], c1["b"], c1["e"], c1["f"], c1["c"], c1["h"]} ==
        std::vector<int>{3, 7, 5, 4, 2, 5, 4, 2});
    auto c7 = ell("c7");
    std::vector<int> got;
    for (auto v : {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"})
        got.push_back(c7[v]);
    CHECK(got == std::vector<int>{4, 10, 10, 4, 2, 2, 4, 3, 8, 3, 4, 2});
}

TEST_CASE("reduction problems drop coloured vertices and carry distant pairs")
{
    auto f = parse_fragment(test::fragment_text("c0"));
    auto p = build_reduction_problem(f);
    CHECK(p.h.size() == 3);
    CHECK_THROWS_AS(p.h.index_of("e"), UnknownVertex);
    auto c3 = build_reduction_problem(parse_fragment(test::fragment_text("c3")));
    REQUIRE(c3.distant_pairs.size() == 1);
    CHECK(c3.distant_pairs[0] == std::pair<std::string, std::string>{"b", "c"});
    CHECK(! c3.h.adjacent(c3.h.index_of("b"), c3.h.index_of("c")));
}

TEST_CASE("distances and the square graph agree")
{
    auto f = parse_fragment(test::fragment_text("c1"));
    auto d = fragment_distances(f);
    auto sq = square_graph(f);
    for (unsigned a = 0; a < f.vertices.size(); ++a)
        for (unsigned b = 0; b < f.vertices.size(); ++b)
            if (a != b)
                CHECK(sq.adjacent(a, b) == (d[a][b] >= 1 && d[a][b] <= 2));
}

TEST_CASE("malformed fragments are rejected")
{
    CHECK_THROWS_AS(parse_fragment("v a deg=7 open\n"), InvalidFragment);
    CHECK_THROWS_AS(parse_fragment("v a deg=3 open\ne a b\n"), InvalidFragment);
    // a has degree 3 but four neighbours.
    CHECK_THROWS_AS(validate(parse_fragment("v a deg=3 open\nv b deg=le4 open\nv c deg=le4 open\nv d deg=le4 open\nv e deg=le4 open\n"
                                            "e a b\ne a c\ne a d\ne a e\nrot a: b c d e\n")),
        InvalidFragment);
    // Rotation naming a non-neighbour.
    CHECK_THROWS_AS(validate(parse_fragment("v a deg=le4 open\nv b deg=le4 open\nv c deg=le4 open\nv d deg=le4 open\n"
                                            "e a b\ne a c\ne a d\nrot a: b c c\n")),
        InvalidFragment);
}

TEST_CASE("Euler identity on the tetrahedron and the cube")
{
    CHECK(euler_check(tetrahedron()) == Rational{-8});
    CHECK(euler_check(cube()) == Rational{-8});
    CHECK(trace_faces(tetrahedron()).size() == 4);
    CHECK(trace_faces(cube()).size() == 6);
}

TEST_CASE("Euler identity on 50 random connected plane graphs")
{
    std::mt19937 rng(2024);
    for (int t = 0; t < 50; ++t) {
        auto g = test::random_plane_graph(rng);
        INFO("graph ", t, " with ", g.rotation.size(), " vertices");
        CHECK(euler_check(g) == Rational{-8});
    }
}

TEST_CASE("a rotation system of higher genus misses the identity")
{
    // K4 with one vertex's rotation reversed embeds on the torus.
    auto g = tetrahedron();
    std::reverse(g.rotation[0].begin(), g.rotation[0].end());
    CHECK(euler_check(g) != Rational{-8});
}

TEST_CASE("Euler check refuses broken rotation systems")
{
    CHECK_THROWS_AS(euler_check(PlaneGraph{{{1}, {}}}), NotClosed);
    CHECK_THROWS_AS(euler_check(PlaneGraph{{{1}, {0}, {3}, {2}}}), NotClosed);
}
