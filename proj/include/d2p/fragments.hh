#ifndef D2P_GUARD_FRAGMENTS_HH
#define D2P_GUARD_FRAGMENTS_HH 1

#include <d2p/choosability.hh>
#include <d2p/rational.hh>

#include <string>
#include <utility>
#include <vector>

namespace d2p
{
    struct FragmentVertex
    {
        std::string id;
        // Degree bound in G; exact for "deg=2", "deg=3" and "deg=4", an upper bound for "le4".
        int degree_bound = 4;
        bool exact = false;
        bool colored = false;
        bool removed = false;
    };

    struct FragmentEdge
    {
        int a = 0, b = 0;
        bool gprime_only = false;
    };

    struct DistantPair
    {
        std::string a, b, reason;
    };

    class PlaneFragment
    {
    public:
        std::string name;
        std::string pivot;
        std::vector<FragmentVertex> vertices;
        std::vector<FragmentEdge> edges;
        // Cyclic neighbour order per vertex over edges present in G.
        std::vector<std::vector<int>> rotation;
        std::vector<DistantPair> distant;
        std::vector<std::pair<std::string, std::string>> near;

        auto index_of(const std::string &) const -> int;
        auto depicted_degree(int v) const -> int;
        auto g_neighbours(int v) const -> std::vector<int>;
        // Face boundaries traced from the rotation system, as vertex index cycles.
        auto faces() const -> std::vector<std::vector<int>>;
        auto str() const -> std::string;
    };

    auto parse_fragment(const std::string & text) -> PlaneFragment;
    auto validate(const PlaneFragment &) -> void;

    // G-distances within the fragment; -1 if unreachable.
    auto fragment_distances(const PlaneFragment &) -> std::vector<std::vector<int>>;

    auto square_graph(const PlaneFragment &) -> ListSizeGraph;

    struct ListSizes
    {
        std::vector<std::pair<std::string, int>> ell;
        std::vector<std::string> warnings;
    };

    auto derive_list_sizes(const PlaneFragment &, int k = 12) -> ListSizes;

    struct ReductionProblem
    {
        ListSizeGraph h;
        std::vector<int> fragment_vertex;
        int k = 12;
        std::vector<std::pair<std::string, std::string>> distant_pairs;
        std::vector<std::string> warnings;
    };

    auto build_reduction_problem(const PlaneFragment &, int k = 12) -> ReductionProblem;

    // A closed plane graph given by its rotation system.
    struct PlaneGraph
    {
        std::vector<std::vector<int>> rotation;
    };

    auto trace_faces(const PlaneGraph &) -> std::vector<std::vector<int>>;
    auto euler_check(const PlaneGraph &) -> Rational;

    auto tetrahedron() -> PlaneGraph;
    auto cube() -> PlaneGraph;
}

#endif
