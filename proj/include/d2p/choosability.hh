#ifndef D2P_GUARD_CHOOSABILITY_HH
#define D2P_GUARD_CHOOSABILITY_HH 1

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace d2p
{
    class ListSizeGraph
    {
    private:
        std::vector<std::string> _ids;
        std::vector<int> _ell;
        std::vector<std::uint64_t> _adj;

    public:
        static constexpr int max_vertices = 64;

        auto add_vertex(const std::string & id, int ell) -> int;
        auto add_edge(const std::string & a, const std::string & b) -> void;
        auto add_edge(int a, int b) -> void;

        auto size() const -> int { return static_cast<int>(_ids.size()); }
        auto id(int v) const -> const std::string & { return _ids[v]; }
        auto ell(int v) const -> int { return _ell[v]; }
        auto set_ell(int v, int e) -> void { _ell[v] = e; }
        auto adjacency(int v) const -> std::uint64_t { return _adj[v]; }
        auto adjacent(int a, int b) const -> bool { return (_adj[a] >> b) & 1; }
        auto degree(int v) const -> int;
        auto index_of(const std::string & id) const -> int;
        auto ells() const -> const std::vector<int> & { return _ell; }

        // Subgraph induced by the vertices not in the mask, with the same ids and ell values.
        auto without(std::uint64_t removed) const -> ListSizeGraph;

        auto str() const -> std::string;
    };

    auto parse_list_size_graph(const std::string &) -> ListSizeGraph;

    using InclusionMatrix = std::vector<std::vector<char>>;

    struct AlgorithmAResult
    {
        bool choosable = false;
        // Happy vertices removed before the matrix step, in removal order.
        std::vector<std::string> happy_order;
        // Vertices remaining when the matrix was computed; empty if the cascade emptied H.
        std::vector<std::string> core;
        InclusionMatrix matrix;
        std::optional<std::pair<std::string, std::string>> witness;
        bool hit_nonpositive = false;
        long subproblems = 0;
    };

    auto is_happy(const ListSizeGraph &, const std::string & v) -> bool;

    auto algorithm_a(const ListSizeGraph &) -> bool;
    auto algorithm_a_detailed(const ListSizeGraph &) -> AlgorithmAResult;

    // Fixed point on the whole of H, happy vertices included.
    auto compute_inclusion_matrix(const ListSizeGraph &) -> InclusionMatrix;

    // Exact, by exhausting list assignments up to colour renaming.
    auto oracle_choosable(const ListSizeGraph &) -> bool;

    // Exhausts list assignments and checks the inclusion contract for every true entry of the matrix.
    auto oracle_inclusion_contract_holds(const ListSizeGraph &, const InclusionMatrix &) -> bool;

    auto is_happy_graph(const ListSizeGraph &) -> bool;

    struct PairReductionResult
    {
        bool reducible = false;
        bool by_algorithm_a = false;
        std::optional<std::pair<std::string, std::string>> pair_used;
        // Whether every H-neighbour w of the pivot had M(pivot, w) set in the failed run.
        bool full_inclusion_condition = false;
        // Number of times each vertex was decremented by the merge; never above 1.
        std::vector<std::pair<std::string, int>> decrements;
        std::vector<std::string> happy_order;
        std::string message;
    };

    auto reduce_with_identified_pair(const ListSizeGraph &, const std::string & pivot,
        const std::vector<std::pair<std::string, std::string>> & pairs) -> PairReductionResult;
}

#endif
