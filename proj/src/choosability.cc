#include <d2p/choosability.hh>
#include <d2p/error.hh>

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <sstream>
#include <unordered_map>

using namespace d2p;

using std::pair;
using std::string;
using std::uint64_t;
using std::unordered_map;
using std::vector;

auto ListSizeGraph::add_vertex(const string & id, int ell) -> int
{
    if (size() >= max_vertices)
        throw TooLarge{"at most 64 vertices"};
    for (auto & x : _ids)
        if (x == id)
            throw ParseError{"duplicate vertex " + id};
    _ids.push_back(id);
    _ell.push_back(ell);
    _adj.push_back(0);
    return size() - 1;
}

auto ListSizeGraph::index_of(const string & id) const -> int
{
    for (int i = 0; i < size(); ++i)
        if (_ids[i] == id)
            return i;
    throw UnknownVertex{id};
}

auto ListSizeGraph::add_edge(const string & a, const string & b) -> void
{
    add_edge(index_of(a), index_of(b));
}

auto ListSizeGraph::add_edge(int a, int b) -> void
{
    if (a == b)
        throw ParseError{"loop at " + _ids[a]};
    _adj[a] |= uint64_t{1} << b;
    _adj[b] |= uint64_t{1} << a;
}

auto ListSizeGraph::degree(int v) const -> int
{
    return std::popcount(_adj[v]);
}

auto ListSizeGraph::without(uint64_t removed) const -> ListSizeGraph
{
    ListSizeGraph g;
    vector<int> map(size(), -1);
    for (int v = 0; v < size(); ++v)
        if (! ((removed >> v) & 1))
            map[v] = g.add_vertex(_ids[v], _ell[v]);
    for (int v = 0; v < size(); ++v)
        for (int w = v + 1; w < size(); ++w)
            if (map[v] >= 0 && map[w] >= 0 && adjacent(v, w))
                g.add_edge(map[v], map[w]);
    return g;
}

auto ListSizeGraph::str() const -> string
{
    string out;
    for (int v = 0; v < size(); ++v)
        out += "v " + _ids[v] + " " + std::to_string(_ell[v]) + "\n";
    for (int v = 0; v < size(); ++v)
        for (int w = v + 1; w < size(); ++w)
            if (adjacent(v, w))
                out += "e " + _ids[v] + " " + _ids[w] + "\n";
    return out;
}

auto d2p::parse_list_size_graph(const string & text) -> ListSizeGraph
{
    ListSizeGraph g;
    std::istringstream in(text);
    string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        string tag, a, b;
        if (! (ls >> tag) || tag[0] == '#')
            continue;
        if (tag == "v" && (ls >> a >> b)) {
            try {
                g.add_vertex(a, std::stoi(b));
            }
            catch (const std::invalid_argument &) {
                throw ParseError{"bad list size in '" + line + "'"};
            }
        }
        else if (tag == "e" && (ls >> a >> b))
            g.add_edge(a, b);
        else
            throw ParseError{"bad list-size graph line '" + line + "'"};
    }
    return g;
}

auto d2p::is_happy(const ListSizeGraph & g, const string & v) -> bool
{
    int i = g.index_of(v);
    return g.ell(i) > g.degree(i);
}

namespace
{
    auto bits(uint64_t m) -> vector<int>
    {
        vector<int> out;
        while (m) {
            out.push_back(std::countr_zero(m));
            m &= m - 1;
        }
        return out;
    }

    // List sizes for one subproblem; entries of removed vertices are kept at zero so equal states compare equal.
    using Ells = std::array<std::int8_t, ListSizeGraph::max_vertices>;
    // Row u holds the v with M(u, v) set.
    using Rows = std::array<uint64_t, ListSizeGraph::max_vertices>;

    struct State
    {
        uint64_t alive;
        Ells ell;

        auto operator==(const State &) const -> bool = default;
    };

    struct StateHash
    {
        auto operator()(const State & s) const noexcept -> std::size_t
        {
            std::size_t h = 1469598103934665603ull ^ s.alive;
            for (uint64_t m = s.alive; m; m &= m - 1)
                h = (h ^ static_cast<std::uint8_t>(s.ell[std::countr_zero(m)])) * 1099511628211ull;
            return h;
        }
    };

    // Algorithm A over induced subgraphs of one fixed graph, keyed by (alive set, list sizes).
    struct Heuristic
    {
        const ListSizeGraph & g;
        unordered_map<State, bool, StateHash> memo;
        long subproblems = 0;

        explicit Heuristic(const ListSizeGraph & graph) : g(graph) {}

        static auto ells_of(const ListSizeGraph & g) -> Ells
        {
            Ells e{};
            for (int v = 0; v < g.size(); ++v)
                e[v] = static_cast<std::int8_t>(std::clamp(g.ell(v), -1, 120));
            return e;
        }

        auto deg(uint64_t alive, int v) const -> int
        {
            return std::popcount(g.adjacency(v) & alive);
        }

        // Removes happy vertices in ascending id order until none is left.
        auto strip_happy(uint64_t & alive, Ells & ell, vector<int> * order) const -> void
        {
            bool again = true;
            while (again) {
                again = false;
                for (uint64_t m = alive; m; m &= m - 1) {
                    int v = std::countr_zero(m);
                    if (ell[v] > deg(alive, v)) {
                        alive &= ~(uint64_t{1} << v);
                        ell[v] = 0;
                        if (order)
                            order->push_back(v);
                        again = true;
                        break;
                    }
                }
            }
        }

        // One full fixed point of the matrix update on the given alive set. Stops early when a pair
        // u, v with M(u,v) and ell(u) < ell(v) appears, if stop_on_witness is set.
        auto matrix(uint64_t alive, const Ells & ell, bool stop_on_witness, pair<int, int> * witness) -> Rows
        {
            Rows m{};
            auto vs = bits(alive);
            for (int v : vs)
                m[v] |= uint64_t{1} << v;
            // Pairs that would be witnesses go first. The fixed point does not depend on the order,
            // only how soon a witness shows up.
            vector<pair<int, int>> pairs;
            for (int u : vs)
                for (int v : vs)
                    if (u != v && ell[u] < ell[v])
                        pairs.emplace_back(u, v);
            for (int u : vs)
                for (int v : vs)
                    if (u != v && ell[u] >= ell[v])
                        pairs.emplace_back(u, v);
            bool changed = true;
            while (changed) {
                changed = false;
                for (auto [u, v] : pairs) {
                    if ((m[u] >> v) & 1)
                        continue;
                    Ells ell2 = ell;
                    uint64_t rest = alive & ~(uint64_t{1} << v);
                    ell2[v] = 0;
                    for (uint64_t w = g.adjacency(v) & rest & ~m[u]; w; w &= w - 1)
                        --ell2[std::countr_zero(w)];
                    if (solve(rest, ell2)) {
                        m[u] |= uint64_t{1} << v;
                        changed = true;
                        if (ell[u] < ell[v] && stop_on_witness) {
                            if (witness)
                                *witness = {u, v};
                            return m;
                        }
                    }
                }
            }
            return m;
        }

        auto find_witness(uint64_t alive, const Ells & ell, const Rows & m) const -> std::optional<pair<int, int>>
        {
            for (int u : bits(alive))
                for (int v : bits(alive))
                    if (u != v && ((m[u] >> v) & 1) && ell[u] < ell[v])
                        return pair{u, v};
            return std::nullopt;
        }

        auto solve(uint64_t alive, Ells ell) -> bool
        {
            strip_happy(alive, ell, nullptr);
            if (! alive)
                return true;
            for (uint64_t m = alive; m; m &= m - 1)
                if (ell[std::countr_zero(m)] <= 0)
                    return false;
            State k{alive, ell};
            if (auto it = memo.find(k); it != memo.end())
                return it->second;
            ++subproblems;
            pair<int, int> w{-1, -1};
            matrix(alive, ell, true, &w);
            bool result = w.first >= 0;
            memo.emplace(k, result);
            return result;
        }
    };

    auto to_matrix(const Rows & m, int n) -> InclusionMatrix
    {
        InclusionMatrix out(n, vector<char>(n, 0));
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                out[u][v] = (m[u] >> v) & 1;
        return out;
    }

    auto full_mask(int n) -> uint64_t
    {
        return n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    }
}

auto d2p::algorithm_a(const ListSizeGraph & g) -> bool
{
    Heuristic h(g);
    return h.solve(full_mask(g.size()), Heuristic::ells_of(g));
}

auto d2p::algorithm_a_detailed(const ListSizeGraph & g) -> AlgorithmAResult
{
    AlgorithmAResult r;
    Heuristic h(g);
    uint64_t alive = full_mask(g.size());
    auto ell = Heuristic::ells_of(g);
    vector<int> order;
    h.strip_happy(alive, ell, &order);
    for (int v : order)
        r.happy_order.push_back(g.id(v));
    if (! alive) {
        r.choosable = true;
        return r;
    }
    for (int v : bits(alive))
        r.core.push_back(g.id(v));
    for (int v : bits(alive))
        if (ell[v] <= 0) {
            r.hit_nonpositive = true;
            r.subproblems = h.subproblems;
            return r;
        }
    // Stops at the first witness; on failure this is the full fixed point.
    pair<int, int> w{-1, -1};
    auto m = h.matrix(alive, ell, true, &w);
    auto core = bits(alive);
    r.matrix.assign(core.size(), vector<char>(core.size(), 0));
    for (unsigned i = 0; i < core.size(); ++i)
        for (unsigned j = 0; j < core.size(); ++j)
            r.matrix[i][j] = (m[core[i]] >> core[j]) & 1;
    if (w.first >= 0) {
        r.choosable = true;
        r.witness = pair{g.id(w.first), g.id(w.second)};
    }
    r.subproblems = h.subproblems;
    return r;
}

auto d2p::compute_inclusion_matrix(const ListSizeGraph & g) -> InclusionMatrix
{
    Heuristic h(g);
    return to_matrix(h.matrix(full_mask(g.size()), Heuristic::ells_of(g), false, nullptr), g.size());
}

namespace
{
    // Enumerates list assignments as multisets of colour types: a type is the set of vertices whose
    // list contains the colour, so renaming colours never produces a new assignment.
    struct AssignmentEnumerator
    {
        const ListSizeGraph & g;
        int n;
        vector<uint64_t> types;
        vector<uint64_t> chosen;
        vector<int> remaining;
        std::function<bool(const vector<uint64_t> &)> visit;

        AssignmentEnumerator(const ListSizeGraph & graph, std::function<bool(const vector<uint64_t> &)> f) :
            g(graph), n(graph.size()), visit(std::move(f))
        {
            for (uint64_t s = 1; s < (uint64_t{1} << n); ++s)
                types.push_back(s);
            for (int v = 0; v < n; ++v)
                remaining.push_back(std::max(0, g.ell(v)));
        }

        // Returns false to stop early. Every chosen type has the lowest vertex still needing colours as its
        // minimum, since all lower vertices are full; within one such group types are chosen in nondecreasing
        // order, which makes each multiset appear exactly once.
        auto go(unsigned t, int group) -> bool
        {
            int low = 0;
            while (low < n && remaining[low] == 0)
                ++low;
            if (low == n)
                return visit(chosen);
            if (low != group)
                t = 0;
            for (unsigned i = t; i < types.size(); ++i) {
                uint64_t s = types[i];
                if (std::countr_zero(s) != low)
                    continue;
                bool fits = true;
                for (int v : bits(s))
                    if (remaining[v] == 0) {
                        fits = false;
                        break;
                    }
                if (! fits)
                    continue;
                for (int v : bits(s))
                    --remaining[v];
                chosen.push_back(s);
                bool cont = go(i, low);
                chosen.pop_back();
                for (int v : bits(s))
                    ++remaining[v];
                if (! cont)
                    return false;
            }
            return true;
        }
    };

    auto colourable(const ListSizeGraph & g, const vector<uint64_t> & colours) -> bool
    {
        int n = g.size();
        vector<int> pick(n, -1);
        std::function<bool(int)> place = [&](int v) -> bool {
            if (v == n)
                return true;
            for (unsigned c = 0; c < colours.size(); ++c) {
                if (! ((colours[c] >> v) & 1))
                    continue;
                bool clash = false;
                for (int w : bits(g.adjacency(v)))
                    if (w < v && pick[w] == static_cast<int>(c)) {
                        clash = true;
                        break;
                    }
                if (clash)
                    continue;
                pick[v] = c;
                if (place(v + 1))
                    return true;
            }
            pick[v] = -1;
            return false;
        };
        return place(0);
    }
}

auto d2p::oracle_choosable(const ListSizeGraph & g) -> bool
{
    if (g.size() > 8)
        throw TooLarge{"oracle limited to 8 vertices"};
    long total = 0;
    for (int v = 0; v < g.size(); ++v) {
        if (g.ell(v) <= 0)
            return false;
        total += g.ell(v);
    }
    if (total > 24)
        throw TooLarge{"oracle limited to 24 colours"};
    bool ok = true;
    AssignmentEnumerator e(g, [&](const vector<uint64_t> & colours) {
        if (! colourable(g, colours))
            ok = false;
        return ok;
    });
    e.go(0, -1);
    return ok;
}

auto d2p::oracle_inclusion_contract_holds(const ListSizeGraph & g, const InclusionMatrix & m) -> bool
{
    if (g.size() > 8)
        throw TooLarge{"oracle limited to 8 vertices"};
    for (int v = 0; v < g.size(); ++v)
        if (g.ell(v) <= 0)
            return true; // no list assignment exists to test against
    vector<pair<int, int>> entries;
    for (int u = 0; u < g.size(); ++u)
        for (int v = 0; v < g.size(); ++v)
            if (u != v && m[u][v])
                entries.emplace_back(u, v);
    if (entries.empty())
        return true;
    bool ok = true;
    AssignmentEnumerator e(g, [&](const vector<uint64_t> & colours) {
        if (colourable(g, colours))
            return true;
        // Not colourable, so every true entry must have L(v) inside L(u).
        for (auto [u, v] : entries)
            for (auto c : colours)
                if (((c >> v) & 1) && ! ((c >> u) & 1)) {
                    ok = false;
                    return false;
                }
        return true;
    });
    e.go(0, -1);
    return ok;
}

auto d2p::is_happy_graph(const ListSizeGraph & g) -> bool
{
    Heuristic h(g);
    uint64_t alive = full_mask(g.size());
    auto ell = Heuristic::ells_of(g);
    h.strip_happy(alive, ell, nullptr);
    return alive == 0;
}

auto d2p::reduce_with_identified_pair(const ListSizeGraph & g, const string & pivot, const vector<pair<string, string>> & pairs) -> PairReductionResult
{
    PairReductionResult r;
    int a = g.index_of(pivot);
    for (auto & [b, c] : pairs)
        if (g.adjacent(g.index_of(b), g.index_of(c)))
            throw PairAdjacent{b + " and " + c + " are within distance 2"};

    // In the failed run every true M(a, w) means L(w) is inside L(a), else H would be colourable.
    auto m = compute_inclusion_matrix(g);
    r.full_inclusion_condition = true;
    for (int w : bits(g.adjacency(a)))
        if (! m[a][w])
            r.full_inclusion_condition = false;

    for (auto & [bs, cs] : pairs) {
        int b = g.index_of(bs), c = g.index_of(cs);
        if (! g.adjacent(a, b) || ! g.adjacent(a, c) || ! m[a][b] || ! m[a][c])
            continue;
        if (g.ell(b) + g.ell(c) <= g.ell(a))
            continue;
        // b and c share a colour of L(a); colour them alike, each neighbour loses at most that one colour.
        ListSizeGraph h = g;
        vector<int> count(g.size(), 0);
        uint64_t touched = (g.adjacency(b) | g.adjacency(c)) & ~((uint64_t{1} << b) | (uint64_t{1} << c));
        for (int w : bits(touched)) {
            h.set_ell(w, h.ell(w) - 1);
            ++count[w];
        }
        auto rest = h.without((uint64_t{1} << b) | (uint64_t{1} << c));
        r.decrements.clear();
        for (int w : bits(touched))
            r.decrements.emplace_back(g.id(w), count[w]);
        Heuristic hh(rest);
        uint64_t alive = full_mask(rest.size());
        vector<int> order;
        auto ell = Heuristic::ells_of(rest);
        hh.strip_happy(alive, ell, &order);
        if (alive == 0) {
            r.reducible = true;
            r.pair_used = pair{bs, cs};
            for (int v : order)
                r.happy_order.push_back(rest.id(v));
            r.message = "pair " + bs + "," + cs + " coloured alike, remainder is happy";
            return r;
        }
    }
    r.decrements.clear();
    if (algorithm_a(g)) {
        r.reducible = true;
        r.by_algorithm_a = true;
        r.message = "no declared pair gives a happy remainder, but algorithm A accepts H";
        return r;
    }
    r.message = "no declared pair gives a happy remainder";
    return r;
}
