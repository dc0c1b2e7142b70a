#include <d2p/error.hh>
#include <d2p/fragments.hh>

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

using namespace d2p;

using std::pair;
using std::set;
using std::string;
using std::vector;

auto PlaneFragment::index_of(const string & id) const -> int
{
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i)
        if (vertices[i].id == id)
            return i;
    throw InvalidFragment{"unknown vertex '" + id + "' in fragment " + name};
}

auto PlaneFragment::g_neighbours(int v) const -> vector<int>
{
    vector<int> out;
    for (auto & e : edges) {
        if (e.gprime_only)
            continue;
        if (e.a == v)
            out.push_back(e.b);
        else if (e.b == v)
            out.push_back(e.a);
    }
    return out;
}

auto PlaneFragment::depicted_degree(int v) const -> int
{
    return static_cast<int>(g_neighbours(v).size());
}

namespace
{
    auto trace(const vector<vector<int>> & rot) -> vector<vector<int>>
    {
        set<pair<int, int>> used;
        vector<vector<int>> faces;
        for (int u = 0; u < static_cast<int>(rot.size()); ++u)
            for (int v : rot[u]) {
                if (used.contains({u, v}))
                    continue;
                vector<int> face;
                int a = u, b = v;
                while (! used.contains({a, b})) {
                    used.insert({a, b});
                    face.push_back(a);
                    auto & r = rot[b];
                    auto it = std::find(r.begin(), r.end(), a);
                    if (it == r.end())
                        throw NotClosed{"rotation is not symmetric"};
                    ++it;
                    if (it == r.end())
                        it = r.begin();
                    a = b;
                    b = *it;
                }
                faces.push_back(face);
            }
        return faces;
    }

    auto components(const vector<vector<int>> & adj) -> vector<int>
    {
        vector<int> comp(adj.size(), -1);
        int c = 0;
        for (int s = 0; s < static_cast<int>(adj.size()); ++s) {
            if (comp[s] >= 0)
                continue;
            std::deque<int> q{s};
            comp[s] = c;
            while (! q.empty()) {
                int x = q.front();
                q.pop_front();
                for (int y : adj[x])
                    if (comp[y] < 0)
                        comp[y] = c, q.push_back(y);
            }
            ++c;
        }
        return comp;
    }
}

auto PlaneFragment::faces() const -> vector<vector<int>>
{
    return trace(rotation);
}

auto PlaneFragment::str() const -> string
{
    std::ostringstream out;
    if (! name.empty())
        out << "name " << name << "\n";
    if (! pivot.empty())
        out << "pivot " << pivot << "\n";
    for (auto & v : vertices) {
        out << "v " << v.id << " deg=";
        if (v.exact)
            out << v.degree_bound;
        else
            out << "le4";
        out << (v.colored ? " colored" : " open");
        if (v.removed)
            out << " removed";
        out << "\n";
    }
    for (auto & e : edges)
        out << "e " << vertices[e.a].id << " " << vertices[e.b].id << (e.gprime_only ? " gprime-only" : "") << "\n";
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v)
        if (rotation[v].size() >= 3) {
            out << "rot " << vertices[v].id << ":";
            for (int w : rotation[v])
                out << " " << vertices[w].id;
            out << "\n";
        }
    for (auto & d : distant)
        out << "distant " << d.a << " " << d.b << " reason=" << d.reason << "\n";
    for (auto & [a, b] : near)
        out << "near " << a << " " << b << "\n";
    return out.str();
}

auto d2p::parse_fragment(const string & text) -> PlaneFragment
{
    PlaneFragment f;
    vector<pair<string, vector<string>>> rots;
    std::istringstream in(text);
    string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        string tag;
        if (! (ls >> tag))
            continue;
        if (tag == "name") {
            std::getline(ls >> std::ws, f.name);
        }
        else if (tag == "pivot") {
            ls >> f.pivot;
        }
        else if (tag == "v") {
            FragmentVertex v;
            string deg, state, extra;
            if (! (ls >> v.id >> deg >> state))
                throw InvalidFragment{"bad vertex line '" + line + "'"};
            if (deg == "deg=le4")
                v.degree_bound = 4, v.exact = false;
            else if (deg == "deg=2" || deg == "deg=3" || deg == "deg=4")
                v.degree_bound = deg.back() - '0', v.exact = true;
            else
                throw InvalidFragment{"bad degree '" + deg + "'"};
            if (state == "colored")
                v.colored = true;
            else if (state != "open")
                throw InvalidFragment{"bad vertex state '" + state + "'"};
            while (ls >> extra) {
                if (extra == "removed")
                    v.removed = true;
                else
                    throw InvalidFragment{"bad vertex flag '" + extra + "'"};
            }
            f.vertices.push_back(v);
        }
        else if (tag == "e") {
            string a, b, flag;
            if (! (ls >> a >> b))
                throw InvalidFragment{"bad edge line '" + line + "'"};
            FragmentEdge e{f.index_of(a), f.index_of(b), false};
            if (ls >> flag) {
                if (flag != "gprime-only")
                    throw InvalidFragment{"bad edge flag '" + flag + "'"};
                e.gprime_only = true;
            }
            f.edges.push_back(e);
        }
        else if (tag == "rot") {
            string id, w;
            ls >> id;
            if (id.empty() || id.back() != ':')
                throw InvalidFragment{"bad rotation line '" + line + "'"};
            id.pop_back();
            vector<string> order;
            while (ls >> w)
                order.push_back(w);
            rots.emplace_back(id, order);
        }
        else if (tag == "distant") {
            DistantPair d;
            string reason;
            ls >> d.a >> d.b;
            std::getline(ls >> std::ws, reason);
            if (reason.rfind("reason=", 0) != 0)
                throw InvalidFragment{"distant pair needs reason= in '" + line + "'"};
            d.reason = reason.substr(7);
            f.distant.push_back(d);
        }
        else if (tag == "near") {
            string a, b;
            if (! (ls >> a >> b))
                throw InvalidFragment{"bad near line '" + line + "'"};
            f.near.emplace_back(a, b);
        }
        else
            throw InvalidFragment{"unknown line '" + line + "'"};
    }

    f.rotation.assign(f.vertices.size(), {});
    for (int v = 0; v < static_cast<int>(f.vertices.size()); ++v) {
        auto nb = f.g_neighbours(v);
        if (nb.size() <= 2)
            f.rotation[v] = nb;
    }
    for (auto & [id, order] : rots) {
        int v = f.index_of(id);
        f.rotation[v].clear();
        for (auto & w : order)
            f.rotation[v].push_back(f.index_of(w));
    }
    validate(f);
    return f;
}

auto d2p::validate(const PlaneFragment & f) -> void
{
    int n = f.vertices.size();
    set<string> ids;
    for (auto & v : f.vertices)
        if (! ids.insert(v.id).second)
            throw InvalidFragment{"duplicate vertex " + v.id};
    set<pair<int, int>> seen;
    for (auto & e : f.edges) {
        if (e.a == e.b)
            throw InvalidFragment{"loop at " + f.vertices[e.a].id};
        if (! seen.insert({std::min(e.a, e.b), std::max(e.a, e.b)}).second)
            throw InvalidFragment{"parallel edge " + f.vertices[e.a].id + " " + f.vertices[e.b].id};
    }
    vector<vector<int>> adj(n);
    for (int v = 0; v < n; ++v) {
        adj[v] = f.g_neighbours(v);
        if (static_cast<int>(adj[v].size()) > f.vertices[v].degree_bound)
            throw InvalidFragment{"vertex " + f.vertices[v].id + " has more depicted edges than its degree bound"};
        auto a = adj[v], r = f.rotation[v];
        std::sort(a.begin(), a.end());
        std::sort(r.begin(), r.end());
        if (a != r)
            throw InvalidFragment{"rotation at " + f.vertices[v].id + " must list each G-neighbour once"};
    }
    // Each connected component must be a plane map: V - E + F = 2.
    auto comp = components(adj);
    auto faces = trace(f.rotation);
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    vector<long> vc(ncomp, 0), ec(ncomp, 0), fc(ncomp, 0);
    for (int v = 0; v < n; ++v) {
        ++vc[comp[v]];
        ec[comp[v]] += adj[v].size();
        if (adj[v].empty())
            ++fc[comp[v]];
    }
    for (auto & face : faces)
        ++fc[comp[face[0]]];
    for (int c = 0; c < ncomp; ++c)
        if (vc[c] - ec[c] / 2 + fc[c] != 2)
            throw InvalidFragment{"rotation system of " + f.name + " is not planar"};
    for (auto & d : f.distant)
        f.index_of(d.a), f.index_of(d.b);
    for (auto & [a, b] : f.near)
        f.index_of(a), f.index_of(b);
    if (! f.pivot.empty())
        f.index_of(f.pivot);
}

auto d2p::fragment_distances(const PlaneFragment & f) -> vector<vector<int>>
{
    int n = f.vertices.size();
    vector<vector<int>> adj(n), dist(n, vector<int>(n, -1));
    for (int v = 0; v < n; ++v)
        adj[v] = f.g_neighbours(v);
    for (int s = 0; s < n; ++s) {
        std::deque<int> q{s};
        dist[s][s] = 0;
        while (! q.empty()) {
            int x = q.front();
            q.pop_front();
            for (int y : adj[x])
                if (dist[s][y] < 0)
                    dist[s][y] = dist[s][x] + 1, q.push_back(y);
        }
    }
    return dist;
}

auto d2p::square_graph(const PlaneFragment & f) -> ListSizeGraph
{
    auto dist = fragment_distances(f);
    ListSizeGraph h;
    vector<int> map(f.vertices.size(), -1);
    for (int v = 0; v < static_cast<int>(f.vertices.size()); ++v)
        if (! f.vertices[v].colored)
            map[v] = h.add_vertex(f.vertices[v].id, 0);
    for (int v = 0; v < static_cast<int>(f.vertices.size()); ++v)
        for (int w = v + 1; w < static_cast<int>(f.vertices.size()); ++w)
            if (map[v] >= 0 && map[w] >= 0 && dist[v][w] >= 1 && dist[v][w] <= 2)
                h.add_edge(map[v], map[w]);
    for (auto & [a, b] : f.near) {
        int x = map[f.index_of(a)], y = map[f.index_of(b)];
        if (x >= 0 && y >= 0)
            h.add_edge(x, y);
    }
    return h;
}

auto d2p::derive_list_sizes(const PlaneFragment & f, int k) -> ListSizes
{
    if (k < 1)
        throw InvalidFragment{"k must be positive"};
    auto dist = fragment_distances(f);
    ListSizes out;
    int n = f.vertices.size();
    for (int v = 0; v < n; ++v) {
        if (f.vertices[v].colored)
            continue;
        int b = 0;
        for (int u = 0; u < n; ++u)
            if (u != v && f.vertices[u].colored && dist[v][u] >= 1 && dist[v][u] <= 2)
                ++b;
        for (int u : f.g_neighbours(v))
            b += f.vertices[u].degree_bound - f.depicted_degree(u);
        b += 4 * (f.vertices[v].degree_bound - f.depicted_degree(v));
        int ell = k - b;
        if (ell < 0) {
            out.warnings.push_back("list size of " + f.vertices[v].id + " clamped at 0");
            ell = 0;
        }
        out.ell.emplace_back(f.vertices[v].id, ell);
    }
    return out;
}

auto d2p::build_reduction_problem(const PlaneFragment & f, int k) -> ReductionProblem
{
    ReductionProblem p;
    p.k = k;
    p.h = square_graph(f);
    auto sizes = derive_list_sizes(f, k);
    for (auto & [id, ell] : sizes.ell)
        p.h.set_ell(p.h.index_of(id), ell);
    p.warnings = sizes.warnings;
    for (int v = 0; v < p.h.size(); ++v)
        p.fragment_vertex.push_back(f.index_of(p.h.id(v)));
    for (auto & d : f.distant)
        p.distant_pairs.emplace_back(d.a, d.b);
    return p;
}

auto d2p::trace_faces(const PlaneGraph & g) -> vector<vector<int>>
{
    return trace(g.rotation);
}

auto d2p::euler_check(const PlaneGraph & g) -> Rational
{
    int n = g.rotation.size();
    if (n == 0)
        throw NotClosed{"empty graph"};
    long edges2 = 0;
    for (int v = 0; v < n; ++v) {
        set<int> distinct(g.rotation[v].begin(), g.rotation[v].end());
        if (distinct.size() != g.rotation[v].size())
            throw NotClosed{"repeated neighbour in rotation"};
        for (int w : g.rotation[v]) {
            if (w < 0 || w >= n || w == v)
                throw NotClosed{"bad neighbour in rotation"};
            auto & r = g.rotation[w];
            if (std::find(r.begin(), r.end(), v) == r.end())
                throw NotClosed{"rotation is not symmetric"};
        }
        edges2 += g.rotation[v].size();
    }
    auto comp = components(g.rotation);
    if (*std::max_element(comp.begin(), comp.end()) != 0)
        throw NotClosed{"graph is not connected"};
    if (edges2 == 0)
        throw NotClosed{"graph has no edges"};
    long sum = 0;
    for (int v = 0; v < n; ++v)
        sum += static_cast<long>(g.rotation[v].size()) - 4;
    for (auto & face : trace(g.rotation))
        sum += static_cast<long>(face.size()) - 4;
    return Rational{sum};
}

auto d2p::tetrahedron() -> PlaneGraph
{
    return PlaneGraph{{{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};
}

auto d2p::cube() -> PlaneGraph
{
    // Outer square 0-1-2-3 and inner square 4-5-6-7 with spokes i to i+4, counterclockwise layout.
    return PlaneGraph{{
        {1, 4, 3},
        {2, 5, 0},
        {3, 6, 1},
        {0, 7, 2},
        {0, 5, 7},
        {1, 6, 4},
        {2, 7, 5},
        {3, 4, 6},
    }};
}
