#ifndef D2P_GUARD_TESTS_PLANAR_HH
#define D2P_GUARD_TESTS_PLANAR_HH 1

#include <d2p/fragments.hh>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace d2p::test
{
    struct Point
    {
        long x, y;
    };

    inline auto cross(Point o, Point a, Point b) -> long
    {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    }

    // Segments ab and cd share a point other than a common endpoint.
    inline auto clash(Point a, Point b, Point c, Point d) -> bool
    {
        long d1 = cross(a, b, c), d2 = cross(a, b, d), d3 = cross(c, d, a), d4 = cross(c, d, b);
        if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
            return true;
        // Collinear overlaps count as clashes, which also rules out degenerate drawings.
        return (d1 == 0 && d2 == 0);
    }

    inline auto connected(int n, const std::vector<std::pair<int, int>> & edges) -> bool
    {
        std::vector<int> parent(n);
        for (int i = 0; i < n; ++i)
            parent[i] = i;
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        int parts = n;
        for (auto [a, b] : edges)
            if (find(a) != find(b))
                parent[find(a)] = find(b), --parts;
        return parts == 1;
    }

    // A straight-line drawing: greedy non-crossing edges on random points, then random deletions that
    // keep the graph connected. Rotations come from sorting neighbours by angle.
    inline auto random_plane_graph(std::mt19937 & rng) -> PlaneGraph
    {
        int n = 4 + rng() % 12;
        std::vector<Point> pts;
        std::set<std::pair<long, long>> used;
        while (static_cast<int>(pts.size()) < n) {
            Point p{static_cast<long>(rng() % 1000), static_cast<long>(rng() % 1000)};
            if (used.insert({p.x, p.y}).second)
                pts.push_back(p);
        }
        std::vector<std::pair<int, int>> candidates, edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                candidates.emplace_back(a, b);
        std::shuffle(candidates.begin(), candidates.end(), rng);
        for (auto [a, b] : candidates) {
            bool ok = true;
            for (int c = 0; c < n && ok; ++c)
                if (c != a && c != b && cross(pts[a], pts[b], pts[c]) == 0 &&
                    std::min(pts[a].x, pts[b].x) <= pts[c].x && pts[c].x <= std::max(pts[a].x, pts[b].x) &&
                    std::min(pts[a].y, pts[b].y) <= pts[c].y && pts[c].y <= std::max(pts[a].y, pts[b].y))
                    ok = false;
            for (auto [c, d] : edges) {
                if (! ok)
                    break;
                if (a == c || a == d || b == c || b == d)
                    continue;
                ok = ! clash(pts[a], pts[b], pts[c], pts[d]);
            }
            if (ok)
                edges.emplace_back(a, b);
        }
        std::shuffle(edges.begin(), edges.end(), rng);
        for (unsigned i = 0; i < edges.size();) {
            if (rng() % 2) {
                auto trial = edges;
                trial.erase(trial.begin() + i);
                if (connected(n, trial)) {
                    edges = trial;
                    continue;
                }
            }
            ++i;
        }
        PlaneGraph g;
        g.rotation.resize(n);
        for (auto [a, b] : edges)
            g.rotation[a].push_back(b), g.rotation[b].push_back(a);
        for (int v = 0; v < n; ++v)
            std::sort(g.rotation[v].begin(), g.rotation[v].end(), [&](int p, int q) {
                return std::atan2(pts[p].y - pts[v].y, pts[p].x - pts[v].x) < std::atan2(pts[q].y - pts[v].y, pts[q].x - pts[v].x);
            });
        return g;
    }

}

#endif
