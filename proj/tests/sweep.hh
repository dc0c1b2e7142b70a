#ifndef D2P_GUARD_TESTS_SWEEP_HH
#define D2P_GUARD_TESTS_SWEEP_HH 1

#include <d2p/choosability.hh>

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace d2p::test
{
    struct SweepResult
    {
        long graphs = 0;
        long problems = 0;
        long accepted = 0;
        long violations = 0;
        std::vector<std::string> counterexamples;
    };

    // Edge sets on n vertices as bitmasks over the pairs (i < j) in lexicographic order.
    inline auto pair_index(int n, int i, int j) -> int
    {
        int k = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b, ++k)
                if (a == i && b == j)
                    return k;
        return -1;
    }

    inline auto permuted(int n, unsigned edges, const std::vector<int> & p) -> unsigned
    {
        unsigned out = 0;
        for (int a = 0, k = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b, ++k)
                if ((edges >> k) & 1) {
                    int x = std::min(p[a], p[b]), y = std::max(p[a], p[b]);
                    out |= 1u << pair_index(n, x, y);
                }
        return out;
    }

    // One representative per isomorphism class, with its automorphisms.
    inline auto graph_classes(int n) -> std::vector<std::pair<unsigned, std::vector<std::vector<int>>>>
    {
        std::vector<std::vector<int>> perms;
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        do
            perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));

        int pairs = n * (n - 1) / 2;
        std::set<unsigned> seen;
        std::vector<std::pair<unsigned, std::vector<std::vector<int>>>> out;
        for (unsigned e = 0; e < (1u << pairs); ++e) {
            unsigned least = e;
            for (auto & q : perms)
                least = std::min(least, permuted(n, e, q));
            if (! seen.insert(least).second)
                continue;
            std::vector<std::vector<int>> autos;
            for (auto & q : perms)
                if (permuted(n, least, q) == least)
                    autos.push_back(q);
            out.emplace_back(least, autos);
        }
        return out;
    }

    // Every graph on at most max_n vertices up to isomorphism, every list-size vector in 0..max_ell up to
    // automorphism: algorithm A saying yes must mean the exact oracle says yes.
    inline auto oracle_sweep(int max_n, int max_ell) -> SweepResult
    {
        SweepResult r;
        for (int n = 1; n <= max_n; ++n)
            for (auto & [edges, autos] : graph_classes(n)) {
                ++r.graphs;
                std::vector<int> ell(n, 0);
                long total = 1;
                for (int i = 0; i < n; ++i)
                    total *= max_ell + 1;
                for (long code = 0; code < total; ++code) {
                    long c = code;
                    for (int i = 0; i < n; ++i, c /= max_ell + 1)
                        ell[i] = c % (max_ell + 1);
                    bool least = true;
                    for (auto & q : autos) {
                        std::vector<int> img(n);
                        for (int i = 0; i < n; ++i)
                            img[q[i]] = ell[i];
                        if (img < ell) {
                            least = false;
                            break;
                        }
                    }
                    if (! least)
                        continue;
                    ++r.problems;
                    ListSizeGraph g;
                    for (int i = 0; i < n; ++i)
                        g.add_vertex("v" + std::to_string(i), ell[i]);
                    for (int a = 0, k = 0; a < n; ++a)
                        for (int b = a + 1; b < n; ++b, ++k)
                            if ((edges >> k) & 1)
                                g.add_edge(a, b);
                    if (! algorithm_a(g))
                        continue;
                    ++r.accepted;
                    if (! oracle_choosable(g)) {
                        ++r.violations;
                        if (r.counterexamples.size() < 5)
                            r.counterexamples.push_back(g.str());
                    }
                }
            }
        return r;
    }
}

#endif
