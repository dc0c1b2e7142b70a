#include <d2p/error.hh>
#include <d2p/patches.hh>

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

using namespace d2p;

using std::optional;
using std::pair;
using std::string;
using std::uint64_t;
using std::vector;

namespace
{
    struct PatchBuilder
    {
        vector<int> parent, degree;
        vector<string> label;
        vector<pair<int, int>> edges;
        vector<vector<int>> faces;
        bool consistent = true;

        auto add(const string & l, int deg = 0) -> int
        {
            parent.push_back(parent.size());
            degree.push_back(deg);
            label.push_back(l);
            return parent.size() - 1;
        }

        auto find(int x) -> int
        {
            while (parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        }

        auto unite(int a, int b) -> void
        {
            a = find(a), b = find(b);
            if (a == b)
                return;
            if (a > b)
                std::swap(a, b);
            if (degree[a] && degree[b] && degree[a] != degree[b])
                consistent = false;
            degree[a] = std::max(degree[a], degree[b]);
            parent[b] = a;
        }

        auto edge(int a, int b) -> void
        {
            edges.emplace_back(a, b);
        }

        // Closes the face at apex between its consecutive neighbours x and y, given the face's degree class.
        auto close(int apex, int x, int y, int face, const string & tag) -> void
        {
            switch (face) {
            case static_cast<int>(SlotValue::F3):
                edge(x, y);
                faces.push_back({apex, x, y});
                break;
            case static_cast<int>(SlotValue::F4): {
                int z = add(tag + "z");
                edge(x, z), edge(z, y);
                faces.push_back({apex, x, z, y});
                break;
            }
            case static_cast<int>(SlotValue::F5): {
                int p = add(tag + "p"), q = add(tag + "q");
                edge(x, p), edge(p, q), edge(q, y);
                faces.push_back({apex, x, p, q, y});
                break;
            }
            default: break;
            }
        }

        auto finish() -> Patch
        {
            Patch p;
            p.consistent = consistent;
            vector<int> index(parent.size(), -1);
            for (int v = 0; v < static_cast<int>(parent.size()); ++v) {
                int r = find(v);
                if (index[r] < 0) {
                    index[r] = p.adj.size();
                    p.adj.push_back(0);
                    p.exact_degree.push_back(degree[r]);
                    p.label.push_back(label[r]);
                }
                index[v] = index[r];
            }
            if (p.adj.size() > 64)
                throw TooLarge{"patch exceeds 64 vertices"};
            for (auto [a, b] : edges) {
                int x = index[a], y = index[b];
                if (x == y) {
                    p.consistent = false;
                    continue;
                }
                p.adj[x] |= uint64_t{1} << y;
                p.adj[y] |= uint64_t{1} << x;
            }
            for (auto & f : faces) {
                vector<int> img;
                for (int v : f)
                    img.push_back(index[v]);
                p.faces.push_back(img);
            }
            for (int v = 0; v < p.size(); ++v) {
                int d = std::popcount(p.adj[v]);
                if (d > 4 || (p.exact_degree[v] && d > p.exact_degree[v]))
                    p.consistent = false;
            }
            return p;
        }
    };

    constexpr int v3 = static_cast<int>(SlotValue::V3);
    constexpr int f3 = static_cast<int>(SlotValue::F3);
    constexpr int f4 = static_cast<int>(SlotValue::F4);
    constexpr int f5 = static_cast<int>(SlotValue::F5);
}

auto Patch::str() const -> string
{
    string out;
    for (int v = 0; v < size(); ++v) {
        out += label[v] + (exact_degree[v] ? "(" + std::to_string(exact_degree[v]) + ")" : "") + ":";
        for (int w = 0; w < size(); ++w)
            if ((adj[v] >> w) & 1)
                out += " " + label[w];
        out += "\n";
    }
    return out;
}

auto d2p::build_word_patch(WordKind kind, const vector<int> & s) -> Patch
{
    PatchBuilder b;
    int n = s.size();
    if (n != word_length(kind))
        throw WrongLength{"patch slots"};

    if (kind == WordKind::Vertex3) {
        int c = b.add("v", 3);
        vector<int> nb;
        for (int j = 0; j < 3; ++j) {
            nb.push_back(b.add("n" + std::to_string(j)));
            b.edge(c, nb[j]);
        }
        for (int j = 0; j < 3; ++j)
            if (s[j] >= 0)
                b.close(c, nb[j], nb[(j + 1) % 3], s[j], "f" + std::to_string(j));
        return b.finish();
    }

    int d = n / 2;
    vector<int> c(d), left(d, -1), right(d, -1);
    for (int i = 0; i < d; ++i) {
        int corner = s[2 * i];
        c[i] = b.add("c" + std::to_string(i), corner < 0 ? 0 : corner == v3 ? 3 : 4);
    }
    for (int i = 0; i < d; ++i)
        b.edge(c[i], c[(i + 1) % d]);
    b.faces.push_back(c);
    for (int i = 0; i < d; ++i) {
        int corner = s[2 * i];
        string tag = "c" + std::to_string(i);
        if (corner == v3) {
            int x = b.add(tag + "x");
            b.edge(c[i], x);
            left[i] = right[i] = x;
        }
        else if (corner >= 0) {
            int a = b.add(tag + "a"), bb = b.add(tag + "b");
            b.edge(c[i], a), b.edge(c[i], bb);
            left[i] = a, right[i] = bb;
            b.close(c[i], a, bb, corner, tag + "o");
        }
    }
    for (int i = 0; i < d; ++i) {
        int e = s[2 * i + 1], j = (i + 1) % d;
        string tag = "e" + std::to_string(i);
        int r = right[i], l = left[j];
        if (e == f3) {
            int w = r >= 0 ? r : l >= 0 ? l : b.add(tag + "w");
            if (r >= 0 && l >= 0)
                b.unite(r, l);
            b.edge(c[i], w), b.edge(c[j], w);
            b.faces.push_back({c[i], w, c[j]});
        }
        else if (e == f4 || e == f5) {
            int q = r >= 0 ? r : b.add(tag + "q");
            int p = l >= 0 ? l : b.add(tag + "p");
            b.edge(c[i], q), b.edge(c[j], p);
            if (e == f4) {
                b.edge(p, q);
                b.faces.push_back({c[i], q, p, c[j]});
            }
            else {
                int z = b.add(tag + "z");
                b.edge(q, z), b.edge(z, p);
                b.faces.push_back({c[i], q, z, p, c[j]});
            }
        }
    }
    return b.finish();
}

auto d2p::build_word_patch(const ConfigWord & w) -> Patch
{
    vector<int> s;
    for (int i = 0; i < w.length; ++i)
        s.push_back(static_cast<int>(w.slots[i]));
    return build_word_patch(w.kind, s);
}

auto d2p::build_context_patch(const LocalEdgeContext & ctx, bool far_u, bool far_v) -> Patch
{
    validate(ctx);
    PatchBuilder b;
    int u = b.add("u", ctx.du), v = b.add("v", ctx.dv);
    b.edge(u, v);
    // Neighbours of an endpoint in rotation order from the f' side: first[0] lies on f', last on f.
    auto spokes = [&](int x, int deg, const string & tag) {
        vector<int> nb;
        for (int i = 0; i < deg - 1; ++i) {
            nb.push_back(b.add(tag + std::to_string(i)));
            b.edge(x, nb.back());
        }
        return nb;
    };
    auto nu = spokes(u, ctx.du, "u"), nv = spokes(v, ctx.dv, "v");
    int fp = static_cast<int>(ctx.fprime);
    // The face f' runs u, nu[0], ..., nv[0], v.
    if (fp == f3) {
        b.unite(nu[0], nv[0]);
        b.faces.push_back({u, nu[0], v});
    }
    else if (fp == f4) {
        b.edge(nu[0], nv[0]);
        b.faces.push_back({u, nu[0], nv[0], v});
    }
    else if (fp == f5) {
        int z = b.add("fpz");
        b.edge(nu[0], z), b.edge(z, nv[0]);
        b.faces.push_back({u, nu[0], z, nv[0], v});
    }
    auto fan = [&](int x, const vector<int> & nb, const vector<SlotValue> & faces, bool far, const string & tag) {
        for (unsigned i = 0; i < faces.size(); ++i)
            b.close(x, nb[i], nb[i + 1], static_cast<int>(faces[i]), tag + std::to_string(i));
        if (! far)
            return;
        if (faces.size() != 2 || faces[1] != SlotValue::F4)
            throw MalformedContext{"far triangle needs a 4-face beside f"};
        // The 4-face closed last is x, nb[1], z, nb[2]; the triangle hangs on its edge z nb[2].
        int z = b.faces.back()[2], t = b.add(tag + "t");
        b.edge(z, t), b.edge(t, nb[2]);
        b.faces.push_back({nb[2], z, t});
    };
    fan(u, nu, ctx.fan_u, far_u, "xu");
    fan(v, nv, ctx.fan_v, far_v, "xv");
    return b.finish();
}

auto d2p::shape_of(const PlaneFragment & f) -> Shape
{
    Shape s;
    s.name = f.name;
    int n = f.vertices.size();
    if (n > 64)
        throw TooLarge{"fragment exceeds 64 vertices"};
    s.adj.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        auto & fv = f.vertices[v];
        s.required_degree.push_back(fv.exact ? fv.degree_bound : 0);
        s.label.push_back(fv.id);
        for (int w : f.g_neighbours(v))
            s.adj[v] |= uint64_t{1} << w;
    }
    // Search order: start from the most constrained vertex, then breadth first so every later vertex
    // has an earlier neighbour.
    vector<char> placed(n, 0);
    while (static_cast<int>(s.order.size()) < n) {
        int start = -1;
        for (int v = 0; v < n; ++v) {
            if (placed[v])
                continue;
            auto score = [&](int x) { return (s.required_degree[x] == 3 ? 100 : 0) + std::popcount(s.adj[x]); };
            if (start < 0 || score(v) > score(start))
                start = v;
        }
        std::deque<int> q{start};
        placed[start] = 1;
        while (! q.empty()) {
            int x = q.front();
            q.pop_front();
            s.order.push_back(x);
            for (int y = 0; y < n; ++y)
                if (((s.adj[x] >> y) & 1) && ! placed[y])
                    placed[y] = 1, q.push_back(y);
        }
    }

    // Every traced face but the outer one of each component; the outer face is taken to be the longest.
    auto faces = f.faces();
    vector<int> component(n, -1);
    for (int v = 0; v < n; ++v) {
        if (component[v] >= 0)
            continue;
        std::deque<int> q{v};
        component[v] = v;
        while (! q.empty()) {
            int x = q.front();
            q.pop_front();
            for (int y = 0; y < n; ++y)
                if (((s.adj[x] >> y) & 1) && component[y] < 0)
                    component[y] = v, q.push_back(y);
        }
    }
    std::map<int, int> outer;
    for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
        int c = component[faces[i][0]];
        if (! outer.contains(c) || faces[i].size() > faces[outer[c]].size())
            outer[c] = i;
    }
    for (int i = 0; i < static_cast<int>(faces.size()); ++i)
        if (outer[component[faces[i][0]]] != i)
            s.faces.push_back(faces[i]);
    return s;
}

namespace
{
    auto compatible(int required, int host) -> bool
    {
        if (required == 0)
            return true;
        if (required == 4)
            return host != 3;
        return host == required;
    }
}

auto d2p::find_embedding(const Shape & s, const Patch & p) -> optional<vector<int>>
{
    int n = s.order.size();
    if (n > p.size())
        return std::nullopt;
    vector<int> image(s.adj.size(), -1);
    uint64_t used = 0;

    // Faces to check once the k-th vertex of the order is placed.
    vector<int> position(s.adj.size());
    for (int k = 0; k < n; ++k)
        position[s.order[k]] = k;
    vector<vector<int>> due(n);
    for (int i = 0; i < static_cast<int>(s.faces.size()); ++i) {
        int last = 0;
        for (int v : s.faces[i])
            last = std::max(last, position[v]);
        due[last].push_back(i);
    }
    vector<pair<int, uint64_t>> host_faces;
    for (auto & f : p.faces) {
        uint64_t m = 0;
        for (int v : f)
            m |= uint64_t{1} << v;
        host_faces.emplace_back(f.size(), m);
    }
    auto face_lands = [&](int i) {
        uint64_t m = 0;
        for (int v : s.faces[i])
            m |= uint64_t{1} << image[v];
        int len = s.faces[i].size();
        return std::any_of(host_faces.begin(), host_faces.end(), [&](auto & hf) { return hf.first == len && hf.second == m; });
    };

    std::function<bool(int)> go = [&](int k) -> bool {
        if (k == n)
            return true;
        int x = s.order[k];
        // Candidates: host neighbours of an already placed neighbour, or everything.
        uint64_t cand = ~uint64_t{0};
        if (p.size() < 64)
            cand = (uint64_t{1} << p.size()) - 1;
        for (int y = 0; y < static_cast<int>(s.adj.size()); ++y)
            if (((s.adj[x] >> y) & 1) && image[y] >= 0)
                cand &= p.adj[image[y]];
        cand &= ~used;
        while (cand) {
            int h = std::countr_zero(cand);
            cand &= cand - 1;
            if (! compatible(s.required_degree[x], p.exact_degree[h]))
                continue;
            if (std::popcount(s.adj[x]) > std::popcount(p.adj[h]) && p.exact_degree[h])
                continue;
            image[x] = h;
            used |= uint64_t{1} << h;
            if (std::all_of(due[k].begin(), due[k].end(), face_lands) && go(k + 1))
                return true;
            used &= ~(uint64_t{1} << h);
            image[x] = -1;
        }
        return false;
    };
    if (go(0))
        return image;
    return std::nullopt;
}

auto d2p::embeds(const Shape & s, const Patch & p) -> bool
{
    return find_embedding(s, p).has_value();
}

namespace
{
    auto canonical_atoms(WordKind kind, const vector<SlotSet> & atoms) -> vector<SlotSet>
    {
        int n = atoms.size();
        vector<SlotSet> best = atoms;
        auto consider = [&](auto src) {
            vector<SlotSet> img(n);
            for (int k = 0; k < n; ++k)
                img[k] = atoms[((src(k) % n) + n) % n];
            if (img < best)
                best = img;
        };
        int step = kind == WordKind::Vertex3 ? 1 : 2;
        for (int r = 0; r < n / step; ++r) {
            consider([&](int k) { return k + step * r; });
            consider([&](int k) { return step * r - k; });
        }
        return best;
    }

    // Calls f on every word the atoms allow; stops and returns false as soon as f does.
    auto for_each_completion(WordKind kind, const vector<SlotSet> & atoms, const std::function<bool(const ConfigWord &)> & f) -> bool
    {
        int n = atoms.size();
        ConfigWord w;
        w.kind = kind;
        w.length = n;
        std::function<bool(int)> go = [&](int i) -> bool {
            if (i == n)
                return f(w);
            for (int v = 0; v < number_of_slot_values; ++v)
                if (atoms[i] & (1u << v)) {
                    w.slots[i] = static_cast<SlotValue>(v);
                    if (! go(i + 1))
                        return false;
                }
            return true;
        };
        return go(0);
    }
}

auto d2p::derive_patterns(const vector<Shape> & shapes, const vector<WordKind> & kinds) -> vector<DerivedPatterns>
{
    vector<DerivedPatterns> out(shapes.size());
    for (auto kind : kinds) {
        auto words = enumerate_words(kind);
        vector<vector<ConfigWord>> hits(shapes.size());
        for (auto & w : words) {
            auto p = build_word_patch(w);
            for (unsigned s = 0; s < shapes.size(); ++s)
                if (embeds(shapes[s], p))
                    hits[s].push_back(w);
        }
        for (unsigned s = 0; s < shapes.size(); ++s) {
            std::unordered_set<ConfigWord> in_set(hits[s].begin(), hits[s].end());
            out[s].matching_words += hits[s].size();
            auto all_inside = [&](const vector<SlotSet> & atoms) {
                return for_each_completion(kind, atoms, [&](const ConfigWord & c) { return in_set.contains(canonicalize(c)); });
            };
            std::set<vector<SlotSet>> seen;
            vector<Pattern> mine;
            for (auto & w : hits[s]) {
                bool covered = false;
                for (auto & p : mine)
                    if (matches(w, p)) {
                        covered = true;
                        break;
                    }
                if (covered)
                    continue;
                vector<SlotSet> atoms;
                for (int i = 0; i < w.length; ++i)
                    atoms.push_back(slot_bit(w.slots[i]));
                for (int i = 0; i < w.length; ++i) {
                    auto trial = atoms;
                    trial[i] = legal_slots(kind, i);
                    if (all_inside(trial)) {
                        atoms = trial;
                        continue;
                    }
                    for (int v = 0; v < number_of_slot_values; ++v) {
                        SlotSet bit = 1u << v;
                        if (! (legal_slots(kind, i) & bit) || (atoms[i] & bit))
                            continue;
                        trial = atoms;
                        trial[i] |= bit;
                        if (all_inside(trial))
                            atoms = trial;
                    }
                }
                auto canon = canonical_atoms(kind, atoms);
                if (! seen.insert(canon).second)
                    continue;
                Pattern p;
                p.kind = kind;
                p.atoms = canon;
                mine.push_back(p);
            }
            for (auto & p : mine) {
                p.id = shapes[s].name + "-" + kind_name(kind) + "-" + std::to_string(&p - mine.data() + 1);
                p.provenance = "contains " + shapes[s].name;
                out[s].patterns.push_back(p);
            }
        }
    }
    return out;
}

auto d2p::c6plus_absorption_check(const vector<NamedShape> & library) -> vector<AbsorptionEntry>
{
    vector<AbsorptionEntry> out;
    for (auto & ctx : enumerate_overloaded_edges()) {
        AbsorptionEntry e{ctx, edge_transit(ctx), false, false, ""};
        // A far-triangle share is forced only when the edge would not be overloaded without it.
        for (auto & share : edge_transit_shares(ctx))
            if (share.rule.starts_with("T5-far@") && e.transit - share.amount <= Rational{1, 3})
                (share.rule.back() == 'u' ? e.far_u : e.far_v) = true;
        auto patch = build_context_patch(ctx, e.far_u, e.far_v);
        for (auto & item : library)
            if (embeds(item.shape, patch)) {
                e.absorbed_by = item.entry_id;
                break;
            }
        out.push_back(e);
    }
    return out;
}

auto d2p::format_absorption_report(const vector<AbsorptionEntry> & entries) -> string
{
    string out;
    for (auto & e : entries)
    {
        out += e.context.str() + " transit=" + e.transit.str();
        if (e.far_u || e.far_v)
            out += string(" far=") + (e.far_u ? "u" : "") + (e.far_v ? "v" : "");
        out += " " + (e.absorbed_by.empty() ? "UNABSORBED" : "absorbed-by=" + e.absorbed_by) + "\n";
    }
    out += "unabsorbed " + std::to_string(unabsorbed_count(entries)) + " of " + std::to_string(entries.size()) + "\n";
    return out;
}

auto d2p::unabsorbed_count(const vector<AbsorptionEntry> & entries) -> int
{
    return std::count_if(entries.begin(), entries.end(), [](auto & e) { return e.absorbed_by.empty(); });
}
