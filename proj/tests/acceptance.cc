// One line per primary acceptance criterion; exit status is the number of failures.

#include <d2p/choosability.hh>
#include <d2p/configwords.hh>
#include <d2p/error.hh>
#include <d2p/fragments.hh>
#include <d2p/lpcore.hh>
#include <d2p/patches.hh>
#include <d2p/prover.hh>
#include <d2p/rulespace.hh>

#include "planar.hh"
#include "support.hh"
#include "sweep.hh"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>
#include <iostream>
#include <sstream>
#include <type_traits>

using namespace d2p;

using std::string;
using std::vector;

namespace fs = std::filesystem;

namespace
{
    using Clock = std::chrono::steady_clock;

    auto seconds_since(Clock::time_point t) -> double
    {
        return std::chrono::duration<double>(Clock::now() - t).count();
    }

    auto fmt(double s) -> string
    {
        std::ostringstream o;
        o.precision(3);
        o << s << "s";
        return o.str();
    }

    struct Outcome
    {
        bool pass = true;
        std::ostringstream detail;

        auto require(bool ok, const string & what) -> void
        {
            if (! ok) {
                pass = false;
                detail << " [failed: " << what << "]";
            }
        }
    };

    int failures = 0;

    auto report(int n, const string & title, const std::function<void(Outcome &)> & body) -> void
    {
        Outcome o;
        try {
            body(o);
        }
        catch (const std::exception & e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        if (! o.pass)
            ++failures;
        std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << ": " << title << " --" << o.detail.str() << std::endl;
    }

    auto full_d() -> vector<ConfigWord>
    {
        vector<ConfigWord> d;
        for (auto k : {WordKind::Vertex3, WordKind::Face3, WordKind::Face5}) {
            auto w = enumerate_words(k);
            d.insert(d.end(), w.begin(), w.end());
        }
        return d;
    }

    auto contains(const vector<string> & v, const string & s) -> bool
    {
        return std::find(v.begin(), v.end(), s) != v.end();
    }

    auto patterns_of(const string & id) -> vector<Pattern>
    {
        return parse_pattern_file(read_file(test::fixtures() / "patterns" / (id + ".pat")));
    }

    auto fixture_ids(const string & prefix) -> vector<string>
    {
        vector<string> ids;
        for (auto & f : fs::directory_iterator(test::fixtures() / "fragments"))
            if (f.path().extension() == ".frag" && f.path().stem().string().starts_with(prefix))
                ids.push_back(f.path().stem().string());
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    // Which of the two named drawing families a fragment belongs to.
    struct Families
    {
        int adjacent3 = 0, fans = 0;

        auto add(const PlaneFragment & f) -> void
        {
            bool adj = false;
            for (auto & e : f.edges) {
                auto & a = f.vertices[e.a];
                auto & b = f.vertices[e.b];
                adj = adj || (! e.gprime_only && a.exact && b.exact && a.degree_bound == 3 && b.degree_bound == 3);
            }
            std::vector<int> triangles(f.vertices.size(), 0);
            for (auto & face : f.faces())
                if (face.size() == 3)
                    for (auto v : face)
                        ++triangles[v];
            adjacent3 += adj;
            fans += std::any_of(triangles.begin(), triangles.end(), [](int t) { return t >= 2; });
        }
    };

    // Shared between criteria 2, 6 and 8.
    struct Endgame
    {
        std::unique_ptr<test::TempDir> tmp;
        Session session;
        RoundOutcome outcome;
        LpModel model;
        Certificate cert;
    };
}

auto main() -> int
{
    report(1, "baseline LP with C empty gives alpha 3 with V3:[3/3/3] tight", [](Outcome & o) {
        auto t = Clock::now();
        auto d = full_d();
        double gen = seconds_since(t);
        auto model = build_model(d);
        t = Clock::now();
        auto sol = solve_exact(model);
        double solve = seconds_since(t);
        o.detail << " |D|=" << d.size() << " alpha*=" << sol.alpha_star.str() << " generation " << fmt(gen) << " solve " << fmt(solve);
        o.require(sol.alpha_star == Rational{3}, "alpha* = 3");
        o.require(contains(sol.tight, "V3:[3/3/3]"), "V3:[3/3/3] tight");
        o.require(verify(model, sol.cert), "certificate verifies");
        o.require(gen <= 30 * 60, "generation within 30 minutes");
        o.require(solve <= 5 * 60, "solve within 5 minutes");
    });

    Endgame eg;
    report(2, "fixture C reaches Success with alpha 4 and an exact verified certificate", [&](Outcome & o) {
        eg.tmp = std::make_unique<test::TempDir>("acceptance");
        eg.session = Session::create(eg.tmp->path() / "session", "acceptance");
        auto t = Clock::now();
        int added = load_fixture_c(eg.session, test::fixtures());
        generate_d(eg.session);
        eg.outcome = iterate(eg.session);
        eg.model = build_session_model(load_d(eg.session), eg.session.patterns());
        eg.cert = parse_certificate(eg.session.certificate);
        int asserted = 0;
        for (auto & e : eg.session.entries)
            asserted += e.status == EntryStatus::Asserted;
        o.detail << " entries=" << added << " (" << asserted << " asserted) rows=" << eg.model.constraints.size() << " alpha*=" << eg.outcome.alpha.str()
                 << " method=" << eg.outcome.method << " in " << fmt(seconds_since(t));
        o.require(eg.outcome.success, "outcome Success");
        o.require(eg.outcome.alpha == Rational{4}, "alpha* = 4");
        o.require(verify(eg.model, eg.cert), "certificate verifies against the rebuilt model");
        o.require(! eg.outcome.bundle.empty(), "bundle exported");
        if (! eg.outcome.bundle.empty()) {
            auto r = replay_bundle(eg.outcome.bundle);
            o.detail << " replay=" << (r.ok ? "ok" : "failed");
            o.require(r.ok, "independent bundle replay");
        }
    });

    report(3, "algorithm A on C0 and the heuristic drawings, pair merge on C1-C6", [](Outcome & o) {
        auto c0 = parse_list_size_graph("v a 1\nv b 2\nv c 3\ne a b\ne b c\ne a c\n");
        o.require(algorithm_a(c0), "C0 triangle (1,2,3)");
        auto c0f = build_reduction_problem(parse_fragment(test::fragment_text("c0")));
        o.require(algorithm_a(c0f.h), "C0 fixture");
        int accepted = 0;
        vector<string> rejected;
        Families families;
        auto hs = fixture_ids("h");
        for (auto & id : hs) {
            auto p = build_reduction_problem(parse_fragment(test::fragment_text(id)));
            if (algorithm_a(p.h)) {
                ++accepted;
                families.add(parse_fragment(test::fragment_text(id)));
            }
            else
                rejected.push_back(id);
        }
        o.detail << " drawings accepted " << accepted << "/" << hs.size();
        for (auto & r : rejected)
            o.detail << " rejected:" << r;
        o.require(accepted >= 10, "at least 10 drawings");
        o.detail << " (two adjacent 3-vertices " << families.adjacent3 << ", triangle fans " << families.fans << ")";
        o.require(families.adjacent3 > 0, "an accepted drawing with two adjacent 3-vertices");
        o.require(families.fans > 0, "an accepted drawing with a triangle fan");
        int merged = 0;
        for (int i = 1; i <= 6; ++i) {
            auto f = parse_fragment(test::fragment_text("c" + std::to_string(i)));
            auto p = build_reduction_problem(f);
            auto r = reduce_with_identified_pair(p.h, f.pivot, p.distant_pairs);
            bool ok = r.reducible && r.pair_used && r.pair_used->first == "b" && r.pair_used->second == "c";
            merged += ok;
            o.require(ok, "C" + std::to_string(i) + " with pair (b,c)");
        }
        o.detail << " pair merges " << merged << "/6";
    });

    report(4, "oracle sweep: algorithm A true implies choosable on all graphs up to 5 vertices, lists 0..4", [](Outcome & o) {
        auto t = Clock::now();
        auto r = test::oracle_sweep(5, 4);
        double s = seconds_since(t);
        o.detail << " graphs=" << r.graphs << " problems=" << r.problems << " accepted=" << r.accepted << " violations=" << r.violations << " in " << fmt(s);
        o.require(r.graphs == 1 + 2 + 4 + 11 + 34, "52 isomorphism classes");
        o.require(r.violations == 0, "zero violations");
        o.require(s <= 10 * 60, "within 10 minutes");
    });

    report(5, "list sizes reproduce every labelled value in the fixtures", [](Outcome & o) {
        int checked = 0, wrong = 0;
        for (auto & id : fixture_ids("")) {
            auto text = test::fragment_text(id);
            auto expected = test::expected_ell(text);
            if (expected.empty())
                continue;
            auto got = derive_list_sizes(parse_fragment(text));
            std::map<string, int> actual(got.ell.begin(), got.ell.end());
            for (auto & [v, e] : expected) {
                ++checked;
                if (! actual.contains(v) || actual[v] != e) {
                    ++wrong;
                    o.detail << " " << id << ":" << v << "=" << (actual.contains(v) ? std::to_string(actual[v]) : "?") << "!=" << e;
                }
            }
        }
        o.detail << " labels checked " << checked;
        o.require(wrong == 0, "all labels match");
        for (auto id : {"deg2", "config1", "c0", "c1", "c7"})
            o.require(! test::expected_ell(test::fragment_text(id)).empty(), string("labels present for ") + id);
    });

    report(6, "edge transit conservation, double T5 not overloaded, zero UNABSORBED", [&](Outcome & o) {
        int apps = 0, broken = 0;
        for (auto & a : restated_rule_applications()) {
            Rational sum{0};
            for (auto & s : a.shares)
                sum += s.amount;
            ++apps;
            broken += sum != t_fixed_value(a.key);
        }
        auto dt5 = parse_edge_context("E(4,4;4;3,6p;3,6p)");
        auto over = enumerate_overloaded_edges();
        bool excluded = std::find(over.begin(), over.end(), dt5) == over.end();
        int unabsorbed = -1;
        absorption_report(eg.session.entries, &unabsorbed);
        o.detail << " rule applications " << apps << " unbalanced " << broken << "; double-T5 transit " << edge_transit(dt5).str() << (excluded ? " excluded" : " listed")
                 << "; overloaded contexts " << over.size() << " unabsorbed " << unabsorbed;
        o.require(broken == 0, "every restated rule conserves its value");
        o.require(edge_transit(dt5) == Rational{1, 3}, "double-T5 transit exactly 1/3");
        o.require(excluded, "double-T5 not overloaded");
        o.require(unabsorbed == 0, "fixture C absorbs every overloaded context");
    });

    report(7, "Euler identity is -8 on the tetrahedron, the cube and 50 random plane graphs", [](Outcome & o) {
        o.require(euler_check(tetrahedron()) == Rational{-8}, "tetrahedron");
        o.require(euler_check(cube()) == Rational{-8}, "cube");
        std::mt19937 rng(7);
        int good = 0;
        for (int i = 0; i < 50; ++i)
            good += euler_check(test::random_plane_graph(rng)) == Rational{-8};
        o.detail << " random graphs " << good << "/50";
        o.require(good == 50, "all random graphs");
    });

    report(8, "a 1/10^6 nudge in a tightening direction breaks verify; verify takes no tolerance", [&](Outcome & o) {
        static_assert(std::is_same_v<decltype(&verify), bool (*)(const LpModel &, const Certificate &)>);
        const Rational eps{1, 1000000};
        o.require(verify(eg.model, eg.cert), "unperturbed certificate verifies");
        auto up = eg.cert;
        up.alpha += eps;
        o.require(! verify(eg.model, up), "alpha + 1e-6 rejected");
        vector<char> in_tight(eg.model.variables.size(), 0);
        for (auto & c : eg.model.constraints)
            if (slack(c, eg.cert, eg.model).is_zero())
                for (auto & [v, q] : c.coefficients)
                    if (! q.is_zero())
                        in_tight[v] = 1;
        int tested = 0, flipped = 0, idle = 0;
        for (auto & [name, value] : eg.cert.omega) {
            if (! in_tight[eg.model.variable_index(name)]) {
                ++idle;
                continue;
            }
            ++tested;
            auto a = eg.cert, b = eg.cert;
            a.omega[name] += eps;
            b.omega[name] -= eps;
            flipped += ! verify(eg.model, a) || ! verify(eg.model, b);
        }
        o.detail << " omega components in tight rows " << tested << ", flipped " << flipped << ", in no tight row " << idle;
        o.require(flipped == tested, "every component in a tight row flips verify");
    });

    report(9, "repeated solves are byte-identical and alpha never drops over scripted rounds", [](Outcome & o) {
        test::TempDir tmp("determinism");
        auto a = Session::create(tmp.path() / "a", "same");
        auto b = Session::create(tmp.path() / "b", "same");
        generate_d(a);
        generate_d(b);
        vector<string> script{"c0", "config1", "config2a", "config3", "h01", "h02"};
        vector<string> alphas;
        bool identical = true, monotone = true;
        iterate(a);
        iterate(b);
        alphas.push_back(a.rounds.back().alpha);
        for (auto & id : script) {
            for (auto * s : {&a, &b}) {
                CommitRequest c;
                c.id = id;
                c.patterns = patterns_of(id);
                auto r = attempt_reduce(test::fragment_text(id));
                c.evidence = format_evidence(*r.evidence);
                commit_reduction(*s, c);
                iterate(*s);
            }
            identical = identical && a.certificate == b.certificate && a.rounds.back().tight == b.rounds.back().tight &&
                a.rounds.back().certificate_hash == b.rounds.back().certificate_hash;
            monotone = monotone && Rational::parse(a.rounds.back().alpha) >= Rational::parse(alphas.back());
            alphas.push_back(a.rounds.back().alpha);
        }
        identical = identical && read_file(a.dir / "manifest.json") == read_file(b.dir / "manifest.json");
        o.detail << " rounds " << alphas.size() << " alpha trajectory";
        for (auto & x : alphas)
            o.detail << " " << x;
        o.require(identical, "identical sessions give identical solves");
        o.require(monotone, "alpha nondecreasing");
        o.require(alphas.size() >= 6, "at least 5 rounds after the baseline");
    });

    std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all primary criteria pass") << std::endl;
    return failures;
}
