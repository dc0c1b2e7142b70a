#include <d2p/error.hh>
#include <d2p/fragments.hh>
#include <d2p/patches.hh>
#include <d2p/prover.hh>
#include <d2p/server.hh>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <sstream>

using namespace d2p;

using std::cerr;
using std::cout;
using std::string;
using std::vector;

namespace fs = std::filesystem;

#ifndef D2P_FIXTURES_DIR
#define D2P_FIXTURES_DIR "fixtures"
#endif

namespace
{
    struct Args
    {
        string session;
        unsigned threads = 1;
        string fixtures = D2P_FIXTURES_DIR;

        string fragment, pivot, out;
        vector<string> pairs;

        string pattern_file, evidence, assertion, commit_fragment, id, principal = "cli";

        int limit = 0;
        int port = 8080;
        string host = "127.0.0.1";
        string bundle;
        bool nonneg = false;
    };

    auto need_session(const Args & a) -> Session
    {
        if (a.session.empty())
            throw SessionError{"--session is required"};
        return Session::open(a.session);
    }

    auto open_or_create(const Args & a) -> Session
    {
        if (a.session.empty())
            throw SessionError{"--session is required"};
        if (fs::exists(fs::path{a.session} / "manifest.json"))
            return Session::open(a.session);
        return Session::create(a.session, fs::path{a.session}.filename().string());
    }

    auto slurp(const string & path) -> string
    {
        if (path == "-") {
            std::ostringstream s;
            s << std::cin.rdbuf();
            return s.str();
        }
        return read_file(path);
    }

    auto seconds_since(std::chrono::steady_clock::time_point t) -> double
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    }

    auto cmd_gen(const Args & a) -> int
    {
        auto s = open_or_create(a);
        auto t = std::chrono::steady_clock::now();
        generate_d(s, a.threads);
        for (auto & k : s.d)
            cout << kind_name(k.kind) << " " << k.count << " " << k.sha256 << "\n";
        cout << "generated in " << seconds_since(t) << "s\n";
        return 0;
    }

    auto cmd_solve(const Args & a) -> int
    {
        auto s = need_session(a);
        SolveControl c;
        c.progress = [](const string & m) { cerr << "... " << m << "\n"; };
        auto t = std::chrono::steady_clock::now();
        auto o = iterate(s, c, a.threads);
        cout << "round " << s.rounds.back().round << "\n";
        cout << "alpha " << o.alpha.str() << "\n";
        cout << "method " << o.method << "\n";
        cout << "outcome " << (o.success ? "Success" : "Tight") << "\n";
        cout << "tight " << o.tight.size() << "\n";
        cout << "unabsorbed " << o.unabsorbed << "\n";
        if (! o.bundle.empty())
            cout << "bundle " << o.bundle << "\n";
        if (! o.export_error.empty())
            cout << "export-failed " << o.export_error << "\n";
        cout << "time " << seconds_since(t) << "s\n";
        return o.success ? 0 : 1;
    }

    auto cmd_tight(const Args & a) -> int
    {
        auto s = need_session(a);
        if (s.rounds.empty())
            throw SessionError{"no round has been run; use solve"};
        auto & r = s.rounds.back();
        cout << "# round " << r.round << " alpha " << r.alpha << " " << r.outcome << ", " << r.tight.size() << " tight\n";
        size_t n = a.limit > 0 ? std::min<size_t>(a.limit, r.tight.size()) : r.tight.size();
        for (size_t i = 0; i < n; ++i)
            cout << r.tight[i] << "\n";
        return 0;
    }

    auto cmd_reduce(const Args & a) -> int
    {
        ReduceOptions o;
        o.pivot = a.pivot;
        for (auto & p : a.pairs) {
            auto comma = p.find(',');
            if (comma == string::npos)
                throw ParseError{"--pair takes a,b"};
            o.pairs.emplace_back(p.substr(0, comma), p.substr(comma + 1));
        }
        auto r = attempt_reduce(slurp(a.fragment), o);
        for (auto & d : r.diagnostics)
            cerr << d << "\n";
        if (! r.success) {
            cerr << "H:\n" << r.h;
            cout << "not reduced\n";
            return 1;
        }
        auto text = format_evidence(*r.evidence);
        if (a.out.empty())
            cout << text;
        else {
            write_file(a.out, text);
            cout << "reduced by " << r.evidence->method << ", evidence in " << a.out << "\n";
        }
        return 0;
    }

    auto cmd_commit(const Args & a) -> int
    {
        auto s = need_session(a);
        CommitRequest c;
        c.id = a.id;
        c.principal = a.principal;
        c.patterns = parse_pattern_file(slurp(a.pattern_file));
        if (! a.evidence.empty())
            c.evidence = slurp(a.evidence);
        if (! a.assertion.empty())
            c.assertion = a.assertion;
        if (! a.commit_fragment.empty())
            c.fragment = slurp(a.commit_fragment);
        auto id = commit_reduction(s, c);
        cout << "committed " << id << " " << status_name(s.find_entry(id)->status) << "\n";
        return 0;
    }

    auto cmd_export(const Args & a) -> int
    {
        auto s = need_session(a);
        fs::path out = a.out.empty() ? s.dir / "bundle" : fs::path{a.out};
        export_proof(s, out, a.threads);
        cout << "bundle written to " << out.string() << "\n";
        return 0;
    }

    auto cmd_status(const Args & a) -> int
    {
        auto s = need_session(a);
        cout << "session " << s.id << "\n";
        if (! s.generated())
            cout << "D not generated\n";
        for (auto & k : s.d)
            cout << "D " << kind_name(k.kind) << " " << k.count << "\n";
        cout << "C " << s.entries.size() << " entries\n";
        for (auto & e : s.entries)
            cout << "  " << e.id << " " << status_name(e.status) << " patterns=" << e.patterns.size() << " by=" << e.principal
                 << (e.reason.empty() ? "" : " reason: " + e.reason) << "\n";
        for (auto & r : s.rounds)
            cout << "round " << r.round << " alpha " << r.alpha << " " << r.outcome << " c=" << r.c_size << " tight=" << r.tight.size() << "\n";
        if (! s.uncounted.empty())
            cout << s.uncounted.size() << " entries committed since the last round\n";
        return 0;
    }

    auto cmd_serve(const Args & a) -> int
    {
        if (a.session.empty())
            throw SessionError{"--session is required"};
        ApiServer server{ServerOptions{a.session, a.fixtures, a.threads}};
        cerr << "serving " << a.session << " on http://" << a.host << ":" << a.port << "\n";
        if (! server.listen(a.host, a.port)) {
            cerr << "cannot listen on " << a.host << ":" << a.port << "\n";
            return 2;
        }
        return 0;
    }

    auto cmd_load_fixtures(const Args & a) -> int
    {
        auto s = open_or_create(a);
        int n = load_fixture_c(s, a.fixtures);
        cout << "added " << n << " entries\n";
        for (auto & e : s.entries)
            cout << "  " << e.id << " " << status_name(e.status) << "\n";
        return 0;
    }

    auto cmd_replay(const Args & a) -> int
    {
        auto r = replay_bundle(a.bundle, a.threads);
        for (auto & l : r.transcript)
            cout << l << "\n";
        cout << (r.ok ? "REPLAY OK" : "REPLAY FAILED") << "\n";
        return r.ok ? 0 : 1;
    }

    auto cmd_absorption(const Args & a) -> int
    {
        auto s = need_session(a);
        int unabsorbed = 0;
        cout << absorption_report(s.entries, &unabsorbed);
        return unabsorbed ? 1 : 0;
    }

    auto cmd_derive_patterns(const Args & a) -> int
    {
        auto dir = fs::path{a.fixtures};
        vector<fs::path> files;
        for (auto & f : fs::directory_iterator(dir / "fragments"))
            if (f.path().extension() == ".frag")
                files.push_back(f.path());
        std::sort(files.begin(), files.end());
        vector<Shape> shapes;
        for (auto & f : files) {
            auto frag = parse_fragment(read_file(f));
            validate(frag);
            auto sh = shape_of(frag);
            sh.name = f.stem().string();
            shapes.push_back(sh);
        }
        auto t = std::chrono::steady_clock::now();
        auto derived = derive_patterns(shapes, {WordKind::Vertex3, WordKind::Face3, WordKind::Face5});
        for (size_t i = 0; i < shapes.size(); ++i) {
            auto & ps = derived[i].patterns;
            for (size_t j = 0; j < ps.size(); ++j) {
                ps[j].id = shapes[i].name + "-" + std::to_string(j + 1);
                ps[j].provenance = "fragments/" + shapes[i].name + ".frag";
            }
            write_file(dir / "patterns" / (shapes[i].name + ".pat"), format_pattern_file(ps));
            cout << shapes[i].name << " words=" << derived[i].matching_words << " patterns=" << ps.size() << "\n";
        }
        cout << "derived in " << seconds_since(t) << "s\n";
        return 0;
    }
}

auto main(int argc, char ** argv) -> int
{
    CLI::App app{"Discharging proof search for 12-colouring squares of planar graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    Args a;
    app.add_option("--session", a.session, "Session directory");
    app.add_option("--threads", a.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    app.add_option("--fixtures", a.fixtures, "Fixture directory");

    vector<std::pair<CLI::App *, std::function<int(const Args &)>>> commands;
    auto add = [&](const string & name, const string & help, std::function<int(const Args &)> f) {
        auto c = app.add_subcommand(name, help);
        commands.emplace_back(c, std::move(f));
        return c;
    };

    add("gen", "Create the session if needed and generate D", cmd_gen);
    add("solve", "Run one round: filter D by C, solve, verify, export on success", cmd_solve);
    add("tight", "List the tight words of the last round", cmd_tight)->add_option("--limit", a.limit, "Print at most N words");
    auto reduce = add("reduce", "Attempt a reduction of a fragment file", cmd_reduce);
    reduce->add_option("fragment", a.fragment, "Fragment file, or - for stdin")->required();
    reduce->add_option("--pair", a.pairs, "Declared distant pair a,b (repeatable)");
    reduce->add_option("--pivot", a.pivot, "Pivot vertex for the pair merge");
    reduce->add_option("--out", a.out, "Write evidence here instead of stdout");
    auto commit = add("commit", "Add an entry to C", cmd_commit);
    commit->add_option("patterns", a.pattern_file, "Pattern file")->required();
    auto ev = commit->add_option("--evidence", a.evidence, "Evidence file from reduce");
    auto as = commit->add_option("--assert", a.assertion, "Justification for a manual entry");
    ev->excludes(as);
    commit->add_option("--fragment", a.commit_fragment, "Drawing for an asserted entry");
    commit->add_option("--id", a.id, "Entry id");
    commit->add_option("--principal", a.principal, "Who is committing");
    add("export", "Recheck everything and write a proof bundle", cmd_export)->add_option("--out", a.out, "Bundle directory");
    auto serve = add("serve", "Serve the JSON API", cmd_serve);
    serve->add_option("--port", a.port, "Port")->check(CLI::Range(1, 65535));
    serve->add_option("--host", a.host, "Address to bind");
    add("status", "Summarize the session", cmd_status);
    add("load-fixtures", "Commit every entry listed in the fixture manifest", cmd_load_fixtures);
    add("replay", "Independently replay an exported bundle", cmd_replay)->add_option("bundle", a.bundle, "Bundle directory")->required();
    add("absorption", "Print the 6+ absorption report for the session's C", cmd_absorption);
    add("derive-patterns", "Regenerate fixture patterns from fixture fragments", cmd_derive_patterns);

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto & [c, f] : commands)
            if (c->parsed())
                return f(a);
    }
    catch (const Error & e) {
        cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception & e) {
        cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
