#include <d2p/choosability.hh>
#include <d2p/error.hh>
#include <d2p/fragments.hh>
#include <d2p/patches.hh>
#include <d2p/prover.hh>

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace d2p;

using std::optional;
using std::pair;
using std::string;
using std::vector;

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

auto d2p::sha256_hex(const string & data) -> string
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (! EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
        throw SessionError{"sha256 failed"};
    static const char * hex = "0123456789abcdef";
    string out;
    for (unsigned i = 0; i < len; ++i)
        out += hex[digest[i] >> 4], out += hex[digest[i] & 15];
    return out;
}

auto d2p::read_file(const fs::path & p) -> string
{
    std::ifstream in(p, std::ios::binary);
    if (! in)
        throw SessionError{"cannot read " + p.string()};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

auto d2p::write_file(const fs::path & p, const string & contents) -> void
{
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    // Write then rename, so a crash never leaves a half-written file behind.
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (! out)
            throw SessionError{"cannot write " + p.string()};
        out << contents;
        if (! out)
            throw SessionError{"short write to " + p.string()};
    }
    fs::rename(tmp, p);
}

auto d2p::status_name(EntryStatus s) -> string
{
    switch (s) {
    case EntryStatus::HeuristicProved: return "HeuristicProved";
    case EntryStatus::PairProved: return "PairProved";
    case EntryStatus::Asserted: return "Asserted";
    case EntryStatus::Pending: return "Pending";
    }
    return "Pending";
}

auto d2p::parse_status(const string & s) -> EntryStatus
{
    for (auto e : {EntryStatus::HeuristicProved, EntryStatus::PairProved, EntryStatus::Asserted, EntryStatus::Pending})
        if (status_name(e) == s)
            return e;
    throw ParseError{"unknown entry status '" + s + "'"};
}

namespace
{
    auto join(const vector<string> & parts, const string & sep = " ") -> string
    {
        string out;
        for (auto & p : parts)
            out += (out.empty() ? "" : sep) + p;
        return out;
    }

    auto lines_of(const string & text) -> vector<string>
    {
        vector<string> out;
        std::istringstream in(text);
        string line;
        while (std::getline(in, line))
            out.push_back(line);
        return out;
    }

    auto ensure_newline(string s) -> string
    {
        if (! s.empty() && s.back() != '\n')
            s += '\n';
        return s;
    }

    auto algorithm_a_trace(const AlgorithmAResult & r) -> vector<string>
    {
        vector<string> t;
        t.push_back("happy " + join(r.happy_order));
        t.push_back("core " + join(r.core));
        if (r.witness)
            t.push_back("witness " + r.witness->first + " " + r.witness->second);
        return t;
    }

    auto pair_trace(const PairReductionResult & r) -> vector<string>
    {
        vector<string> t;
        if (r.pair_used)
            t.push_back("pair " + r.pair_used->first + " " + r.pair_used->second);
        for (auto & [v, n] : r.decrements)
            t.push_back("decrement " + v + " " + std::to_string(n));
        t.push_back("happy " + join(r.happy_order));
        return t;
    }

    struct Problem
    {
        PlaneFragment fragment;
        ListSizeGraph h;
        string pivot;
        vector<pair<string, string>> pairs;
    };

    auto problem_of(const string & fragment_text, const ReduceOptions & opts) -> Problem
    {
        Problem p;
        p.fragment = parse_fragment(fragment_text);
        validate(p.fragment);
        auto rp = build_reduction_problem(p.fragment);
        p.h = rp.h;
        p.pivot = opts.pivot.empty() ? p.fragment.pivot : opts.pivot;
        p.pairs = opts.pairs.empty() ? rp.distant_pairs : opts.pairs;
        for (auto & [a, b] : p.pairs) {
            p.h.index_of(a);
            p.h.index_of(b);
        }
        if (! p.pivot.empty())
            p.h.index_of(p.pivot);
        return p;
    }

    // H as it would be if the declared pairs were close after all.
    auto joined(const ListSizeGraph & h, const vector<pair<string, string>> & pairs) -> ListSizeGraph
    {
        auto g = h;
        for (auto & [a, b] : pairs)
            g.add_edge(a, b);
        return g;
    }
}

auto d2p::format_evidence(const Evidence & e) -> string
{
    string out = "evidence\n";
    out += "method " + e.method + "\n";
    if (! e.pivot.empty())
        out += "pivot " + e.pivot + "\n";
    for (auto & [a, b] : e.pairs)
        out += "declared " + a + " " + b + "\n";
    for (auto & t : e.trace)
        out += "trace " + t + "\n";
    out += "h-begin\n" + ensure_newline(e.h) + "h-end\n";
    out += "fragment-begin\n" + ensure_newline(e.fragment) + "fragment-end\n";
    return out;
}

auto d2p::parse_evidence(const string & text) -> Evidence
{
    Evidence e;
    auto lines = lines_of(text);
    if (lines.empty() || lines[0] != "evidence")
        throw ParseError{"evidence must start with 'evidence'"};
    unsigned i = 1;
    auto block = [&](const string & end) {
        string out;
        for (++i; i < lines.size() && lines[i] != end; ++i)
            out += lines[i] + "\n";
        if (i == lines.size())
            throw ParseError{"evidence block missing '" + end + "'"};
        return out;
    };
    for (; i < lines.size(); ++i) {
        auto & l = lines[i];
        if (l.empty())
            continue;
        auto sp = l.find(' ');
        string key = l.substr(0, sp), rest = sp == string::npos ? "" : l.substr(sp + 1);
        if (key == "method")
            e.method = rest;
        else if (key == "pivot")
            e.pivot = rest;
        else if (key == "declared") {
            std::istringstream s(rest);
            string a, b;
            if (! (s >> a >> b))
                throw ParseError{"bad declared pair '" + l + "'"};
            e.pairs.emplace_back(a, b);
        }
        else if (key == "trace")
            e.trace.push_back(rest);
        else if (l == "h-begin")
            e.h = block("h-end");
        else if (l == "fragment-begin")
            e.fragment = block("fragment-end");
        else
            throw ParseError{"unexpected evidence line '" + l + "'"};
    }
    if (e.method != "algorithm-a" && e.method != "pair-merge")
        throw ParseError{"unknown evidence method '" + e.method + "'"};
    if (e.fragment.empty())
        throw ParseError{"evidence carries no fragment"};
    return e;
}

auto d2p::replay_evidence(const Evidence & e) -> void
{
    try {
        auto p = problem_of(e.fragment, ReduceOptions{e.pivot, e.pairs});
        if (e.method == "algorithm-a") {
            auto g = joined(p.h, p.pairs);
            if (g.str() != ensure_newline(e.h) && ! (g.size() == 0 && e.h.empty()))
                throw EvidenceReplayFailed{"derived H differs from the recorded one"};
            auto r = algorithm_a_detailed(g);
            if (! r.choosable)
                throw EvidenceReplayFailed{"algorithm A does not accept the derived H"};
            if (algorithm_a_trace(r) != e.trace)
                throw EvidenceReplayFailed{"algorithm A trace differs"};
        }
        else {
            if (p.h.str() != ensure_newline(e.h) && ! (p.h.size() == 0 && e.h.empty()))
                throw EvidenceReplayFailed{"derived H differs from the recorded one"};
            if (p.pivot.empty() || p.pairs.empty())
                throw EvidenceReplayFailed{"pair merge needs a pivot and a declared pair"};
            auto r = reduce_with_identified_pair(p.h, p.pivot, p.pairs);
            if (! r.reducible || ! r.pair_used)
                throw EvidenceReplayFailed{"pair merge does not go through"};
            if (pair_trace(r) != e.trace)
                throw EvidenceReplayFailed{"pair merge trace differs"};
        }
    }
    catch (const EvidenceReplayFailed &) {
        throw;
    }
    catch (const std::exception & ex) {
        throw EvidenceReplayFailed{ex.what()};
    }
}

auto d2p::attempt_reduce(const string & fragment_text, const ReduceOptions & opts) -> AttemptResult
{
    AttemptResult out;
    auto p = problem_of(fragment_text, opts);

    auto g = joined(p.h, p.pairs);
    out.h = g.str();
    auto r = algorithm_a_detailed(g);
    if (r.choosable) {
        out.success = true;
        out.evidence = Evidence{"algorithm-a", p.pivot, p.pairs, algorithm_a_trace(r), g.str(), ensure_newline(fragment_text)};
        return out;
    }

    out.diagnostics.push_back("algorithm A rejects H" + string(p.pairs.empty() ? "" : " with the declared pairs joined"));
    if (r.hit_nonpositive)
        out.diagnostics.push_back("some vertex has an empty list");
    out.diagnostics.push_back("happy " + join(r.happy_order));
    out.diagnostics.push_back("core " + join(r.core));
    for (unsigned i = 0; i < r.matrix.size(); ++i) {
        string row = "M " + r.core[i] + ":";
        for (char c : r.matrix[i])
            row += c ? " 1" : " 0";
        out.diagnostics.push_back(row);
    }

    if (! p.pairs.empty() && ! p.pivot.empty()) {
        auto pr = reduce_with_identified_pair(p.h, p.pivot, p.pairs);
        out.diagnostics.push_back("pair merge: " + pr.message);
        if (pr.reducible && pr.pair_used) {
            out.success = true;
            out.h = p.h.str();
            out.evidence = Evidence{"pair-merge", p.pivot, p.pairs, pair_trace(pr), p.h.str(), ensure_newline(fragment_text)};
        }
    }
    return out;
}

auto Session::find_entry(const string & id) const -> const CEntry *
{
    for (auto & e : entries)
        if (e.id == id)
            return &e;
    return nullptr;
}

auto Session::patterns() const -> vector<Pattern>
{
    vector<Pattern> out;
    for (auto & e : entries)
        for (auto & p : e.patterns)
            out.push_back(p);
    return out;
}

namespace
{
    const vector<WordKind> all_kinds{WordKind::Vertex3, WordKind::Face3, WordKind::Face5};

    auto words_file(const Session & s, WordKind k) -> fs::path
    {
        return s.dir / "d" / (kind_name(k) + ".words");
    }

    auto words_text(const vector<ConfigWord> & words) -> string
    {
        string out;
        for (auto & w : words)
            out += w.str() + "\n";
        return out;
    }

    auto entry_files(const CEntry & e) -> vector<pair<string, string>>
    {
        vector<pair<string, string>> out;
        out.emplace_back("c/" + e.id + ".pat", format_pattern_file(e.patterns));
        if (! e.fragment.empty())
            out.emplace_back("c/" + e.id + ".frag", e.fragment);
        if (! e.evidence.empty())
            out.emplace_back("c/" + e.id + ".evidence", e.evidence);
        return out;
    }

    auto check_id(const string & id) -> void
    {
        if (id.empty() || ! std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; }))
            throw SessionError{"entry ids use letters, digits, '-' and '_' only: '" + id + "'"};
    }
}

auto Session::create(const fs::path & dir, const string & id) -> Session
{
    if (fs::exists(dir / "manifest.json"))
        throw SessionError{"session already exists at " + dir.string()};
    Session s;
    s.dir = dir;
    s.id = id;
    fs::create_directories(dir);
    s.save();
    return s;
}

auto Session::save() const -> void
{
    json m;
    m["format"] = "d2p-session-1";
    m["id"] = id;
    json d_json = json::array();
    for (auto & k : d)
        d_json.push_back({{"kind", kind_name(k.kind)}, {"count", k.count}, {"sha256", k.sha256}});
    m["d"] = d_json;

    json c_json = json::array();
    for (auto & e : entries) {
        json files = json::object();
        for (auto & [name, contents] : entry_files(e)) {
            write_file(dir / name, contents);
            files[name] = sha256_hex(contents);
        }
        c_json.push_back({{"id", e.id}, {"status", status_name(e.status)}, {"patterns", e.patterns.size()},
            {"reason", e.reason}, {"principal", e.principal}, {"files", files}});
    }
    m["c"] = c_json;

    json r_json = json::array();
    for (auto & r : rounds)
        r_json.push_back({{"round", r.round}, {"alpha", r.alpha}, {"certificate_sha256", r.certificate_hash}, {"method", r.method},
            {"outcome", r.outcome}, {"c_size", r.c_size}, {"c_delta", r.c_delta}, {"tight", r.tight}});
    m["rounds"] = r_json;
    m["uncounted"] = uncounted;

    if (! certificate.empty()) {
        write_file(dir / "certificate.txt", certificate);
        m["certificate_sha256"] = sha256_hex(certificate);
    }
    if (! c6plus.empty()) {
        write_file(dir / "c6plus.txt", c6plus);
        m["c6plus_sha256"] = sha256_hex(c6plus);
    }
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

auto Session::open(const fs::path & dir) -> Session
{
    json m;
    try {
        m = json::parse(read_file(dir / "manifest.json"));
    }
    catch (const json::exception & e) {
        throw SessionError{"bad manifest in " + dir.string() + ": " + e.what()};
    }
    if (m.value("format", "") != "d2p-session-1")
        throw SessionError{"unknown session format in " + dir.string()};
    Session s;
    s.dir = dir;
    try {
        s.id = m.at("id");
        for (auto & k : m.at("d"))
            s.d.push_back({parse_kind(k.at("kind")), k.at("count"), k.at("sha256")});
        for (auto & c : m.at("c")) {
            CEntry e;
            e.id = c.at("id");
            e.status = parse_status(c.at("status"));
            e.reason = c.at("reason");
            e.principal = c.at("principal");
            for (auto & [name, hash] : c.at("files").items()) {
                auto contents = read_file(dir / name);
                if (sha256_hex(contents) != hash.get<string>())
                    throw SessionError{"hash mismatch for " + name};
                if (name.ends_with(".pat"))
                    e.patterns = parse_pattern_file(contents);
                else if (name.ends_with(".frag"))
                    e.fragment = contents;
                else if (name.ends_with(".evidence"))
                    e.evidence = contents;
            }
            s.entries.push_back(std::move(e));
        }
        for (auto & r : m.at("rounds"))
            s.rounds.push_back({r.at("round"), r.at("alpha"), r.at("certificate_sha256"), r.at("method"), r.at("outcome"),
                r.at("c_size"), r.at("c_delta"), r.at("tight")});
        s.uncounted = m.at("uncounted").get<vector<string>>();
        if (m.contains("certificate_sha256")) {
            s.certificate = read_file(dir / "certificate.txt");
            if (sha256_hex(s.certificate) != m["certificate_sha256"].get<string>())
                throw SessionError{"hash mismatch for certificate.txt"};
        }
        if (m.contains("c6plus_sha256")) {
            s.c6plus = read_file(dir / "c6plus.txt");
            if (sha256_hex(s.c6plus) != m["c6plus_sha256"].get<string>())
                throw SessionError{"hash mismatch for c6plus.txt"};
        }
    }
    catch (const json::exception & e) {
        throw SessionError{"bad manifest in " + dir.string() + ": " + e.what()};
    }
    return s;
}

auto d2p::generate_d(Session & s, unsigned threads) -> void
{
    s.d.clear();
    for (auto k : all_kinds) {
        auto words = enumerate_words(k, threads);
        auto text = words_text(words);
        write_file(words_file(s, k), text);
        s.d.push_back({k, static_cast<long>(words.size()), sha256_hex(text)});
    }
    s.save();
}

auto d2p::load_d(const Session & s) -> vector<ConfigWord>
{
    if (! s.generated())
        throw SessionError{"D has not been generated; run gen first"};
    vector<ConfigWord> out;
    for (auto & k : s.d) {
        auto text = read_file(words_file(s, k.kind));
        if (sha256_hex(text) != k.sha256)
            throw SessionError{"hash mismatch for " + kind_name(k.kind) + " words"};
        long before = out.size();
        for (auto & line : lines_of(text))
            if (! line.empty())
                out.push_back(parse_word(line));
        if (static_cast<long>(out.size()) - before != k.count)
            throw SessionError{"word count mismatch for " + kind_name(k.kind)};
    }
    return out;
}

auto d2p::build_session_model(const vector<ConfigWord> & d, const vector<Pattern> & patterns, unsigned threads) -> LpModel
{
    return build_model(filter_forbidden(d, patterns, threads));
}

auto d2p::absorption_report(const vector<CEntry> & entries, int * unabsorbed) -> string
{
    vector<NamedShape> library;
    for (auto & e : entries)
        if (! e.fragment.empty() && e.status != EntryStatus::Pending)
            library.push_back({e.id, shape_of(parse_fragment(e.fragment))});
    auto report = c6plus_absorption_check(library);
    if (unabsorbed)
        *unabsorbed = unabsorbed_count(report);
    return format_absorption_report(report);
}

auto d2p::iterate(Session & s, const SolveControl & control, unsigned threads) -> RoundOutcome
{
    auto progress = [&](const string & m) {
        if (control.progress)
            control.progress(m);
    };
    progress("loading D");
    auto d = load_d(s);
    progress("filtering " + std::to_string(d.size()) + " words");
    auto model = build_session_model(d, s.patterns(), threads);
    progress("solving " + std::to_string(model.constraints.size()) + " rows");
    auto sol = solve_fast_then_exact(model, control);
    if (! verify(model, sol.cert))
        throw SessionError{"solver returned a certificate that does not verify"};

    RoundOutcome out;
    out.alpha = sol.alpha_star;
    out.method = sol.method;
    out.success = sol.alpha_star >= Rational{4};
    out.tight = sol.tight;

    progress("checking 6+ absorption");
    s.certificate = format_certificate(sol.cert);
    s.c6plus = absorption_report(s.entries, &out.unabsorbed);

    RoundRecord r;
    r.round = s.rounds.size() + 1;
    r.alpha = sol.alpha_star.str();
    r.certificate_hash = sha256_hex(s.certificate);
    r.method = sol.method;
    r.outcome = out.success ? "Success" : "Tight";
    r.c_size = s.entries.size();
    r.c_delta = s.uncounted;
    r.tight = sol.tight;
    s.rounds.push_back(r);
    s.uncounted.clear();
    s.save();

    if (out.success) {
        progress("exporting bundle");
        try {
            export_proof(s, s.dir / "bundle", threads);
            out.bundle = (s.dir / "bundle").string();
        }
        catch (const NotProven & e) {
            out.export_error = e.what();
        }
    }
    return out;
}

auto d2p::commit_reduction(Session & s, const CommitRequest & req) -> string
{
    if (req.patterns.empty())
        throw SessionError{"a C entry needs at least one pattern"};
    if (req.evidence && req.assertion)
        throw SessionError{"give evidence or an assertion, not both"};

    CEntry e;
    e.patterns = req.patterns;
    e.principal = req.principal;
    e.fragment = req.fragment;
    if (req.evidence) {
        Evidence ev;
        try {
            ev = parse_evidence(*req.evidence);
        }
        catch (const ParseError & ex) {
            throw EvidenceReplayFailed{ex.what()};
        }
        replay_evidence(ev);
        e.status = ev.method == "pair-merge" ? EntryStatus::PairProved : EntryStatus::HeuristicProved;
        e.evidence = format_evidence(ev);
        e.fragment = ev.fragment;
        if (ev.method == "pair-merge") {
            vector<string> ps;
            for (auto & [a, b] : ev.pairs)
                ps.push_back(a + "," + b);
            e.reason = "pair merge relies on declared distant pairs " + join(ps);
        }
    }
    else if (req.assertion) {
        if (req.assertion->empty())
            throw SessionError{"an assertion needs a justification"};
        e.status = EntryStatus::Asserted;
        e.reason = *req.assertion;
    }
    else
        e.status = EntryStatus::Pending;

    if (! e.fragment.empty())
        validate(parse_fragment(e.fragment));

    if (req.id.empty()) {
        int n = s.entries.size() + 1;
        do
            e.id = "entry" + std::to_string(n++);
        while (s.find_entry(e.id));
    }
    else {
        check_id(req.id);
        if (s.find_entry(req.id))
            throw SessionError{"entry '" + req.id + "' already exists"};
        e.id = req.id;
    }
    for (auto & p : e.patterns) {
        if (p.id.empty())
            p.id = e.id + "-" + std::to_string(&p - e.patterns.data() + 1);
        if (p.provenance.empty())
            p.provenance = "entry " + e.id;
    }

    s.entries.push_back(e);
    s.uncounted.push_back(e.id);
    s.save();
    return e.id;
}

namespace
{
    auto verify_transcript(const LpModel & model, const Certificate & cert, bool & ok) -> string
    {
        std::ostringstream t;
        t << "rows " << model.constraints.size() << "\n";
        t << "variables " << model.variables.size() << "\n";
        t << "alpha " << cert.alpha.str() << "\n";
        Rational least;
        bool first = true;
        for (auto & c : model.constraints) {
            auto sl = slack(c, cert, model);
            if (first || sl < least)
                least = sl, first = false;
        }
        t << "least-slack " << least.str() << "\n";
        bool v = verify(model, cert);
        t << "verify " << (v ? "ok" : "FAILED") << "\n";
        bool enough = cert.alpha >= Rational{4};
        t << "alpha-at-least-4 " << (enough ? "yes" : "no") << "\n";
        ok = v && enough;
        return t.str();
    }

    const string replay_description =
        "Replay of this bundle\n"
        "1. Enumerate the canonical words of kinds V3, F3 and F5 from scratch.\n"
        "2. Drop every word matching a pattern under c/*.pat and build the model; it must equal model.txt.\n"
        "3. Check certificate.txt against every row with exact rationals; alpha must be at least 4.\n"
        "4. Replay each c/*.evidence from its embedded fragment; list obligations.txt as manual steps.\n"
        "5. Recompute the 6+ absorption report from the c/*.frag drawings; it must equal c6plus.txt with no UNABSORBED line.\n"
        "6. Check every file against the sha256 in MANIFEST.json.\n"
        "Run: d2p replay <bundle-dir>\n";
}

auto d2p::export_proof(const Session & s, const fs::path & out, unsigned threads) -> void
{
    if (s.rounds.empty() || s.rounds.back().outcome != "Success")
        throw NotProven{"the last round is not a Success"};
    if (! s.uncounted.empty())
        throw NotProven{"C changed since the last round; iterate again"};
    for (auto & e : s.entries)
        if (e.status == EntryStatus::Pending)
            throw NotProven{"entry '" + e.id + "' is still Pending"};

    // Everything is rechecked here rather than trusted from the session.
    auto d = load_d(s);
    auto model = build_session_model(d, s.patterns(), threads);
    auto cert = parse_certificate(s.certificate);
    bool ok = false;
    auto transcript = verify_transcript(model, cert, ok);
    if (! ok)
        throw NotProven{"certificate does not establish alpha >= 4"};
    for (auto & e : s.entries)
        if (! e.evidence.empty())
            replay_evidence(parse_evidence(e.evidence));
    int unabsorbed = 0;
    auto c6 = absorption_report(s.entries, &unabsorbed);
    if (unabsorbed)
        throw NotProven{std::to_string(unabsorbed) + " overloaded 6+ contexts are unabsorbed"};

    vector<pair<string, string>> files;
    files.emplace_back("model.txt", format_model(model));
    files.emplace_back("certificate.txt", s.certificate);
    files.emplace_back("verify.txt", transcript);
    files.emplace_back("c6plus.txt", c6);
    string obligations;
    for (auto & e : s.entries) {
        for (auto & f : entry_files(e))
            files.push_back(f);
        if (e.status == EntryStatus::Asserted)
            obligations += "asserted " + e.id + ": " + e.reason + "\n";
        else if (e.status == EntryStatus::PairProved)
            obligations += "relies-on " + e.id + ": " + e.reason + "\n";
    }
    files.emplace_back("obligations.txt", obligations);
    files.emplace_back("REPLAY.txt", replay_description);

    json m;
    m["format"] = "d2p-bundle-1";
    m["session"] = s.id;
    m["alpha"] = cert.alpha.str();
    json c_json = json::array();
    for (auto & e : s.entries)
        c_json.push_back({{"id", e.id}, {"status", status_name(e.status)}});
    m["c"] = c_json;
    json f_json = json::object();
    fs::create_directories(out);
    for (auto & [name, contents] : files) {
        write_file(out / name, contents);
        f_json[name] = sha256_hex(contents);
    }
    m["files"] = f_json;
    write_file(out / "MANIFEST.json", m.dump(2) + "\n");
}

auto d2p::replay_bundle(const fs::path & dir, unsigned threads) -> ReplayReport
{
    ReplayReport r;
    auto say = [&](const string & line) { r.transcript.push_back(line); };
    try {
        auto m = json::parse(read_file(dir / "MANIFEST.json"));
        for (auto & [name, hash] : m.at("files").items())
            if (sha256_hex(read_file(dir / name)) != hash.get<string>()) {
                say("hash mismatch: " + name);
                return r;
            }
        say("hashes ok");

        vector<CEntry> entries;
        vector<Pattern> patterns;
        for (auto & c : m.at("c")) {
            CEntry e;
            e.id = c.at("id");
            e.status = parse_status(c.at("status"));
            e.patterns = parse_pattern_file(read_file(dir / "c" / (e.id + ".pat")));
            if (fs::exists(dir / "c" / (e.id + ".frag")))
                e.fragment = read_file(dir / "c" / (e.id + ".frag"));
            if (fs::exists(dir / "c" / (e.id + ".evidence")))
                e.evidence = read_file(dir / "c" / (e.id + ".evidence"));
            if (e.status == EntryStatus::Pending) {
                say("pending entry " + e.id);
                return r;
            }
            if ((e.status == EntryStatus::HeuristicProved || e.status == EntryStatus::PairProved) && e.evidence.empty()) {
                say("entry " + e.id + " claims proof but carries no evidence");
                return r;
            }
            patterns.insert(patterns.end(), e.patterns.begin(), e.patterns.end());
            entries.push_back(std::move(e));
        }

        vector<ConfigWord> d;
        for (auto k : all_kinds) {
            auto w = enumerate_words(k, threads);
            d.insert(d.end(), w.begin(), w.end());
        }
        auto model = build_session_model(d, patterns, threads);
        if (format_model(model) != read_file(dir / "model.txt")) {
            say("model.txt differs from the model rebuilt from D and C");
            return r;
        }
        say("model rebuilt: " + std::to_string(model.constraints.size()) + " rows");

        auto cert = parse_certificate(read_file(dir / "certificate.txt"));
        bool ok = false;
        auto t = verify_transcript(model, cert, ok);
        for (auto & l : lines_of(t))
            say(l);
        if (! ok)
            return r;

        for (auto & e : entries) {
            if (e.evidence.empty()) {
                if (e.status == EntryStatus::Asserted)
                    say("manual obligation " + e.id);
                continue;
            }
            replay_evidence(parse_evidence(e.evidence));
            say("evidence ok " + e.id);
        }

        int unabsorbed = 0;
        auto c6 = absorption_report(entries, &unabsorbed);
        if (c6 != read_file(dir / "c6plus.txt")) {
            say("c6plus.txt differs from the recomputed report");
            return r;
        }
        if (unabsorbed) {
            say(std::to_string(unabsorbed) + " unabsorbed 6+ contexts");
            return r;
        }
        say("absorption ok");
        r.ok = true;
    }
    catch (const std::exception & e) {
        say(string("replay failed: ") + e.what());
    }
    return r;
}

auto d2p::load_fixture_c(Session & s, const fs::path & fixtures, const string & principal) -> int
{
    int added = 0;
    for (auto & raw : lines_of(read_file(fixtures / "c.manifest"))) {
        auto line = raw.substr(0, raw.find('#'));
        std::istringstream in(line);
        string word, id, mode;
        if (! (in >> word))
            continue;
        if (word != "entry" || ! (in >> id >> mode))
            throw ParseError{"bad fixture manifest line '" + raw + "'"};
        string reason;
        std::getline(in >> std::ws, reason);
        if (s.find_entry(id))
            continue;

        CommitRequest req;
        req.id = id;
        req.principal = principal;
        req.patterns = parse_pattern_file(read_file(fixtures / "patterns" / (id + ".pat")));
        req.fragment = read_file(fixtures / "fragments" / (id + ".frag"));
        if (mode == "prove") {
            auto a = attempt_reduce(req.fragment);
            if (! a.success)
                throw SessionError{"fixture " + id + " does not reduce: " + join(a.diagnostics, "; ")};
            req.evidence = format_evidence(*a.evidence);
        }
        else if (mode == "assert") {
            if (reason.empty())
                throw ParseError{"asserted fixture " + id + " needs a reason"};
            req.assertion = reason;
        }
        else
            throw ParseError{"unknown fixture mode '" + mode + "'"};
        commit_reduction(s, req);
        ++added;
    }
    return added;
}
