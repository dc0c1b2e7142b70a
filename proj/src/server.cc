#include <d2p/error.hh>
#include <d2p/prover.hh>
#include <d2p/server.hh>

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

using namespace d2p;

using std::string;
using std::vector;

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace
{
    class HttpError : public std::exception
    {
    public:
        int status;
        string kind, message;

        HttpError(int s, string k, string m) : status(s), kind(std::move(k)), message(std::move(m)) {}
        auto what() const noexcept -> const char * override { return message.c_str(); }
    };

    auto status_for(const string & kind) -> int
    {
        if (kind == "EvidenceReplayFailed")
            return 422;
        if (kind == "NotProven")
            return 409;
        if (kind == "SessionError")
            return 409;
        return 400;
    }

    auto reply(httplib::Response & res, const json & data) -> void
    {
        json env;
        env["ok"] = true;
        env["data"] = data;
        res.set_content(env.dump(), "application/json");
    }

    auto reply_error(httplib::Response & res, int status, const string & kind, const string & message) -> void
    {
        json env;
        env["ok"] = false;
        env["error"] = {{"kind", kind}, {"message", message}};
        res.status = status;
        res.set_content(env.dump(), "application/json");
    }

    auto body_json(const httplib::Request & req) -> json
    {
        try {
            auto j = json::parse(req.body);
            if (! j.is_object())
                throw HttpError{400, "BadRequest", "request body must be a JSON object"};
            return j;
        }
        catch (const json::exception & e) {
            throw HttpError{400, "BadRequest", string("bad JSON body: ") + e.what()};
        }
    }

    auto pairs_of(const json & j) -> vector<std::pair<string, string>>
    {
        vector<std::pair<string, string>> out;
        if (! j.is_array())
            throw HttpError{400, "BadRequest", "pairs must be an array of [a, b]"};
        for (auto & p : j) {
            if (! p.is_array() || p.size() != 2)
                throw HttpError{400, "BadRequest", "pairs must be an array of [a, b]"};
            out.emplace_back(p[0].get<string>(), p[1].get<string>());
        }
        return out;
    }

    auto entry_json(const CEntry & e, bool full) -> json
    {
        json j = {{"id", e.id}, {"status", status_name(e.status)}, {"patterns", e.patterns.size()}, {"reason", e.reason},
            {"principal", e.principal}, {"has_fragment", ! e.fragment.empty()}, {"has_evidence", ! e.evidence.empty()}};
        if (full) {
            j["patterns_text"] = format_pattern_file(e.patterns);
            j["fragment"] = e.fragment;
            j["evidence"] = e.evidence;
        }
        return j;
    }

    auto round_json(const RoundRecord & r) -> json
    {
        return {{"round", r.round}, {"alpha", r.alpha}, {"alpha_value", Rational::parse(r.alpha).to_double()}, {"certificate_sha256", r.certificate_hash},
            {"method", r.method}, {"outcome", r.outcome}, {"c_size", r.c_size}, {"c_delta", r.c_delta}, {"tight_count", r.tight.size()}};
    }

    struct Job
    {
        int id = 0;
        string kind;
        string state = "running";
        vector<string> progress;
        json result;
        json error;
        std::atomic<bool> cancel{false};
    };
}

struct ApiServer::Impl
{
    ServerOptions opts;
    httplib::Server http;

    // Guards snapshot, jobs and the job threads list.
    std::mutex state;
    std::shared_ptr<const Session> snapshot;
    std::map<int, std::shared_ptr<Job>> jobs;
    int next_job = 1;
    vector<std::thread> threads;

    // Held by every writer, including running jobs.
    std::mutex writer;
    std::mutex bundle;

    auto current() -> std::shared_ptr<const Session>
    {
        std::lock_guard lock{state};
        return snapshot;
    }

    auto publish(Session s) -> void
    {
        auto p = std::make_shared<const Session>(std::move(s));
        std::lock_guard lock{state};
        snapshot = p;
    }

    auto lock_writer() -> std::unique_lock<std::mutex>
    {
        std::unique_lock lock{writer, std::try_to_lock};
        if (! lock.owns_lock())
            throw HttpError{409, "SessionBusy", "a background job holds the session; retry when it finishes"};
        return lock;
    }

    auto wrap(std::function<json(const httplib::Request &)> f)
    {
        return [f = std::move(f)](const httplib::Request & req, httplib::Response & res) {
            try {
                reply(res, f(req));
            }
            catch (const HttpError & e) {
                reply_error(res, e.status, e.kind, e.message);
            }
            catch (const Error & e) {
                reply_error(res, status_for(e.kind()), e.kind(), e.what());
            }
            catch (const std::exception & e) {
                reply_error(res, 500, "InternalError", e.what());
            }
        };
    }

    auto start_job(const string & kind, std::function<json(Session &, Job &)> work) -> json
    {
        auto lock = lock_writer();
        auto job = std::make_shared<Job>();
        job->kind = kind;
        Session copy = *current();
        {
            std::lock_guard g{state};
            job->id = next_job++;
            jobs[job->id] = job;
        }
        auto run = [this, job, work = std::move(work), copy = std::move(copy), lock = std::move(lock)]() mutable {
            json result, error;
            string final_state = "done";
            try {
                result = work(copy, *job);
                publish(std::move(copy));
            }
            catch (const Error & e) {
                final_state = job->cancel ? "cancelled" : "failed";
                error = {{"kind", e.kind()}, {"message", e.what()}};
            }
            catch (const std::exception & e) {
                final_state = "failed";
                error = {{"kind", "InternalError"}, {"message", e.what()}};
            }
            lock.unlock();
            std::lock_guard g{state};
            job->result = result;
            job->error = error;
            job->state = final_state;
        };
        std::lock_guard g{state};
        threads.emplace_back(std::move(run));
        return {{"job", job->id}, {"kind", kind}, {"state", "running"}};
    }

    auto job_json(const Job & j) -> json
    {
        return {{"job", j.id}, {"kind", j.kind}, {"state", j.state}, {"progress", j.progress}, {"result", j.result}, {"error", j.error}};
    }

    auto control_for(Job & job) -> SolveControl
    {
        SolveControl c;
        c.cancel = &job.cancel;
        c.progress = [this, &job](const string & m) {
            std::lock_guard g{state};
            job.progress.push_back(m);
        };
        return c;
    }

    auto routes() -> void
    {
        http.Get("/api/status", wrap([this](const httplib::Request &) {
            auto s = current();
            json d = json::array();
            for (auto & k : s->d)
                d.push_back({{"kind", kind_name(k.kind)}, {"count", k.count}, {"sha256", k.sha256}});
            std::map<string, int> by_status;
            for (auto & e : s->entries)
                ++by_status[status_name(e.status)];
            json out = {{"id", s->id}, {"generated", s->generated()}, {"d", d}, {"c_size", s->entries.size()},
                {"c_by_status", by_status}, {"rounds", s->rounds.size()}, {"uncounted", s->uncounted}};
            if (! s->rounds.empty())
                out["last_round"] = round_json(s->rounds.back());
            else
                out["last_round"] = nullptr;
            json running = json::array();
            {
                std::lock_guard g{state};
                for (auto & [id, j] : jobs)
                    if (j->state == "running")
                        running.push_back(id);
            }
            out["running_jobs"] = running;
            return out;
        }));

        http.Get("/api/tight", wrap([this](const httplib::Request & req) {
            auto s = current();
            if (s->rounds.empty())
                throw HttpError{404, "NoRound", "no round has been run yet"};
            auto & r = s->rounds.back();
            size_t limit = r.tight.size();
            if (req.has_param("limit")) {
                try {
                    limit = std::min<size_t>(limit, std::stoul(req.get_param_value("limit")));
                }
                catch (const std::exception &) {
                    throw HttpError{400, "BadRequest", "limit must be a non-negative integer"};
                }
            }
            vector<string> tight(r.tight.begin(), r.tight.begin() + limit);
            return json{{"round", r.round}, {"alpha", r.alpha}, {"outcome", r.outcome}, {"total", r.tight.size()}, {"tight", tight}};
        }));

        http.Get(R"(/api/config/(.+))", wrap([this](const httplib::Request & req) {
            auto s = current();
            string id = req.matches[1];
            if (auto e = s->find_entry(id))
                return json{{"type", "entry"}, {"entry", entry_json(*e, true)}};
            ConfigWord w;
            try {
                w = canonicalize(parse_word(id));
            }
            catch (const Error &) {
                throw HttpError{404, "NotFound", "no entry or configuration word '" + id + "'"};
            }
            json matched = json::array();
            for (auto & e : s->entries)
                for (auto & p : e.patterns)
                    if (p.kind == w.kind && matches(w, p))
                        matched.push_back({{"entry", e.id}, {"pattern", p.str()}});
            bool tight = false;
            if (! s->rounds.empty()) {
                auto & t = s->rounds.back().tight;
                tight = std::find(t.begin(), t.end(), w.str()) != t.end();
            }
            return json{{"type", "word"}, {"word", w.str()}, {"matched_by", matched}, {"forbidden", ! matched.empty()}, {"tight", tight}};
        }));

        http.Get("/api/fragments", wrap([this](const httplib::Request &) {
            json out = json::array();
            auto dir = opts.fixtures / "fragments";
            if (! opts.fixtures.empty() && fs::is_directory(dir)) {
                vector<fs::path> files;
                for (auto & f : fs::directory_iterator(dir))
                    if (f.path().extension() == ".frag")
                        files.push_back(f.path());
                std::sort(files.begin(), files.end());
                for (auto & f : files)
                    out.push_back({{"id", f.stem().string()}, {"fragment", read_file(f)}});
            }
            return json{{"fragments", out}};
        }));

        http.Post("/api/attempt-reduce", wrap([](const httplib::Request & req) {
            auto b = body_json(req);
            if (! b.contains("fragment") || ! b["fragment"].is_string())
                throw HttpError{400, "BadRequest", "fragment text is required"};
            ReduceOptions o;
            o.pivot = b.value("pivot", "");
            if (b.contains("pairs"))
                o.pairs = pairs_of(b["pairs"]);
            auto r = attempt_reduce(b["fragment"].get<string>(), o);
            json out = {{"success", r.success}, {"h", r.h}, {"diagnostics", r.diagnostics}};
            out["evidence"] = r.evidence ? json(format_evidence(*r.evidence)) : json(nullptr);
            out["method"] = r.evidence ? json(r.evidence->method) : json(nullptr);
            return out;
        }));

        http.Post("/api/commit", wrap([this](const httplib::Request & req) {
            auto b = body_json(req);
            CommitRequest c;
            c.id = b.value("id", "");
            c.patterns = parse_pattern_file(b.value("patterns", ""));
            if (b.contains("evidence") && ! b["evidence"].is_null())
                c.evidence = b["evidence"].get<string>();
            if (b.contains("assertion") && ! b["assertion"].is_null())
                c.assertion = b["assertion"].get<string>();
            c.fragment = b.value("fragment", "");
            c.principal = "api:" + b.value("principal", string{"anonymous"});
            auto lock = lock_writer();
            Session s = *current();
            auto id = commit_reduction(s, c);
            auto e = *s.find_entry(id);
            publish(std::move(s));
            return json{{"entry", entry_json(e, false)}};
        }));

        http.Get("/api/history", wrap([this](const httplib::Request &) {
            auto s = current();
            json rounds = json::array(), commits = json::array();
            for (auto & r : s->rounds)
                rounds.push_back(round_json(r));
            for (auto & e : s->entries)
                commits.push_back({{"id", e.id}, {"status", status_name(e.status)}, {"principal", e.principal}});
            return json{{"rounds", rounds}, {"commits", commits}, {"uncounted", s->uncounted}};
        }));

        http.Get("/api/bundle", wrap([this](const httplib::Request & req) {
            auto s = current();
            auto dir = s->dir / "bundle";
            std::lock_guard g{bundle};
            // Reuse the exported bundle while it still matches the current round.
            bool fresh = s->uncounted.empty() && fs::exists(dir / "MANIFEST.json") && fs::exists(dir / "certificate.txt") &&
                read_file(dir / "certificate.txt") == s->certificate;
            if (! fresh)
                export_proof(*s, dir, opts.threads);
            if (req.has_param("file")) {
                auto name = req.get_param_value("file");
                auto m = json::parse(read_file(dir / "MANIFEST.json"));
                if (! m["files"].contains(name))
                    throw HttpError{404, "NotFound", "no bundle file '" + name + "'"};
                return json{{"file", name}, {"contents", read_file(dir / name)}};
            }
            return json{{"manifest", json::parse(read_file(dir / "MANIFEST.json"))}, {"obligations", read_file(dir / "obligations.txt")},
                {"verify", read_file(dir / "verify.txt")}, {"replay", read_file(dir / "REPLAY.txt")}};
        }));

        http.Post("/api/gen", wrap([this](const httplib::Request &) {
            return start_job("gen", [this](Session & s, Job &) {
                generate_d(s, opts.threads);
                json d = json::array();
                for (auto & k : s.d)
                    d.push_back({{"kind", kind_name(k.kind)}, {"count", k.count}});
                return json{{"d", d}};
            });
        }));

        http.Post("/api/iterate", wrap([this](const httplib::Request &) {
            return start_job("iterate", [this](Session & s, Job & job) {
                auto o = iterate(s, control_for(job), opts.threads);
                return json{{"success", o.success}, {"alpha", o.alpha.str()}, {"method", o.method}, {"tight_count", o.tight.size()},
                    {"unabsorbed", o.unabsorbed}, {"bundle", o.bundle}, {"export_error", o.export_error}};
            });
        }));

        http.Get(R"(/api/jobs/(\d+))", wrap([this](const httplib::Request & req) {
            std::lock_guard g{state};
            auto it = jobs.find(std::stoi(req.matches[1]));
            if (it == jobs.end())
                throw HttpError{404, "NotFound", "no such job"};
            return job_json(*it->second);
        }));

        http.Post(R"(/api/jobs/(\d+)/cancel)", wrap([this](const httplib::Request & req) {
            std::lock_guard g{state};
            auto it = jobs.find(std::stoi(req.matches[1]));
            if (it == jobs.end())
                throw HttpError{404, "NotFound", "no such job"};
            it->second->cancel = true;
            return job_json(*it->second);
        }));
    }
};

ApiServer::ApiServer(const ServerOptions & o) : _imp(std::make_unique<Impl>())
{
    _imp->opts = o;
    Session s = fs::exists(o.session / "manifest.json") ? Session::open(o.session) : Session::create(o.session, o.session.filename().string());
    _imp->publish(std::move(s));
    _imp->routes();
}

ApiServer::~ApiServer()
{
    stop();
    vector<std::thread> ts;
    {
        std::lock_guard g{_imp->state};
        for (auto & [id, j] : _imp->jobs)
            j->cancel = true;
        ts.swap(_imp->threads);
    }
    for (auto & t : ts)
        t.join();
}

auto ApiServer::listen(const string & host, int port) -> bool
{
    return _imp->http.listen(host, port);
}

auto ApiServer::bind_any(const string & host) -> int
{
    return _imp->http.bind_to_any_port(host);
}

auto ApiServer::listen_after_bind() -> bool
{
    return _imp->http.listen_after_bind();
}

auto ApiServer::wait_until_ready() -> void
{
    _imp->http.wait_until_ready();
}

auto ApiServer::stop() -> void
{
    if (_imp->http.is_running())
        _imp->http.stop();
}
