#ifndef D2P_GUARD_PROVER_HH
#define D2P_GUARD_PROVER_HH 1

#include <d2p/configwords.hh>
#include <d2p/lpcore.hh>
#include <d2p/rational.hh>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace d2p
{
    auto sha256_hex(const std::string &) -> std::string;

    enum class EntryStatus
    {
        HeuristicProved,
        PairProved,
        Asserted,
        Pending
    };

    auto status_name(EntryStatus) -> std::string;
    auto parse_status(const std::string &) -> EntryStatus;

    struct ReduceOptions
    {
        // Empty means: take the pivot and distant pairs declared by the fragment itself.
        std::string pivot;
        std::vector<std::pair<std::string, std::string>> pairs;
    };

    // Everything needed to rerun a reduction from scratch.
    struct Evidence
    {
        // "algorithm-a" or "pair-merge".
        std::string method;
        std::string pivot;
        std::vector<std::pair<std::string, std::string>> pairs;
        std::vector<std::string> trace;
        std::string h;
        std::string fragment;
    };

    auto format_evidence(const Evidence &) -> std::string;
    auto parse_evidence(const std::string &) -> Evidence;

    // Rebuilds (H, l) from the fragment and reruns the method; throws EvidenceReplayFailed on any mismatch.
    auto replay_evidence(const Evidence &) -> void;

    struct AttemptResult
    {
        bool success = false;
        std::optional<Evidence> evidence;
        // The problem algorithm A ran on, in ListSizeGraph text form.
        std::string h;
        std::vector<std::string> diagnostics;
    };

    // Algorithm A on H with every declared pair joined (no assertion used), then the pair merge on H.
    auto attempt_reduce(const std::string & fragment_text, const ReduceOptions & = {}) -> AttemptResult;

    struct CEntry
    {
        std::string id;
        EntryStatus status = EntryStatus::Pending;
        std::vector<Pattern> patterns;
        std::string fragment;
        std::string evidence;
        std::string reason;
        std::string principal;
    };

    struct RoundRecord
    {
        int round = 0;
        std::string alpha;
        std::string certificate_hash;
        std::string method;
        std::string outcome;
        int c_size = 0;
        std::vector<std::string> c_delta;
        std::vector<std::string> tight;
    };

    struct DSummary
    {
        WordKind kind = WordKind::Vertex3;
        long count = 0;
        std::string sha256;
    };

    class Session
    {
    public:
        std::filesystem::path dir;
        std::string id;
        std::vector<DSummary> d;
        std::vector<CEntry> entries;
        std::vector<RoundRecord> rounds;
        std::string certificate;
        std::string c6plus;
        // Entries committed since the last round.
        std::vector<std::string> uncounted;

        static auto create(const std::filesystem::path &, const std::string & id) -> Session;
        static auto open(const std::filesystem::path &) -> Session;

        auto save() const -> void;
        auto generated() const -> bool { return ! d.empty(); }
        auto find_entry(const std::string & id) const -> const CEntry *;
        auto patterns() const -> std::vector<Pattern>;
    };

    auto generate_d(Session &, unsigned threads = 1) -> void;

    // Reads the stored words back, checking counts and hashes.
    auto load_d(const Session &) -> std::vector<ConfigWord>;

    auto build_session_model(const std::vector<ConfigWord> & d, const std::vector<Pattern> &, unsigned threads = 1) -> LpModel;

    struct RoundOutcome
    {
        bool success = false;
        Rational alpha;
        std::vector<std::string> tight;
        std::string method;
        int unabsorbed = 0;
        // Set when a Success round exported a bundle; export_error says why it could not.
        std::string bundle;
        std::string export_error;
    };

    // One round of the loop. A Success round also exports a bundle into <session>/bundle.
    auto iterate(Session &, const SolveControl & = {}, unsigned threads = 1) -> RoundOutcome;

    struct CommitRequest
    {
        std::string id;
        std::vector<Pattern> patterns;
        std::optional<std::string> evidence;
        std::optional<std::string> assertion;
        // Optional drawing for asserted or pending entries; evidence carries its own.
        std::string fragment;
        std::string principal = "cli";
    };

    // Replays evidence before touching the session; returns the new entry's id.
    auto commit_reduction(Session &, const CommitRequest &) -> std::string;

    // The 6+ absorption report against every entry that carries a drawing.
    auto absorption_report(const std::vector<CEntry> &, int * unabsorbed = nullptr) -> std::string;

    // Rechecks certificate, evidence and absorption from scratch and writes a self-contained bundle.
    auto export_proof(const Session &, const std::filesystem::path & out, unsigned threads = 1) -> void;

    struct ReplayReport
    {
        bool ok = false;
        std::vector<std::string> transcript;
    };

    // Independent replay of an exported bundle: regenerate D, rebuild the model, verify, replay evidence, recheck absorption.
    auto replay_bundle(const std::filesystem::path &, unsigned threads = 1) -> ReplayReport;

    // Commits every entry of a fixture manifest, attempting reductions where the manifest asks for proof.
    auto load_fixture_c(Session &, const std::filesystem::path & fixtures, const std::string & principal = "fixtures") -> int;

    auto read_file(const std::filesystem::path &) -> std::string;
    auto write_file(const std::filesystem::path &, const std::string &) -> void;
}

#endif
