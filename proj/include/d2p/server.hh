#ifndef D2P_GUARD_SERVER_HH
#define D2P_GUARD_SERVER_HH 1

#include <filesystem>
#include <memory>
#include <string>

namespace d2p
{
    struct ServerOptions
    {
        std::filesystem::path session;
        // Directory holding fragments/, patterns/ and c.manifest; listed by /api/fragments.
        std::filesystem::path fixtures;
        unsigned threads = 1;
    };

    // The JSON API over one session. Reads see the last saved state; writes are serialized, and a
    // write arriving while a background job holds the session is refused rather than queued.
    class ApiServer
    {
    private:
        struct Impl;
        std::unique_ptr<Impl> _imp;

    public:
        explicit ApiServer(const ServerOptions &);
        ~ApiServer();

        ApiServer(const ApiServer &) = delete;
        ApiServer & operator=(const ApiServer &) = delete;

        // Binds and serves until stop(); returns false if the port cannot be bound.
        auto listen(const std::string & host, int port) -> bool;

        // Binds to a free port and returns it; serve with listen_after_bind().
        auto bind_any(const std::string & host) -> int;
        auto listen_after_bind() -> bool;

        auto wait_until_ready() -> void;
        auto stop() -> void;
    };
}

#endif
