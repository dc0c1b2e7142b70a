#ifndef D2P_GUARD_TESTS_SUPPORT_HH
#define D2P_GUARD_TESTS_SUPPORT_HH 1

#include <d2p/prover.hh>

#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include <unistd.h>

#ifndef D2P_FIXTURES_DIR
#define D2P_FIXTURES_DIR "fixtures"
#endif

namespace d2p::test
{
    inline auto fixtures() -> std::filesystem::path
    {
        return D2P_FIXTURES_DIR;
    }

    inline auto fragment_text(const std::string & id) -> std::string
    {
        return read_file(fixtures() / "fragments" / (id + ".frag"));
    }

    // The "# expected ell a=1 b=2" header of a fixture, or empty.
    inline auto expected_ell(const std::string & text) -> std::map<std::string, int>
    {
        std::map<std::string, int> out;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const std::string tag = "# expected ell ";
            if (! line.starts_with(tag))
                continue;
            std::istringstream s(line.substr(tag.size()));
            std::string kv;
            while (s >> kv) {
                auto eq = kv.find('=');
                out[kv.substr(0, eq)] = std::stoi(kv.substr(eq + 1));
            }
        }
        return out;
    }

    // A fresh directory under the system temp dir, removed on destruction.
    class TempDir
    {
    private:
        std::filesystem::path _path;

    public:
        explicit TempDir(const std::string & tag)
        {
            static int counter = 0;
            _path = std::filesystem::temp_directory_path() /
                ("d2p-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
            std::filesystem::remove_all(_path);
            std::filesystem::create_directories(_path);
        }

        ~TempDir()
        {
            std::error_code ec;
            std::filesystem::remove_all(_path, ec);
        }

        TempDir(const TempDir &) = delete;
        TempDir & operator=(const TempDir &) = delete;

        auto path() const -> const std::filesystem::path & { return _path; }
    };
}

#endif
