#include <d2p/error.hh>

using namespace d2p;

using std::string;

Error::Error(const string & kind, const string & detail) noexcept :
    _kind(kind),
    _message(kind + ": " + detail)
{
}

auto Error::what() const noexcept -> const char *
{
    return _message.c_str();
}
