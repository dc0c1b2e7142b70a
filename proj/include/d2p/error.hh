#ifndef D2P_GUARD_ERROR_HH
#define D2P_GUARD_ERROR_HH 1

#include <exception>
#include <string>

namespace d2p
{
    class Error : public std::exception
    {
    private:
        std::string _kind, _message;

    public:
        explicit Error(const std::string & kind, const std::string & detail) noexcept;

        virtual auto what() const noexcept -> const char * override;
        auto kind() const noexcept -> const std::string & { return _kind; }
    };

#define D2P_DECLARE_ERROR(Name)                                                       \
    class Name : public Error                                                        \
    {                                                                                 \
    public:                                                                           \
        explicit Name(const std::string & detail) noexcept : Error(#Name, detail) {} \
    };

    D2P_DECLARE_ERROR(ParseError)
    D2P_DECLARE_ERROR(IllegalSlot)
    D2P_DECLARE_ERROR(WrongLength)
    D2P_DECLARE_ERROR(KindMismatch)
    D2P_DECLARE_ERROR(NotSixPlus)
    D2P_DECLARE_ERROR(MalformedContext)
    D2P_DECLARE_ERROR(MissingVariable)
    D2P_DECLARE_ERROR(Unbounded)
    D2P_DECLARE_ERROR(UnknownVertex)
    D2P_DECLARE_ERROR(TooLarge)
    D2P_DECLARE_ERROR(PairAdjacent)
    D2P_DECLARE_ERROR(InvalidFragment)
    D2P_DECLARE_ERROR(NotClosed)
    D2P_DECLARE_ERROR(EvidenceReplayFailed)
    D2P_DECLARE_ERROR(NotProven)
    D2P_DECLARE_ERROR(SessionError)

#undef D2P_DECLARE_ERROR
}

#endif
