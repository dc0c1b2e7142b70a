#ifndef D2P_GUARD_RATIONAL_HH
#define D2P_GUARD_RATIONAL_HH 1

#include <gmpxx.h>

#include <compare>
#include <ostream>
#include <string>

namespace d2p
{
    // Exact rational, always in lowest terms with a positive denominator.
    class Rational
    {
    private:
        mpq_class _v;

    public:
        Rational() = default;
        Rational(long n) : _v(n) {}
        Rational(long n, long d);
        explicit Rational(const mpq_class & v) : _v(v) { _v.canonicalize(); }

        // Accepts "p/q" or "p".
        static auto parse(const std::string &) -> Rational;

        auto str() const -> std::string;
        auto to_double() const -> double { return _v.get_d(); }
        auto raw() const -> const mpq_class & { return _v; }
        auto sign() const -> int { return sgn(_v); }
        auto is_zero() const -> bool { return sgn(_v) == 0; }
        auto denominator_fits(long bound) const -> bool;

        // Nearest rational with denominator at most max_den (continued fractions).
        static auto snap(double x, long max_den) -> Rational;

        auto operator+=(const Rational & o) -> Rational & { _v += o._v; return *this; }
        auto operator-=(const Rational & o) -> Rational & { _v -= o._v; return *this; }
        auto operator*=(const Rational & o) -> Rational & { _v *= o._v; return *this; }
        auto operator/=(const Rational & o) -> Rational &;

        friend auto operator+(Rational a, const Rational & b) -> Rational { return a += b; }
        friend auto operator-(Rational a, const Rational & b) -> Rational { return a -= b; }
        friend auto operator*(Rational a, const Rational & b) -> Rational { return a *= b; }
        friend auto operator/(Rational a, const Rational & b) -> Rational { return a /= b; }
        friend auto operator-(const Rational & a) -> Rational { return Rational{mpq_class(-a._v)}; }

        friend auto operator==(const Rational & a, const Rational & b) -> bool { return a._v == b._v; }
        friend auto operator<=>(const Rational & a, const Rational & b) -> std::strong_ordering
        {
            int c = cmp(a._v, b._v);
            return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
        }
    };

    auto operator<<(std::ostream &, const Rational &) -> std::ostream &;
}

#endif
