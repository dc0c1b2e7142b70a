#include <d2p/error.hh>
#include <d2p/rational.hh>

#include <cmath>

using namespace d2p;

using std::ostream;
using std::string;

Rational::Rational(long n, long d) :
    _v(n, d)
{
    if (d == 0)
        throw ParseError{"zero denominator"};
    _v.canonicalize();
}

auto Rational::parse(const string & s) -> Rational
{
    if (s.empty())
        throw ParseError{"empty rational"};
    mpq_class v;
    if (0 != v.set_str(s, 10))
        throw ParseError{"bad rational '" + s + "'"};
    if (sgn(v.get_den()) == 0)
        throw ParseError{"zero denominator in '" + s + "'"};
    v.canonicalize();
    return Rational{v};
}

auto Rational::str() const -> string
{
    return _v.get_str();
}

auto Rational::denominator_fits(long bound) const -> bool
{
    return cmp(_v.get_den(), bound) <= 0;
}

auto Rational::operator/=(const Rational & o) -> Rational &
{
    if (o.is_zero())
        throw ParseError{"division by zero"};
    _v /= o._v;
    return *this;
}

auto Rational::snap(double x, long max_den) -> Rational
{
    // Best approximation by convergents and the last admissible semiconvergent.
    if (! std::isfinite(x))
        return Rational{0};
    long sign = x < 0 ? -1 : 1;
    double y = std::fabs(x);
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = y;
    for (int iter = 0; iter < 64; ++iter) {
        double a_d = std::floor(r);
        if (a_d > 1e12)
            break;
        long a = static_cast<long>(a_d);
        long q2 = q0 + a * q1;
        if (q2 > max_den) {
            long k = (max_den - q0) / q1;
            long pk = p0 + k * p1, qk = q0 + k * q1;
            Rational c1{sign * p1, q1}, c2{sign * pk, qk};
            double e1 = std::fabs(c1.to_double() - x), e2 = std::fabs(c2.to_double() - x);
            return e2 < e1 ? c2 : c1;
        }
        long p2 = p0 + a * p1;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
        double frac = r - a_d;
        if (frac < 1e-15)
            break;
        r = 1.0 / frac;
    }
    return Rational{sign * p1, q1};
}

auto d2p::operator<<(ostream & s, const Rational & r) -> ostream &
{
    return s << r.str();
}
