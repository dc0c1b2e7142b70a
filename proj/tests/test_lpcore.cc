#include <d2p/configwords.hh>
#include <d2p/error.hh>
#include <d2p/lpcore.hh>

#include <doctest.h>

#include <algorithm>

using namespace d2p;

namespace
{
    auto small_words() -> std::vector<ConfigWord>
    {
        auto v3 = enumerate_words(WordKind::Vertex3);
        auto f3 = enumerate_words(WordKind::Face3);
        v3.insert(v3.end(), f3.begin(), f3.end());
        return v3;
    }

    auto has(const std::vector<std::string> & v, const std::string & s) -> bool
    {
        return std::find(v.begin(), v.end(), s) != v.end();
    }
}

TEST_CASE("the all-triangle 3-vertex row caps alpha at 3")
{
    auto model = build_model({parse_word("V3:[3/3/3]")});
    auto sol = solve_exact(model);
    CHECK(sol.alpha_star == Rational{3});
    CHECK(has(sol.tight, "V3:[3/3/3]"));
    CHECK(verify(model, sol.cert));
}

TEST_CASE("with no words the degree-4 rows cap alpha at 4")
{
    auto sol = solve_exact(build_model({}));
    CHECK(sol.alpha_star == Rational{4});
}

TEST_CASE("exact and fast-then-exact agree")
{
    auto model = build_model(small_words());
    auto a = solve_exact(model);
    auto b = solve_fast_then_exact(model);
    CHECK(a.alpha_star == b.alpha_star);
    CHECK(verify(model, a.cert));
    CHECK(verify(model, b.cert));
    auto fast = solve_fast(model);
    CHECK(fast.alpha <= a.alpha_star);
}

TEST_CASE("exact solves are repeatable byte for byte")
{
    auto model = build_model(small_words());
    auto a = solve_exact(model);
    auto b = solve_exact(model);
    CHECK(format_certificate(a.cert) == format_certificate(b.cert));
    CHECK(a.tight == b.tight);
}

TEST_CASE("certificates and models round trip through text")
{
    auto model = build_model(small_words());
    auto sol = solve_exact(model);
    auto text = format_certificate(sol.cert);
    CHECK(format_certificate(parse_certificate(text)) == text);
    CHECK(verify(model, parse_certificate(text)));
    auto mtext = format_model(model);
    CHECK(format_model(parse_model(mtext)) == mtext);
}

TEST_CASE("verify rejects missing variables")
{
    auto model = build_model(small_words());
    auto cert = solve_exact(model).cert;
    cert.omega.erase(cert.omega.begin());
    CHECK_THROWS_AS(verify(model, cert), MissingVariable);
}

TEST_CASE("a one-in-a-million nudge in a tightening direction breaks verify")
{
    auto model = build_model(small_words());
    auto sol = solve_exact(model);
    const Rational eps{1, 1000000};

    auto bumped = sol.cert;
    bumped.alpha += eps;
    CHECK(! verify(model, bumped));

    // Each omega that occurs in a tight row must break some tight row when moved one way or the other.
    for (auto & [name, value] : sol.cert.omega) {
        int idx = model.variable_index(name);
        bool in_tight = false;
        for (auto & c : model.constraints)
            if (slack(c, sol.cert, model).is_zero())
                for (auto & [v, q] : c.coefficients)
                    in_tight = in_tight || (v == idx && ! q.is_zero());
        if (! in_tight)
            continue;
        auto up = sol.cert, down = sol.cert;
        up.omega[name] += eps;
        down.omega[name] -= eps;
        INFO(name);
        CHECK((! verify(model, up) || ! verify(model, down)));
    }
}

TEST_CASE("nonnegative omega never helps")
{
    auto words = small_words();
    auto free = solve_exact(build_model(words));
    ModelOptions o;
    o.nonnegative_omega = true;
    auto model = build_model(words, o);
    auto nonneg = solve_exact(model);
    CHECK(nonneg.alpha_star <= free.alpha_star);
    for (auto & [k, v] : nonneg.cert.omega)
        CHECK(v.sign() >= 0);
}

TEST_CASE("tight rows are exactly the zero-slack rows")
{
    auto model = build_model(small_words());
    auto sol = solve_exact(model);
    auto tight = tight_rows(model, sol.cert);
    for (auto & c : model.constraints)
        CHECK(slack(c, sol.cert, model).is_zero() == has(tight, c.provenance));
}
