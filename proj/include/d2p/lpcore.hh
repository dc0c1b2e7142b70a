#ifndef D2P_GUARD_LPCORE_HH
#define D2P_GUARD_LPCORE_HH 1

#include <d2p/configwords.hh>
#include <d2p/rational.hh>
#include <d2p/rulespace.hh>

#include <atomic>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace d2p
{
    // Variable 0 is alpha; the rest are the canonical F5 rule keys in sorted order.
    struct LinearConstraint
    {
        std::vector<std::pair<int, Rational>> coefficients;
        Rational rhs;
        std::string provenance;
    };

    struct LpModel
    {
        std::vector<std::string> variables;
        std::vector<LinearConstraint> constraints;

        auto variable_index(const std::string &) const -> int;
    };

    struct ModelOptions
    {
        bool nonnegative_omega = false;
    };

    auto constraint_for_word(const ConfigWord &, const std::vector<std::string> & variables) -> LinearConstraint;

    auto build_model(const std::vector<ConfigWord> & words, const ModelOptions & = {}) -> LpModel;

    struct Certificate
    {
        Rational alpha;
        std::map<std::string, Rational> omega;
    };

    struct Solution
    {
        Rational alpha_star;
        Certificate cert;
        std::vector<std::string> tight;
        long pivots = 0;
        std::string method;
    };

    struct SolveControl
    {
        const std::atomic<bool> * cancel = nullptr;
        std::function<void(const std::string &)> progress;
    };

    auto solve_exact(const LpModel &, const SolveControl & = {}) -> Solution;

    // Floating-point simplex on the same formulation, values snapped to denominators up to 64.
    auto solve_fast(const LpModel &) -> Certificate;

    // Exact answer, using solve_fast only to choose a small row subset to solve exactly first.
    auto solve_fast_then_exact(const LpModel &, const SolveControl & = {}) -> Solution;

    auto slack(const LinearConstraint &, const Certificate &, const LpModel &) -> Rational;
    auto verify(const LpModel &, const Certificate &) -> bool;
    auto tight_rows(const LpModel &, const Certificate &) -> std::vector<std::string>;

    auto format_certificate(const Certificate &) -> std::string;
    auto parse_certificate(const std::string &) -> Certificate;
    auto format_model(const LpModel &) -> std::string;
    auto parse_model(const std::string &) -> LpModel;
}

#endif
