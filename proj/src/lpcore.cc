#include <d2p/error.hh>
#include <d2p/lpcore.hh>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

using namespace d2p;

using std::map;
using std::pair;
using std::string;
using std::unordered_map;
using std::vector;

namespace
{
    const string alpha_name = "alpha";

    auto variable_names() -> vector<string>
    {
        vector<string> names{alpha_name};
        for (auto & k : all_rule_keys(SlotValue::F5))
            names.push_back(k.str());
        return names;
    }

    auto normalise(vector<pair<int, Rational>> coeffs) -> vector<pair<int, Rational>>
    {
        std::sort(coeffs.begin(), coeffs.end(), [](auto & a, auto & b) { return a.first < b.first; });
        vector<pair<int, Rational>> out;
        for (auto & [v, c] : coeffs) {
            if (! out.empty() && out.back().first == v)
                out.back().second += c;
            else
                out.emplace_back(v, c);
        }
        std::erase_if(out, [](auto & p) { return p.second.is_zero(); });
        return out;
    }

    auto index_of_names(const vector<string> & names) -> unordered_map<string, int>
    {
        unordered_map<string, int> idx;
        for (int i = 0; i < static_cast<int>(names.size()); ++i)
            idx.emplace(names[i], i);
        return idx;
    }

    // Rows of the form g.x >= h, deduplicated; the solver works on the dual of max x_0.
    struct DistinctRows
    {
        vector<vector<pair<int, Rational>>> g;
        vector<Rational> h;
        vector<int> of_constraint;
    };

    auto distinct_rows(const LpModel & model) -> DistinctRows
    {
        DistinctRows d;
        unordered_map<string, int> seen;
        for (auto & c : model.constraints) {
            string key = c.rhs.str();
            for (auto & [v, q] : c.coefficients)
                key += " " + std::to_string(v) + ":" + q.str();
            auto [it, fresh] = seen.emplace(key, static_cast<int>(d.g.size()));
            if (fresh) {
                d.g.push_back(c.coefficients);
                d.h.push_back(c.rhs);
            }
            d.of_constraint.push_back(it->second);
        }
        return d;
    }

    template <typename Num_>
    struct Arith;

    template <>
    struct Arith<Rational>
    {
        static auto from(const Rational & r) -> Rational { return r; }
        static auto negative(const Rational & r) -> bool { return r.sign() < 0; }
        static auto positive(const Rational & r) -> bool { return r.sign() > 0; }
        static auto nonzero(const Rational & r) -> bool { return ! r.is_zero(); }
    };

    template <>
    struct Arith<double>
    {
        static constexpr double eps = 1e-9;
        static auto from(const Rational & r) -> double { return r.to_double(); }
        static auto negative(double r) -> bool { return r < -eps; }
        static auto positive(double r) -> bool { return r > eps; }
        static auto nonzero(double r) -> bool { return std::fabs(r) > eps; }
    };

    template <typename Num_>
    struct DualSimplex
    {
        using Ar = Arith<Num_>;

        int n = 0, m = 0;
        // Column j < m is row j of the primal with entries -g_j and cost -h_j; column m+i is artificial e_i.
        vector<vector<pair<int, Num_>>> col;
        vector<Num_> cost;
        vector<Num_> rhs;
        vector<int> basic;
        vector<char> in_basis;
        vector<vector<Num_>> binv;
        vector<Num_> xb;
        long pivots = 0;
        bool bland = true;
        const SolveControl * control = nullptr;

        DualSimplex(const DistinctRows & rows, int nvars, bool use_bland, const SolveControl * ctl) :
            n(nvars), m(static_cast<int>(rows.g.size())), bland(use_bland), control(ctl)
        {
            col.resize(m);
            cost.resize(m);
            for (int j = 0; j < m; ++j) {
                for (auto & [v, q] : rows.g[j])
                    col[j].emplace_back(v, Ar::from(-q));
                cost[j] = Ar::from(-rows.h[j]);
            }
            rhs.assign(n, Num_(0));
            rhs[0] = Num_(1);
            basic.resize(n);
            in_basis.assign(m + n, 0);
            binv.assign(n, vector<Num_>(n, Num_(0)));
            for (int i = 0; i < n; ++i) {
                basic[i] = m + i;
                in_basis[m + i] = 1;
                binv[i][i] = Num_(1);
            }
            xb = rhs;
        }

        auto column_cost(int j, bool phase1) const -> Num_
        {
            if (j >= m)
                return phase1 ? Num_(1) : Num_(0);
            return phase1 ? Num_(0) : cost[j];
        }

        auto multipliers(bool phase1) const -> vector<Num_>
        {
            vector<Num_> pi(n, Num_(0));
            for (int i = 0; i < n; ++i) {
                Num_ cb = column_cost(basic[i], phase1);
                if (! Ar::nonzero(cb))
                    continue;
                for (int k = 0; k < n; ++k)
                    if (Ar::nonzero(binv[i][k]))
                        pi[k] += cb * binv[i][k];
            }
            return pi;
        }

        auto reduced_cost(int j, const vector<Num_> & pi, bool phase1) const -> Num_
        {
            Num_ d = column_cost(j, phase1);
            if (j >= m)
                d -= pi[j - m];
            else
                for (auto & [v, q] : col[j])
                    d -= pi[v] * q;
            return d;
        }

        auto ftran(int j) const -> vector<Num_>
        {
            vector<Num_> u(n, Num_(0));
            if (j >= m) {
                for (int i = 0; i < n; ++i)
                    u[i] = binv[i][j - m];
                return u;
            }
            for (int i = 0; i < n; ++i) {
                Num_ s(0);
                for (auto & [v, q] : col[j])
                    if (Ar::nonzero(binv[i][v]))
                        s += binv[i][v] * q;
                u[i] = s;
            }
            return u;
        }

        auto pivot(int r, int j, const vector<Num_> & u) -> void
        {
            Num_ p = u[r];
            for (int k = 0; k < n; ++k)
                if (Ar::nonzero(binv[r][k]))
                    binv[r][k] /= p;
            xb[r] /= p;
            for (int i = 0; i < n; ++i) {
                if (i == r || ! Ar::nonzero(u[i]))
                    continue;
                Num_ f = u[i];
                for (int k = 0; k < n; ++k)
                    if (Ar::nonzero(binv[r][k]))
                        binv[i][k] -= f * binv[r][k];
                xb[i] -= f * xb[r];
            }
            in_basis[basic[r]] = 0;
            basic[r] = j;
            in_basis[j] = 1;
            ++pivots;
        }

        auto check_cancel() const -> void
        {
            if (control && control->cancel && control->cancel->load())
                throw SessionError{"solve cancelled"};
            if (control && control->progress && pivots % 200 == 0)
                control->progress("pivots " + std::to_string(pivots));
        }

        // Returns false if the phase is unbounded.
        auto run(bool phase1) -> bool
        {
            while (true) {
                check_cancel();
                auto pi = multipliers(phase1);
                int enter = -1;
                Num_ best(0);
                int limit = phase1 ? m + n : m;
                for (int j = 0; j < limit; ++j) {
                    if (in_basis[j])
                        continue;
                    if (j >= m)
                        continue; // artificials never re-enter
                    Num_ d = reduced_cost(j, pi, phase1);
                    if (Ar::negative(d)) {
                        if (bland) {
                            enter = j;
                            break;
                        }
                        if (enter == -1 || d < best)
                            enter = j, best = d;
                    }
                }
                if (enter == -1)
                    return true;
                if (! bland && pivots > 200000)
                    throw Unbounded{"floating point iteration limit"};
                auto u = ftran(enter);
                int leave = -1;
                Num_ ratio(0);
                for (int i = 0; i < n; ++i) {
                    if (! Ar::positive(u[i]))
                        continue;
                    Num_ q = xb[i] / u[i];
                    if (leave == -1 || q < ratio || (! (ratio < q) && basic[i] < basic[leave]))
                        leave = i, ratio = q;
                }
                if (leave == -1)
                    return false;
                pivot(leave, enter, u);
            }
        }

        // Pivot out artificials left at level zero wherever some real column can replace them.
        auto drive_out_artificials() -> void
        {
            for (int r = 0; r < n; ++r) {
                if (basic[r] < m)
                    continue;
                for (int j = 0; j < m; ++j) {
                    if (in_basis[j])
                        continue;
                    Num_ s(0);
                    for (auto & [v, q] : col[j])
                        if (Ar::nonzero(binv[r][v]))
                            s += binv[r][v] * q;
                    if (Ar::nonzero(s)) {
                        pivot(r, j, ftran(j));
                        break;
                    }
                }
            }
        }

        auto phase1_objective() const -> Num_
        {
            Num_ s(0);
            for (int i = 0; i < n; ++i)
                if (basic[i] >= m)
                    s += xb[i];
            return s;
        }

        auto solve() -> vector<Num_>
        {
            run(true);
            if (Ar::positive(phase1_objective()))
                throw Unbounded{"alpha is unbounded above"};
            drive_out_artificials();
            if (! run(false))
                throw Unbounded{"dual unbounded, model infeasible"};
            return multipliers(false);
        }
    };

    auto certificate_from(const LpModel & model, const vector<Rational> & x) -> Certificate
    {
        Certificate cert;
        cert.alpha = x[0];
        for (int i = 1; i < static_cast<int>(model.variables.size()); ++i)
            cert.omega[model.variables[i]] = x[i];
        return cert;
    }

    auto values_of(const LpModel & model, const Certificate & cert) -> vector<Rational>
    {
        vector<Rational> x(model.variables.size());
        x[0] = cert.alpha;
        for (int i = 1; i < static_cast<int>(model.variables.size()); ++i) {
            auto it = cert.omega.find(model.variables[i]);
            if (it == cert.omega.end())
                throw MissingVariable{model.variables[i]};
            x[i] = it->second;
        }
        return x;
    }

    auto solve_rows_exact(const LpModel & model, const SolveControl & ctl, string method) -> Solution
    {
        auto rows = distinct_rows(model);
        DualSimplex<Rational> simplex(rows, static_cast<int>(model.variables.size()), true, &ctl);
        auto x = simplex.solve();
        Solution s;
        s.cert = certificate_from(model, x);
        s.alpha_star = s.cert.alpha;
        s.pivots = simplex.pivots;
        s.method = std::move(method);
        return s;
    }

    auto fast_values(const LpModel & model) -> vector<double>
    {
        auto rows = distinct_rows(model);
        DualSimplex<double> simplex(rows, static_cast<int>(model.variables.size()), false, nullptr);
        return simplex.solve();
    }

    auto restrict_model(const LpModel & model, const vector<char> & keep) -> LpModel
    {
        LpModel r;
        r.variables = model.variables;
        for (unsigned i = 0; i < model.constraints.size(); ++i)
            if (keep[i])
                r.constraints.push_back(model.constraints[i]);
        return r;
    }
}

auto LpModel::variable_index(const string & name) const -> int
{
    auto it = std::find(variables.begin(), variables.end(), name);
    if (it == variables.end())
        throw MissingVariable{name};
    return static_cast<int>(it - variables.begin());
}

auto d2p::constraint_for_word(const ConfigWord & w, const vector<string> & variables) -> LinearConstraint
{
    static thread_local unordered_map<string, int> cache;
    static thread_local const vector<string> * cached_for = nullptr;
    if (cached_for != &variables) {
        cache = index_of_names(variables);
        cached_for = &variables;
    }
    LinearConstraint c;
    c.provenance = w.str();
    vector<pair<int, Rational>> coeffs{{0, Rational{-1}}};
    if (w.kind == WordKind::Face5) {
        c.rhs = Rational{-5};
        for (auto & inst : applicable_rules(w))
            coeffs.emplace_back(cache.at(inst.key.str()), Rational{-inst.multiplicity});
    }
    else {
        Rational constant{0};
        for (auto & inst : applicable_rules(w)) {
            if (inst.source == SlotValue::F6P)
                constant += t_fixed_value(inst.key) * Rational{inst.multiplicity};
            else
                coeffs.emplace_back(cache.at(inst.key.str()), Rational{inst.multiplicity});
        }
        c.rhs = -(Rational{3} + constant);
    }
    c.coefficients = normalise(coeffs);
    return c;
}

auto d2p::build_model(const vector<ConfigWord> & words, const ModelOptions & options) -> LpModel
{
    LpModel model;
    model.variables = variable_names();
    model.constraints.reserve(words.size() + 2);
    for (auto & w : words)
        model.constraints.push_back(constraint_for_word(w, model.variables));
    for (string tag : {"face4", "vertex4"})
        model.constraints.push_back(LinearConstraint{{{0, Rational{-1}}}, Rational{-4}, tag});
    if (options.nonnegative_omega)
        for (int i = 1; i < static_cast<int>(model.variables.size()); ++i)
            model.constraints.push_back(LinearConstraint{{{i, Rational{1}}}, Rational{0}, "nonneg:" + model.variables[i]});
    return model;
}

auto d2p::slack(const LinearConstraint & c, const Certificate & cert, const LpModel & model) -> Rational
{
    auto x = values_of(model, cert);
    Rational s = -c.rhs;
    for (auto & [v, q] : c.coefficients)
        s += q * x[v];
    return s;
}

namespace
{
    auto slacks(const LpModel & model, const Certificate & cert) -> vector<Rational>
    {
        auto x = values_of(model, cert);
        vector<Rational> out;
        out.reserve(model.constraints.size());
        for (auto & c : model.constraints) {
            Rational s = -c.rhs;
            for (auto & [v, q] : c.coefficients)
                s += q * x[v];
            out.push_back(s);
        }
        return out;
    }
}

auto d2p::verify(const LpModel & model, const Certificate & cert) -> bool
{
    for (auto & s : slacks(model, cert))
        if (s.sign() < 0)
            return false;
    return true;
}

auto d2p::tight_rows(const LpModel & model, const Certificate & cert) -> vector<string>
{
    auto s = slacks(model, cert);
    vector<string> out;
    for (unsigned i = 0; i < s.size(); ++i)
        if (s[i].is_zero())
            out.push_back(model.constraints[i].provenance);
    std::sort(out.begin(), out.end());
    return out;
}

auto d2p::solve_exact(const LpModel & model, const SolveControl & ctl) -> Solution
{
    auto s = solve_rows_exact(model, ctl, "exact");
    s.tight = tight_rows(model, s.cert);
    return s;
}

auto d2p::solve_fast(const LpModel & model) -> Certificate
{
    auto x = fast_values(model);
    vector<Rational> snapped;
    for (double v : x)
        snapped.push_back(Rational::snap(v, 64));
    return certificate_from(model, snapped);
}

auto d2p::solve_fast_then_exact(const LpModel & model, const SolveControl & ctl) -> Solution
{
    vector<double> x;
    try {
        x = fast_values(model);
    }
    catch (const Unbounded &) {
        return solve_exact(model, ctl);
    }

    // Exactly solve the rows that are nearly active at the float optimum. If the result is feasible for the
    // whole model it is optimal, since the restricted problem is a relaxation.
    vector<char> keep(model.constraints.size(), 0);
    for (unsigned i = 0; i < model.constraints.size(); ++i) {
        auto & c = model.constraints[i];
        double s = -c.rhs.to_double();
        for (auto & [v, q] : c.coefficients)
            s += q.to_double() * x[v];
        keep[i] = s < 1e-6 || c.provenance == "face4" || c.provenance == "vertex4";
    }
    try {
        auto restricted = restrict_model(model, keep);
        auto sol = solve_rows_exact(restricted, ctl, "fast+restricted-exact");
        if (verify(model, sol.cert)) {
            sol.tight = tight_rows(model, sol.cert);
            return sol;
        }
    }
    catch (const Unbounded &) {
    }
    return solve_exact(model, ctl);
}

auto d2p::format_certificate(const Certificate & cert) -> string
{
    string out = "alpha " + cert.alpha.str() + "\n";
    for (auto & [k, v] : cert.omega)
        out += "omega " + k + " " + v.str() + "\n";
    return out;
}

auto d2p::parse_certificate(const string & text) -> Certificate
{
    Certificate cert;
    bool have_alpha = false;
    std::istringstream in(text);
    string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        string tag, a, b;
        ls >> tag >> a;
        if (tag == "alpha") {
            cert.alpha = Rational::parse(a);
            have_alpha = true;
        }
        else if (tag == "omega" && (ls >> b))
            cert.omega[a] = Rational::parse(b);
        else
            throw ParseError{"bad certificate line '" + line + "'"};
    }
    if (! have_alpha)
        throw ParseError{"certificate has no alpha"};
    return cert;
}

auto d2p::format_model(const LpModel & model) -> string
{
    string out;
    for (auto & v : model.variables)
        out += "var " + v + "\n";
    for (auto & c : model.constraints) {
        out += "row " + c.provenance + " " + c.rhs.str() + " " + std::to_string(c.coefficients.size());
        for (auto & [v, q] : c.coefficients)
            out += " " + model.variables[v] + " " + q.str();
        out += "\n";
    }
    return out;
}

auto d2p::parse_model(const string & text) -> LpModel
{
    LpModel model;
    unordered_map<string, int> idx;
    std::istringstream in(text);
    string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        string tag;
        ls >> tag;
        if (tag == "var") {
            string name;
            ls >> name;
            idx.emplace(name, static_cast<int>(model.variables.size()));
            model.variables.push_back(name);
        }
        else if (tag == "row") {
            LinearConstraint c;
            string rhs;
            int k = 0;
            if (! (ls >> c.provenance >> rhs >> k))
                throw ParseError{"bad model row '" + line + "'"};
            c.rhs = Rational::parse(rhs);
            for (int i = 0; i < k; ++i) {
                string name, q;
                if (! (ls >> name >> q))
                    throw ParseError{"bad model row '" + line + "'"};
                auto it = idx.find(name);
                if (it == idx.end())
                    throw MissingVariable{name};
                c.coefficients.emplace_back(it->second, Rational::parse(q));
            }
            model.constraints.push_back(std::move(c));
        }
        else
            throw ParseError{"bad model line '" + line + "'"};
    }
    return model;
}
