#include <d2p/error.hh>
#include <d2p/rulespace.hh>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

using namespace d2p;

using std::map;
using std::set;
using std::string;
using std::tuple;
using std::vector;

namespace
{
    const vector<SlotValue> face_values{SlotValue::F3, SlotValue::F4, SlotValue::F5, SlotValue::F6P};

    auto is_source(SlotValue v) -> bool
    {
        return v == SlotValue::F5 || v == SlotValue::F6P;
    }

    auto check_face(SlotValue v, const string & where) -> void
    {
        if (v == SlotValue::V3)
            throw IllegalSlot{"v3 is not a face degree in " + where};
    }

    auto strip(const string & s) -> string
    {
        string out;
        for (char c : s)
            if (c != ' ' && c != '\t')
                out.push_back(c);
        return out;
    }

    auto split_on(const string & s, char sep) -> vector<string>
    {
        vector<string> out;
        string cur;
        for (char c : s) {
            if (c == sep) {
                out.push_back(cur);
                cur.clear();
            }
            else
                cur.push_back(c);
        }
        out.push_back(cur);
        return out;
    }

    auto third(long n) -> Rational
    {
        return Rational{n, 3};
    }
}

auto d2p::make_ab_key(RuleTemplate t, SlotValue d, SlotValue l, SlotValue r) -> RuleKey
{
    if (t == RuleTemplate::C)
        throw ParseError{"make_ab_key called for a C template"};
    check_face(l, "rule key"), check_face(r, "rule key");
    if (! is_source(d))
        throw IllegalSlot{"rule source must be 5 or 6p"};
    RuleKey k;
    k.tmpl = t;
    k.d = d;
    k.l = std::min(l, r);
    k.r = std::max(l, r);
    k.lp = k.rp = SlotValue::F3;
    return k;
}

auto d2p::make_c_key(SlotValue d, SlotValue l, SlotValue lp, SlotValue rp, SlotValue r) -> RuleKey
{
    for (auto v : {l, lp, rp, r})
        check_face(v, "rule key");
    if (! is_source(d))
        throw IllegalSlot{"rule source must be 5 or 6p"};
    RuleKey k;
    k.tmpl = RuleTemplate::C;
    k.d = d;
    if (tuple{r, rp, lp, l} < tuple{l, lp, rp, r})
        std::swap(l, r), std::swap(lp, rp);
    k.l = l, k.lp = lp, k.rp = rp, k.r = r;
    return k;
}

auto RuleKey::str() const -> string
{
    string head = tmpl == RuleTemplate::A ? "A" : tmpl == RuleTemplate::B ? "B" : "C";
    string out = head + "(" + slot_name(d) + ";";
    if (tmpl == RuleTemplate::C)
        out += slot_name(l) + "," + slot_name(lp) + "|" + slot_name(rp) + "," + slot_name(r);
    else
        out += slot_name(l) + "," + slot_name(r);
    return out + ")";
}

auto d2p::parse_rule_key(const string & text) -> RuleKey
{
    auto t = strip(text);
    if (t.size() < 4 || t[1] != '(' || t.back() != ')')
        throw ParseError{"bad rule key '" + text + "'"};
    auto body = t.substr(2, t.size() - 3);
    auto semi = body.find(';');
    if (semi == string::npos)
        throw ParseError{"bad rule key '" + text + "'"};
    auto d = parse_slot(body.substr(0, semi));
    auto rest = body.substr(semi + 1);
    if (t[0] == 'A' || t[0] == 'B') {
        auto p = split_on(rest, ',');
        if (p.size() != 2)
            throw ParseError{"bad rule key '" + text + "'"};
        return make_ab_key(t[0] == 'A' ? RuleTemplate::A : RuleTemplate::B, d, parse_slot(p[0]), parse_slot(p[1]));
    }
    if (t[0] == 'C') {
        auto halves = split_on(rest, '|');
        if (halves.size() != 2)
            throw ParseError{"bad rule key '" + text + "'"};
        auto a = split_on(halves[0], ','), b = split_on(halves[1], ',');
        if (a.size() != 2 || b.size() != 2)
            throw ParseError{"bad rule key '" + text + "'"};
        return make_c_key(d, parse_slot(a[0]), parse_slot(a[1]), parse_slot(b[0]), parse_slot(b[1]));
    }
    throw ParseError{"bad rule template in '" + text + "'"};
}

auto d2p::all_rule_keys(SlotValue d) -> vector<RuleKey>
{
    set<RuleKey> keys;
    for (auto l : face_values)
        for (auto r : face_values) {
            keys.insert(make_ab_key(RuleTemplate::A, d, l, r));
            keys.insert(make_ab_key(RuleTemplate::B, d, l, r));
            for (auto lp : face_values)
                for (auto rp : face_values)
                    keys.insert(make_c_key(d, l, lp, rp, r));
        }
    return {keys.begin(), keys.end()};
}

auto d2p::applicable_rules(const ConfigWord & w) -> vector<RuleInstance>
{
    map<tuple<RuleKey, Direction, SlotValue>, int> counts;
    auto add = [&](const RuleKey & k, Direction dir) { ++counts[{k, dir, k.d}]; };

    switch (w.kind) {
    case WordKind::Face5:
        for (int i = 0; i < 5; ++i) {
            int c = 2 * i;
            if (w[c] == SlotValue::V3)
                add(make_ab_key(RuleTemplate::A, SlotValue::F5, w[c - 1], w[c + 1]), Direction::Outgoing);
            else if (w[c] == SlotValue::F3)
                add(make_ab_key(RuleTemplate::B, SlotValue::F5, w[c - 1], w[c + 1]), Direction::Outgoing);
            if (w[c + 1] == SlotValue::F3 && w[c] != SlotValue::V3 && w[c + 2] != SlotValue::V3)
                add(make_c_key(SlotValue::F5, w[c - 1], w[c], w[c + 2], w[c + 3]), Direction::Outgoing);
        }
        break;

    case WordKind::Face3:
        for (int i = 0; i < 3; ++i) {
            int c = 2 * i;
            if (is_source(w[c]))
                add(make_ab_key(RuleTemplate::B, w[c], w[c - 1], w[c + 1]), Direction::Incoming);
            if (is_source(w[c + 1]) && w[c] != SlotValue::V3 && w[c + 2] != SlotValue::V3)
                add(make_c_key(w[c + 1], w[c], w[c - 1], w[c + 3], w[c + 2]), Direction::Incoming);
        }
        break;

    case WordKind::Vertex3:
        for (int j = 0; j < 3; ++j)
            if (is_source(w[j]))
                add(make_ab_key(RuleTemplate::A, w[j], w[j - 1], w[j + 1]), Direction::Incoming);
        break;
    }

    vector<RuleInstance> out;
    for (auto & [k, n] : counts)
        out.push_back(RuleInstance{std::get<0>(k), std::get<1>(k), std::get<2>(k), n});
    return out;
}

auto d2p::t_fixed_value(const RuleKey & k) -> Rational
{
    if (k.d != SlotValue::F6P)
        throw NotSixPlus{k.str()};
    switch (k.tmpl) {
    case RuleTemplate::A:
        return third(2);
    case RuleTemplate::B:
        return (k.l == SlotValue::F4 || k.r == SlotValue::F4) ? third(1) : Rational{0};
    case RuleTemplate::C: {
        bool t2 = k.lp == SlotValue::F3 || k.rp == SlotValue::F3;
        bool t3 = (k.l == SlotValue::F4 && k.lp == SlotValue::F4) || (k.rp == SlotValue::F4 && k.r == SlotValue::F4);
        return (t2 || t3) ? third(2) : third(1);
    }
    }
    return Rational{0};
}

auto LocalEdgeContext::str() const -> string
{
    auto fan = [](const vector<SlotValue> & f) {
        string s;
        for (unsigned i = 0; i < f.size(); ++i)
            s += (i ? "," : "") + slot_name(f[i]);
        return s;
    };
    return "E(" + std::to_string(du) + "," + std::to_string(dv) + ";" + slot_name(fprime) + ";" + fan(fan_u) + ";" + fan(fan_v) + ")";
}

auto d2p::validate(const LocalEdgeContext & c) -> void
{
    for (int d : {c.du, c.dv})
        if (d != 3 && d != 4)
            throw MalformedContext{"endpoint degree must be 3 or 4 in " + c.str()};
    if (static_cast<int>(c.fan_u.size()) != c.du - 2 || static_cast<int>(c.fan_v.size()) != c.dv - 2)
        throw MalformedContext{"fan length must be degree minus 2 in " + c.str()};
    check_face(c.fprime, c.str());
    for (auto v : c.fan_u)
        check_face(v, c.str());
    for (auto v : c.fan_v)
        check_face(v, c.str());
}

auto d2p::parse_edge_context(const string & text) -> LocalEdgeContext
{
    auto t = strip(text);
    if (t.size() < 3 || t.substr(0, 2) != "E(" || t.back() != ')')
        throw ParseError{"bad edge context '" + text + "'"};
    auto parts = split_on(t.substr(2, t.size() - 3), ';');
    if (parts.size() != 4)
        throw ParseError{"bad edge context '" + text + "'"};
    auto degs = split_on(parts[0], ',');
    if (degs.size() != 2)
        throw ParseError{"bad edge context '" + text + "'"};
    LocalEdgeContext c;
    try {
        c.du = std::stoi(degs[0]);
        c.dv = std::stoi(degs[1]);
    }
    catch (const std::exception &) {
        throw ParseError{"bad degrees in '" + text + "'"};
    }
    c.fprime = parse_slot(parts[1]);
    for (auto & s : split_on(parts[2], ','))
        c.fan_u.push_back(parse_slot(s));
    for (auto & s : split_on(parts[3], ','))
        c.fan_v.push_back(parse_slot(s));
    validate(c);
    return c;
}

auto d2p::swapped(const LocalEdgeContext & c) -> LocalEdgeContext
{
    return LocalEdgeContext{c.dv, c.du, c.fprime, c.fan_v, c.fan_u};
}

namespace
{
    // Shares reaching uv from rules anchored at endpoint u (its own side of the context).
    auto endpoint_shares(int du, int dv, SlotValue fprime, const vector<SlotValue> & fan_u, const vector<SlotValue> & fan_v,
        const string & at, vector<EdgeShare> & out) -> void
    {
        using enum SlotValue;
        if (du == 3) {
            out.push_back({"T1@" + at, third(1)});
            return;
        }
        SlotValue x1 = fan_u[0], x2 = fan_u[1];

        // Triangle on the other boundary edge at u: its 2/3 rule splits towards uv when u meets the condition.
        // The far endpoint is unseen, so assume it does not, which routes the whole 1/3 here.
        if (x2 == F3) {
            bool t2 = x1 == F3;
            bool t3 = x1 == F4 && fprime == F4;
            if (t2 || t3)
                out.push_back({string(t2 ? "T2" : "T3") + "-split@" + at, third(1)});
        }

        // Triangle opposite f at u.
        if (x1 == F3 && (fprime == F4 || x2 == F4)) {
            Rational best{0};
            if (fprime == F4) {
                bool other = dv == 4 && fan_v[0] == F3;
                best = other ? Rational{1, 6} : third(1);
            }
            // Through the 4-face on the other boundary edge only the split share reaches uv, and only
            // when a second triangle sits on that face's far edge.
            if (fprime != F4 && x2 == F4)
                out.push_back({"T5-far@" + at, Rational{1, 6}});
            else
                out.push_back({"T5@" + at, best});
        }
    }
}

auto d2p::edge_transit_shares(const LocalEdgeContext & c) -> vector<EdgeShare>
{
    validate(c);
    vector<EdgeShare> out;
    if (c.fprime == SlotValue::F3 && c.du == 4 && c.dv == 4) {
        auto k = make_c_key(SlotValue::F6P, c.fan_u[1], c.fan_u[0], c.fan_v[0], c.fan_v[1]);
        auto v = t_fixed_value(k);
        string name = v == third(1) ? "T4" : (c.fan_u[0] == SlotValue::F3 || c.fan_v[0] == SlotValue::F3) ? "T2" : "T3";
        out.push_back({name + "-common", third(1)});
    }
    endpoint_shares(c.du, c.dv, c.fprime, c.fan_u, c.fan_v, "u", out);
    endpoint_shares(c.dv, c.du, c.fprime, c.fan_v, c.fan_u, "v", out);
    return out;
}

auto d2p::edge_transit(const LocalEdgeContext & c) -> Rational
{
    Rational total{0};
    for (auto & s : edge_transit_shares(c))
        total += s.amount;
    return total;
}

auto d2p::restated_rule_applications() -> vector<RuleApplication>
{
    using enum SlotValue;
    vector<RuleApplication> out;

    for (auto l : face_values)
        for (auto r : face_values)
            out.push_back({"T1", make_ab_key(RuleTemplate::A, F6P, l, r), {{"e_left", third(1)}, {"e_right", third(1)}}});

    // Edge-adjacent triangle across boundary edge e = pq.
    for (auto l : face_values)
        for (auto lp : face_values)
            for (auto rp : face_values)
                for (auto r : face_values) {
                    auto key = make_c_key(F6P, l, lp, rp, r);
                    bool cond_p = lp == F3 || (l == F4 && lp == F4);
                    bool cond_q = rp == F3 || (rp == F4 && r == F4);
                    vector<EdgeShare> shares{{"e", third(1)}};
                    if (cond_p && cond_q)
                        shares.push_back({"e_p", Rational{1, 6}}), shares.push_back({"e_q", Rational{1, 6}});
                    else if (cond_p)
                        shares.push_back({"e_p", third(1)});
                    else if (cond_q)
                        shares.push_back({"e_q", third(1)});
                    out.push_back({cond_p || cond_q ? (lp == F3 || rp == F3 ? "T2" : "T3") : "T4", key, shares});
                }

    // Vertex-adjacent triangle at p, with a 4-face y on one flank.
    for (auto l : face_values)
        for (auto r : face_values) {
            auto key = make_ab_key(RuleTemplate::B, F6P, l, r);
            if (l != F4 && r != F4) {
                out.push_back({"T6", key, {}});
                continue;
            }
            out.push_back({"T5-split", key, {{"e_left", Rational{1, 6}}, {"e_right", Rational{1, 6}}}});
            out.push_back({"T5-whole", key, {{"e_y", third(1)}}});
        }
    return out;
}

auto d2p::enumerate_overloaded_edges() -> vector<LocalEdgeContext>
{
    const vector<SlotValue> classes{SlotValue::F3, SlotValue::F4, SlotValue::F6P};
    auto fans = [&](int d) {
        vector<vector<SlotValue>> out;
        if (d == 3)
            for (auto a : classes)
                out.push_back({a});
        else
            for (auto a : classes)
                for (auto b : classes)
                    out.push_back({a, b});
        return out;
    };
    set<LocalEdgeContext> found;
    for (int du : {3, 4})
        for (int dv : {3, 4})
            for (auto fp : classes)
                for (auto & fu : fans(du))
                    for (auto & fv : fans(dv)) {
                        LocalEdgeContext c{du, dv, fp, fu, fv};
                        if (edge_transit(c) > Rational{1, 3})
                            found.insert(std::min(c, swapped(c)));
                    }
    return {found.begin(), found.end()};
}
