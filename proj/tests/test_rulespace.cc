#include <d2p/configwords.hh>
#include <d2p/error.hh>
#include <d2p/rulespace.hh>

#include <doctest.h>

#include <algorithm>

using namespace d2p;

TEST_CASE("rule keys round trip through text")
{
    auto keys = all_rule_keys(SlotValue::F5);
    CHECK(! keys.empty());
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    for (auto & k : keys)
        CHECK(parse_rule_key(k.str()) == k);
    CHECK_THROWS_AS(parse_rule_key("Q(5;3,3)"), ParseError);
}

TEST_CASE("mirror images give the same key")
{
    CHECK(make_ab_key(RuleTemplate::A, SlotValue::F5, SlotValue::F3, SlotValue::F6P) ==
        make_ab_key(RuleTemplate::A, SlotValue::F5, SlotValue::F6P, SlotValue::F3));
    CHECK(make_c_key(SlotValue::F5, SlotValue::F3, SlotValue::F4, SlotValue::F5, SlotValue::F6P) ==
        make_c_key(SlotValue::F5, SlotValue::F6P, SlotValue::F5, SlotValue::F4, SlotValue::F3));
}

TEST_CASE("fixed values of the 6+ rules")
{
    using enum SlotValue;
    CHECK(t_fixed_value(make_ab_key(RuleTemplate::A, F6P, F3, F3)) == Rational{2, 3});
    CHECK(t_fixed_value(make_ab_key(RuleTemplate::B, F6P, F4, F5)) == Rational{1, 3});
    CHECK(t_fixed_value(make_ab_key(RuleTemplate::B, F6P, F5, F5)) == Rational{0});
    CHECK(t_fixed_value(make_c_key(F6P, F5, F3, F5, F5)) == Rational{2, 3});
    CHECK(t_fixed_value(make_c_key(F6P, F4, F4, F5, F5)) == Rational{2, 3});
    CHECK(t_fixed_value(make_c_key(F6P, F5, F5, F5, F5)) == Rational{1, 3});
    CHECK_THROWS_AS(t_fixed_value(make_ab_key(RuleTemplate::A, F5, F3, F3)), NotSixPlus);
}

TEST_CASE("the all-triangle 3-vertex has no rules")
{
    CHECK(applicable_rules(parse_word("V3:[3/3/3]")).empty());
}

TEST_CASE("a 5-face gives to its 3-vertices and pays nothing to itself")
{
    auto rules = applicable_rules(parse_word("F5:[v3/5/4/5/4/5/4/5/4/5]"));
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].key.tmpl == RuleTemplate::A);
    CHECK(rules[0].direction == Direction::Outgoing);
    CHECK(rules[0].multiplicity == 1);
}

TEST_CASE("a 3-face next to three 6+ faces receives through template C")
{
    auto rules = applicable_rules(parse_word("F3:[4/6p/4/6p/4/6p]"));
    int incoming = 0;
    for (auto & r : rules) {
        CHECK(r.direction == Direction::Incoming);
        if (r.key.tmpl == RuleTemplate::C)
            incoming += r.multiplicity;
    }
    CHECK(incoming == 3);
}

TEST_CASE("every restated rule conserves its total")
{
    auto apps = restated_rule_applications();
    CHECK(! apps.empty());
    for (auto & a : apps) {
        Rational sum{0};
        for (auto & s : a.shares)
            sum += s.amount;
        INFO(a.name, " ", a.key.str());
        CHECK(sum == t_fixed_value(a.key));
    }
}

TEST_CASE("edge contexts parse, validate and swap")
{
    auto c = parse_edge_context("E(4,3;6p;3,4;5)");
    CHECK(c.str() == "E(4,3;6p;3,4;5)");
    CHECK(swapped(swapped(c)) == c);
    CHECK_THROWS_AS(parse_edge_context("E(4,4;6p;3;3,3)"), MalformedContext);
    CHECK_THROWS_AS(parse_edge_context("E(5,4;6p;3,3,3;3,3)"), MalformedContext);
    CHECK_THROWS_AS(parse_edge_context("E(4,4)"), ParseError);
}

TEST_CASE("transit does not depend on which endpoint is called u")
{
    for (auto & c : enumerate_overloaded_edges())
        CHECK(edge_transit(c) == edge_transit(swapped(c)));
    auto c = parse_edge_context("E(4,3;4;3,6p;4)");
    CHECK(edge_transit(c) == edge_transit(swapped(c)));
}

TEST_CASE("the double T5 edge carries exactly one third and is not overloaded")
{
    auto c = parse_edge_context("E(4,4;4;3,6p;3,6p)");
    CHECK(edge_transit(c) == Rational{1, 3});
    auto over = enumerate_overloaded_edges();
    CHECK(std::find(over.begin(), over.end(), c) == over.end());
    CHECK(! over.empty());
    for (auto & o : over)
        CHECK(edge_transit(o) > Rational{1, 3});
}

TEST_CASE("a lone 3-vertex endpoint routes one third")
{
    CHECK(edge_transit(parse_edge_context("E(3,4;6p;6p;6p,6p)")) == Rational{1, 3});
    CHECK(edge_transit(parse_edge_context("E(4,4;6p;6p,6p;6p,6p)")) == Rational{0});
}
