#ifndef D2P_GUARD_RULESPACE_HH
#define D2P_GUARD_RULESPACE_HH 1

#include <d2p/configwords.hh>
#include <d2p/rational.hh>

#include <string>
#include <vector>

namespace d2p
{
    enum class RuleTemplate : std::uint8_t
    {
        A,
        B,
        C
    };

    // A: face d gives to an incident 3-vertex; l, r are the faces flanking it.
    // B: face d gives to a vertex-adjacent 3-face; l, r are the faces edge-adjacent to both.
    // C: face d gives to an edge-adjacent 3-face; at the endpoint u, l is edge-adjacent to d
    // and lp vertex-adjacent to d, symmetrically rp, r at the other endpoint.
    struct RuleKey
    {
        RuleTemplate tmpl = RuleTemplate::A;
        SlotValue d = SlotValue::F5;
        SlotValue l = SlotValue::F3, lp = SlotValue::F3, rp = SlotValue::F3, r = SlotValue::F3;

        auto str() const -> std::string;

        friend auto operator<=>(const RuleKey &, const RuleKey &) = default;
    };

    auto make_ab_key(RuleTemplate, SlotValue d, SlotValue l, SlotValue r) -> RuleKey;
    auto make_c_key(SlotValue d, SlotValue l, SlotValue lp, SlotValue rp, SlotValue r) -> RuleKey;
    auto parse_rule_key(const std::string &) -> RuleKey;

    // Every canonical key with the given source degree, sorted.
    auto all_rule_keys(SlotValue d) -> std::vector<RuleKey>;

    enum class Direction : std::uint8_t
    {
        Outgoing,
        Incoming
    };

    struct RuleInstance
    {
        RuleKey key;
        Direction direction = Direction::Outgoing;
        SlotValue source = SlotValue::F5;
        int multiplicity = 1;

        friend auto operator<=>(const RuleInstance &, const RuleInstance &) = default;
    };

    // Aggregated by (key, direction, source), sorted.
    auto applicable_rules(const ConfigWord &) -> std::vector<RuleInstance>;

    auto t_fixed_value(const RuleKey &) -> Rational;

    struct LocalEdgeContext
    {
        int du = 4, dv = 4;
        SlotValue fprime = SlotValue::F6P;
        // Ordered from the side of f' towards f.
        std::vector<SlotValue> fan_u, fan_v;

        auto str() const -> std::string;

        friend auto operator<=>(const LocalEdgeContext &, const LocalEdgeContext &) = default;
    };

    auto parse_edge_context(const std::string &) -> LocalEdgeContext;
    auto swapped(const LocalEdgeContext &) -> LocalEdgeContext;
    auto validate(const LocalEdgeContext &) -> void;

    struct EdgeShare
    {
        std::string rule;
        Rational amount;
    };

    // Contributions routed through uv, worst case over the unseen far endpoints.
    auto edge_transit_shares(const LocalEdgeContext &) -> std::vector<EdgeShare>;
    auto edge_transit(const LocalEdgeContext &) -> Rational;

    // One application of a 6+-face rule in the per-edge restatement. The edge labels name the
    // boundary edges of f touched by the rule; amounts must add up to t_fixed_value(key).
    struct RuleApplication
    {
        std::string name;
        RuleKey key;
        std::vector<EdgeShare> shares;
    };

    // Every distinct rule application shape, with all endpoint conditions made explicit.
    auto restated_rule_applications() -> std::vector<RuleApplication>;

    // Contexts with transit above 1/3, one representative per uv-swap orbit, big faces written as 6p.
    auto enumerate_overloaded_edges() -> std::vector<LocalEdgeContext>;
}

#endif
