#ifndef D2P_GUARD_PATCHES_HH
#define D2P_GUARD_PATCHES_HH 1

#include <d2p/configwords.hh>
#include <d2p/fragments.hh>
#include <d2p/rulespace.hh>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace d2p
{
    // The part of the plane graph forced by a word or an edge context. Vertices are assumed distinct
    // unless the structure itself identifies them.
    struct Patch
    {
        std::vector<std::uint64_t> adj;
        // 3 or 4 when the degree is forced, 0 when only the global bound of 4 is known.
        std::vector<int> exact_degree;
        std::vector<std::string> label;
        // Faces the structure forces, as vertex cycles.
        std::vector<std::vector<int>> faces;
        bool consistent = true;

        auto size() const -> int { return static_cast<int>(adj.size()); }
        auto str() const -> std::string;
    };

    // Slots given as SlotValue indices, or -1 where the slot is unknown.
    auto build_word_patch(WordKind, const std::vector<int> & slots) -> Patch;
    auto build_word_patch(const ConfigWord &) -> Patch;
    // With far_u (far_v), the 4-face on f beside u (v) also carries a triangle on its far edge.
    auto build_context_patch(const LocalEdgeContext &, bool far_u = false, bool far_v = false) -> Patch;

    // The structure a fragment demands of a host: vertices, G-edges and degree requirements.
    struct Shape
    {
        std::string name;
        std::vector<std::uint64_t> adj;
        std::vector<int> required_degree;
        std::vector<std::string> label;
        std::vector<int> order;
        // Bounded faces of the drawing; each must land on a forced face of the host.
        std::vector<std::vector<int>> faces;
    };

    auto shape_of(const PlaneFragment &) -> Shape;

    // An injective map sending edges to edges, 3-vertices to forced 3-vertices, 4-vertices to
    // vertices not forced to be 3-vertices, and drawn faces to forced faces.
    auto find_embedding(const Shape &, const Patch &) -> std::optional<std::vector<int>>;
    auto embeds(const Shape &, const Patch &) -> bool;

    struct DerivedPatterns
    {
        std::vector<Pattern> patterns;
        long matching_words = 0;
    };

    // For each shape, the exact set of canonical words of each kind whose patch contains it, written as
    // patterns with singleton or wildcard atoms; every completion of every pattern is checked to be in the set.
    auto derive_patterns(const std::vector<Shape> &, const std::vector<WordKind> & kinds) -> std::vector<DerivedPatterns>;

    struct AbsorptionEntry
    {
        LocalEdgeContext context;
        Rational transit;
        // Far triangles the transit forces at u and v.
        bool far_u = false, far_v = false;
        // Empty when no library shape fits the context.
        std::string absorbed_by;
    };

    struct NamedShape
    {
        std::string entry_id;
        Shape shape;
    };

    auto c6plus_absorption_check(const std::vector<NamedShape> & library) -> std::vector<AbsorptionEntry>;
    auto format_absorption_report(const std::vector<AbsorptionEntry> &) -> std::string;
    auto unabsorbed_count(const std::vector<AbsorptionEntry> &) -> int;
}

#endif
