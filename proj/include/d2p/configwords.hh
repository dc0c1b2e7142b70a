#ifndef D2P_GUARD_CONFIGWORDS_HH
#define D2P_GUARD_CONFIGWORDS_HH 1

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace d2p
{
    // Declaration order is the lexicographic order used for canonical forms.
    enum class SlotValue : std::uint8_t
    {
        F3 = 0,
        F4 = 1,
        F5 = 2,
        F6P = 3,
        V3 = 4
    };

    constexpr int number_of_slot_values = 5;

    enum class WordKind : std::uint8_t
    {
        Vertex3,
        Face3,
        Face5
    };

    auto slot_name(SlotValue) -> std::string;
    auto parse_slot(const std::string &) -> SlotValue;
    auto kind_name(WordKind) -> std::string;
    auto parse_kind(const std::string &) -> WordKind;
    auto word_length(WordKind) -> int;

    // For face words, even positions are corners and odd positions are edges.
    // Corner 2i sits at vertex v_i, edge 2i+1 is the face across v_i v_{i+1}.
    auto is_corner_position(WordKind, int pos) -> bool;

    // Bitmask of SlotValues legal at a position.
    using SlotSet = std::uint8_t;
    auto slot_bit(SlotValue v) -> SlotSet;
    auto legal_slots(WordKind, int pos) -> SlotSet;

    struct ConfigWord
    {
        WordKind kind = WordKind::Vertex3;
        std::uint8_t length = 0;
        std::array<SlotValue, 10> slots{};

        auto operator[](int i) const -> SlotValue { return slots[((i % length) + length) % length]; }
        auto str() const -> std::string;
    };

    auto operator==(const ConfigWord & a, const ConfigWord & b) -> bool;
    auto operator<(const ConfigWord & a, const ConfigWord & b) -> bool;

    // Builds a word from raw slots after checking length and V3 placement, without canonicalizing.
    auto make_raw_word(WordKind, const std::vector<SlotValue> &) -> ConfigWord;

    auto canonicalize(WordKind, const std::vector<SlotValue> &) -> ConfigWord;
    auto canonicalize(const ConfigWord &) -> ConfigWord;

    // All images of the word under its symmetry group, in a fixed order.
    auto symmetry_images(const ConfigWord &) -> std::vector<ConfigWord>;

    // Parses "F5:[3/6p/v3/...]" and canonicalizes.
    auto parse_word(const std::string &) -> ConfigWord;
    auto parse_raw_word(const std::string &) -> ConfigWord;

    auto raw_word_count(WordKind) -> long;

    // Canonical words in lexicographic order.
    auto enumerate_words(WordKind, unsigned threads = 1) -> std::vector<ConfigWord>;

    struct Pattern
    {
        WordKind kind = WordKind::Vertex3;
        std::vector<SlotSet> atoms;
        std::string id;
        std::string provenance;

        auto str() const -> std::string;
    };

    auto parse_pattern(const std::string &) -> Pattern;

    auto matches(const ConfigWord &, const Pattern &) -> bool;

    // Words matching no pattern, order preserved.
    auto filter_forbidden(const std::vector<ConfigWord> & words, const std::vector<Pattern> & patterns,
        unsigned threads = 1) -> std::vector<ConfigWord>;

    // Pattern file: lines "pattern <id> <text> [# provenance]"; blank lines and '#' comments ignored.
    auto parse_pattern_file(const std::string & contents) -> std::vector<Pattern>;
    auto format_pattern_file(const std::vector<Pattern> &) -> std::string;
}

template <>
struct std::hash<d2p::ConfigWord>
{
    auto operator()(const d2p::ConfigWord & w) const noexcept -> std::size_t;
};

#endif
