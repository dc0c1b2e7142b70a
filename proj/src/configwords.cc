#include <d2p/configwords.hh>
#include <d2p/error.hh>

#include <algorithm>
#include <bit>
#include <future>
#include <sstream>

using namespace d2p;

using std::string;
using std::vector;

namespace
{
    auto trim(const string & s) -> string
    {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == string::npos)
            return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    auto split(const string & s, char sep) -> vector<string>
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

    // Image slot k of a face word under rotation by 2*r and optional reflection.
    auto face_image(const ConfigWord & w, int r, bool reflect) -> ConfigWord
    {
        ConfigWord out = w;
        int n = w.length;
        for (int k = 0; k < n; ++k) {
            int src = reflect ? (2 * r - k) : (k + 2 * r);
            out.slots[k] = w.slots[((src % n) + n) % n];
        }
        return out;
    }

    auto vertex_image(const ConfigWord & w, int r, bool reflect) -> ConfigWord
    {
        ConfigWord out = w;
        for (int k = 0; k < 3; ++k) {
            int src = reflect ? (r - k) : (k + r);
            out.slots[k] = w.slots[((src % 3) + 3) % 3];
        }
        return out;
    }

    auto parse_body(const string & text, WordKind & kind) -> vector<string>
    {
        auto t = trim(text);
        auto colon = t.find(':');
        if (colon == string::npos || t.size() < colon + 3 || t[colon + 1] != '[' || t.back() != ']')
            throw ParseError{"expected KIND:[...] in '" + text + "'"};
        kind = parse_kind(t.substr(0, colon));
        return split(t.substr(colon + 2, t.size() - colon - 3), '/');
    }
}

auto d2p::slot_name(SlotValue v) -> string
{
    switch (v) {
    case SlotValue::F3: return "3";
    case SlotValue::F4: return "4";
    case SlotValue::F5: return "5";
    case SlotValue::F6P: return "6p";
    case SlotValue::V3: return "v3";
    }
    return "?";
}

auto d2p::parse_slot(const string & s) -> SlotValue
{
    auto t = trim(s);
    if (t == "3") return SlotValue::F3;
    if (t == "4") return SlotValue::F4;
    if (t == "5") return SlotValue::F5;
    if (t == "6p") return SlotValue::F6P;
    if (t == "v3") return SlotValue::V3;
    throw ParseError{"unknown slot value '" + s + "'"};
}

auto d2p::kind_name(WordKind k) -> string
{
    switch (k) {
    case WordKind::Vertex3: return "V3";
    case WordKind::Face3: return "F3";
    case WordKind::Face5: return "F5";
    }
    return "?";
}

auto d2p::parse_kind(const string & s) -> WordKind
{
    auto t = trim(s);
    if (t == "V3") return WordKind::Vertex3;
    if (t == "F3") return WordKind::Face3;
    if (t == "F5") return WordKind::Face5;
    throw ParseError{"unknown word kind '" + s + "'"};
}

auto d2p::word_length(WordKind k) -> int
{
    switch (k) {
    case WordKind::Vertex3: return 3;
    case WordKind::Face3: return 6;
    case WordKind::Face5: return 10;
    }
    return 0;
}

auto d2p::is_corner_position(WordKind k, int pos) -> bool
{
    return k != WordKind::Vertex3 && pos % 2 == 0;
}

auto d2p::slot_bit(SlotValue v) -> SlotSet
{
    return static_cast<SlotSet>(1u << static_cast<unsigned>(v));
}

auto d2p::legal_slots(WordKind k, int pos) -> SlotSet
{
    SlotSet faces = 0x0f;
    return is_corner_position(k, pos) ? static_cast<SlotSet>(faces | slot_bit(SlotValue::V3)) : faces;
}

auto d2p::operator==(const ConfigWord & a, const ConfigWord & b) -> bool
{
    return a.kind == b.kind && a.length == b.length && std::equal(a.slots.begin(), a.slots.begin() + a.length, b.slots.begin());
}

auto d2p::operator<(const ConfigWord & a, const ConfigWord & b) -> bool
{
    if (a.kind != b.kind)
        return a.kind < b.kind;
    return std::lexicographical_compare(a.slots.begin(), a.slots.begin() + a.length, b.slots.begin(), b.slots.begin() + b.length);
}

auto ConfigWord::str() const -> string
{
    string out = kind_name(kind) + ":[";
    for (int i = 0; i < length; ++i) {
        if (i)
            out += "/";
        out += slot_name(slots[i]);
    }
    return out + "]";
}

auto d2p::make_raw_word(WordKind kind, const vector<SlotValue> & raw) -> ConfigWord
{
    int n = word_length(kind);
    if (static_cast<int>(raw.size()) != n)
        throw WrongLength{kind_name(kind) + " needs " + std::to_string(n) + " slots, got " + std::to_string(raw.size())};
    ConfigWord w;
    w.kind = kind;
    w.length = static_cast<std::uint8_t>(n);
    for (int i = 0; i < n; ++i) {
        if (raw[i] == SlotValue::V3 && ! is_corner_position(kind, i))
            throw IllegalSlot{"v3 at non-corner position " + std::to_string(i) + " of a " + kind_name(kind) + " word"};
        w.slots[i] = raw[i];
    }
    return w;
}

auto d2p::symmetry_images(const ConfigWord & w) -> vector<ConfigWord>
{
    vector<ConfigWord> out;
    if (w.kind == WordKind::Vertex3) {
        for (int r = 0; r < 3; ++r)
            for (bool f : {false, true})
                out.push_back(vertex_image(w, r, f));
    }
    else {
        int d = w.length / 2;
        for (int r = 0; r < d; ++r)
            for (bool f : {false, true})
                out.push_back(face_image(w, r, f));
    }
    return out;
}

auto d2p::canonicalize(const ConfigWord & w) -> ConfigWord
{
    ConfigWord best = w;
    for (auto & img : symmetry_images(w))
        if (img < best)
            best = img;
    return best;
}

auto d2p::canonicalize(WordKind kind, const vector<SlotValue> & raw) -> ConfigWord
{
    return canonicalize(make_raw_word(kind, raw));
}

auto d2p::parse_raw_word(const string & text) -> ConfigWord
{
    WordKind kind;
    auto parts = parse_body(text, kind);
    vector<SlotValue> raw;
    for (auto & p : parts)
        raw.push_back(parse_slot(p));
    return make_raw_word(kind, raw);
}

auto d2p::parse_word(const string & text) -> ConfigWord
{
    return canonicalize(parse_raw_word(text));
}

auto d2p::raw_word_count(WordKind kind) -> long
{
    long c = 1;
    for (int i = 0; i < word_length(kind); ++i)
        c *= std::popcount(static_cast<unsigned>(legal_slots(kind, i)));
    return c;
}

namespace
{
    // Mixed-radix decoding of raw word index into slots, most significant slot first.
    auto decode(WordKind kind, long index) -> ConfigWord
    {
        int n = word_length(kind);
        ConfigWord w;
        w.kind = kind;
        w.length = static_cast<std::uint8_t>(n);
        for (int i = n - 1; i >= 0; --i) {
            int radix = is_corner_position(kind, i) ? 5 : 4;
            w.slots[i] = static_cast<SlotValue>(index % radix);
            index /= radix;
        }
        return w;
    }

    auto is_canonical(const ConfigWord & w) -> bool
    {
        for (auto & img : symmetry_images(w))
            if (img < w)
                return false;
        return true;
    }
}

auto d2p::enumerate_words(WordKind kind, unsigned threads) -> vector<ConfigWord>
{
    long total = raw_word_count(kind);
    threads = std::max(1u, threads);
    long chunk = (total + threads - 1) / threads;
    auto work = [&](long from, long to) {
        vector<ConfigWord> out;
        for (long i = from; i < to; ++i) {
            auto w = decode(kind, i);
            if (is_canonical(w))
                out.push_back(w);
        }
        return out;
    };
    // Raw indices increase lexicographically, so concatenating chunks in order keeps the result sorted.
    vector<std::future<vector<ConfigWord>>> parts;
    for (unsigned t = 0; t < threads; ++t)
        parts.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, work,
            std::min(total, t * chunk), std::min(total, (t + 1) * chunk)));
    vector<ConfigWord> result;
    for (auto & p : parts) {
        auto v = p.get();
        result.insert(result.end(), v.begin(), v.end());
    }
    return result;
}

auto Pattern::str() const -> string
{
    string out = kind_name(kind) + ":[";
    for (int i = 0; i < static_cast<int>(atoms.size()); ++i) {
        if (i)
            out += "/";
        if (atoms[i] == legal_slots(kind, i))
            out += "*";
        else {
            out += "{";
            bool first = true;
            for (int v = 0; v < number_of_slot_values; ++v)
                if (atoms[i] & (1u << v)) {
                    if (! first)
                        out += ",";
                    first = false;
                    out += slot_name(static_cast<SlotValue>(v));
                }
            out += "}";
        }
    }
    return out + "]";
}

auto d2p::parse_pattern(const string & text) -> Pattern
{
    Pattern p;
    auto parts = parse_body(text, p.kind);
    int n = word_length(p.kind);
    if (static_cast<int>(parts.size()) != n)
        throw WrongLength{"pattern '" + text + "' needs " + std::to_string(n) + " atoms"};
    for (int i = 0; i < n; ++i) {
        auto a = trim(parts[i]);
        SlotSet s = 0;
        if (a == "*")
            s = legal_slots(p.kind, i);
        else if (! a.empty() && a.front() == '{' && a.back() == '}') {
            for (auto & v : split(a.substr(1, a.size() - 2), ','))
                s |= slot_bit(parse_slot(v));
        }
        else
            s = slot_bit(parse_slot(a));
        if (s == 0)
            throw ParseError{"empty atom in pattern '" + text + "'"};
        if (s & ~legal_slots(p.kind, i))
            throw IllegalSlot{"atom " + a + " at position " + std::to_string(i) + " of pattern '" + text + "'"};
        p.atoms.push_back(s);
    }
    return p;
}

auto d2p::matches(const ConfigWord & w, const Pattern & p) -> bool
{
    if (w.kind != p.kind)
        throw KindMismatch{"word " + w.str() + " against pattern " + p.str()};
    for (auto & img : symmetry_images(w)) {
        bool ok = true;
        for (int i = 0; i < img.length && ok; ++i)
            ok = p.atoms[i] & slot_bit(img.slots[i]);
        if (ok)
            return true;
    }
    return false;
}

auto d2p::filter_forbidden(const vector<ConfigWord> & words, const vector<Pattern> & patterns, unsigned threads) -> vector<ConfigWord>
{
    threads = std::max(1u, threads);
    long total = words.size();
    long chunk = (total + threads - 1) / threads;
    auto work = [&](long from, long to) {
        vector<ConfigWord> out;
        for (long i = from; i < to; ++i) {
            auto & w = words[i];
            bool forbidden = false;
            for (auto & img : symmetry_images(w)) {
                for (auto & p : patterns) {
                    if (p.kind != w.kind)
                        continue;
                    bool ok = true;
                    for (int k = 0; k < img.length && ok; ++k)
                        ok = p.atoms[k] & slot_bit(img.slots[k]);
                    if (ok) {
                        forbidden = true;
                        break;
                    }
                }
                if (forbidden)
                    break;
            }
            if (! forbidden)
                out.push_back(w);
        }
        return out;
    };
    vector<std::future<vector<ConfigWord>>> parts;
    for (unsigned t = 0; t < threads; ++t)
        parts.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, work,
            std::min(total, t * chunk), std::min(total, (t + 1) * chunk)));
    vector<ConfigWord> result;
    for (auto & p : parts) {
        auto v = p.get();
        result.insert(result.end(), v.begin(), v.end());
    }
    return result;
}

auto d2p::parse_pattern_file(const string & contents) -> vector<Pattern>
{
    vector<Pattern> out;
    std::istringstream in(contents);
    string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        string provenance;
        auto hash = t.find('#');
        if (hash != string::npos) {
            provenance = trim(t.substr(hash + 1));
            t = trim(t.substr(0, hash));
        }
        std::istringstream ls(t);
        string keyword, id, text;
        ls >> keyword >> id >> text;
        if (keyword != "pattern" || id.empty() || text.empty())
            throw ParseError{"bad pattern line '" + line + "'"};
        auto p = parse_pattern(text);
        p.id = id;
        p.provenance = provenance;
        out.push_back(p);
    }
    return out;
}

auto d2p::format_pattern_file(const vector<Pattern> & patterns) -> string
{
    string out;
    for (auto & p : patterns) {
        out += "pattern " + p.id + " " + p.str();
        if (! p.provenance.empty())
            out += " # " + p.provenance;
        out += "\n";
    }
    return out;
}

auto std::hash<ConfigWord>::operator()(const ConfigWord & w) const noexcept -> std::size_t
{
    std::size_t h = static_cast<std::size_t>(w.kind);
    for (int i = 0; i < w.length; ++i)
        h = h * 8 + static_cast<std::size_t>(w.slots[i]);
    return h;
}
