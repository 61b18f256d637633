#include "namelink/unicode.hpp"

#include <array>
#include <utility>

namespace namelink {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Latin base + combining mark -> precomposed code point.
struct Composition {
    char32_t base;
    char32_t mark;
    char32_t composed;
};

// U+0300 grave, U+0301 acute, U+0302 circumflex, U+0303 tilde,
// U+0308 diaeresis, U+030A ring above, U+0327 cedilla.
constexpr Composition kCompositions[] = {
    {U'A', 0x300, 0x00C0}, {U'A', 0x301, 0x00C1}, {U'A', 0x302, 0x00C2},
    {U'A', 0x303, 0x00C3}, {U'A', 0x308, 0x00C4}, {U'A', 0x30A, 0x00C5},
    {U'C', 0x327, 0x00C7}, {U'E', 0x300, 0x00C8}, {U'E', 0x301, 0x00C9},
    {U'E', 0x302, 0x00CA}, {U'E', 0x308, 0x00CB}, {U'I', 0x300, 0x00CC},
    {U'I', 0x301, 0x00CD}, {U'I', 0x302, 0x00CE}, {U'I', 0x308, 0x00CF},
    {U'N', 0x303, 0x00D1}, {U'O', 0x300, 0x00D2}, {U'O', 0x301, 0x00D3},
    {U'O', 0x302, 0x00D4}, {U'O', 0x303, 0x00D5}, {U'O', 0x308, 0x00D6},
    {U'U', 0x300, 0x00D9}, {U'U', 0x301, 0x00DA}, {U'U', 0x302, 0x00DB},
    {U'U', 0x308, 0x00DC}, {U'Y', 0x301, 0x00DD},
    {U'a', 0x300, 0x00E0}, {U'a', 0x301, 0x00E1}, {U'a', 0x302, 0x00E2},
    {U'a', 0x303, 0x00E3}, {U'a', 0x308, 0x00E4}, {U'a', 0x30A, 0x00E5},
    {U'c', 0x327, 0x00E7}, {U'e', 0x300, 0x00E8}, {U'e', 0x301, 0x00E9},
    {U'e', 0x302, 0x00EA}, {U'e', 0x308, 0x00EB}, {U'i', 0x300, 0x00EC},
    {U'i', 0x301, 0x00ED}, {U'i', 0x302, 0x00EE}, {U'i', 0x308, 0x00EF},
    {U'n', 0x303, 0x00F1}, {U'o', 0x300, 0x00F2}, {U'o', 0x301, 0x00F3},
    {U'o', 0x302, 0x00F4}, {U'o', 0x303, 0x00F5}, {U'o', 0x308, 0x00F6},
    {U'u', 0x300, 0x00F9}, {U'u', 0x301, 0x00FA}, {U'u', 0x302, 0x00FB},
    {U'u', 0x308, 0x00FC}, {U'y', 0x301, 0x00FD}, {U'y', 0x308, 0x00FF},
};

char32_t compose_pair(char32_t base, char32_t mark) {
    for (const auto& c : kCompositions) {
        if (c.base == base && c.mark == mark) return c.composed;
    }
    return 0;
}

bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\r' || c == U'\n' || c == 0x00A0;
}

}  // namespace

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char b0 = static_cast<unsigned char>(s[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int extra;
        char32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            extra = 1;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            extra = 2;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            extra = 3;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + static_cast<std::size_t>(extra) >= s.size()) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k <= extra; ++k) {
            const unsigned char bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

std::string utf8_encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::u32string compose_latin(std::u32string_view s) {
    std::u32string out;
    out.reserve(s.size());
    for (char32_t c : s) {
        if (!out.empty()) {
            if (const char32_t composed = compose_pair(out.back(), c)) {
                out.back() = composed;
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::u32string to_upper(std::u32string_view s) {
    std::u32string out(s);
    for (char32_t& c : out) {
        if (c >= U'a' && c <= U'z') {
            c -= 0x20;
        } else if ((c >= 0x00E0 && c <= 0x00FE) && c != 0x00F7) {
            c -= 0x20;  // Latin-1 lowercase block
        } else if (c == 0x00FF) {
            c = 0x0178;  // y with diaeresis
        } else if (c >= 0x0100 && c <= 0x017F && (c % 2 == 1) && c != 0x0131) {
            c -= 1;  // Latin Extended-A pairs upper/lower
        }
    }
    return out;
}

std::string normalize_name(std::string_view raw) {
    const std::u32string upper = to_upper(compose_latin(utf8_decode(raw)));
    std::u32string out;
    out.reserve(upper.size());
    for (char32_t c : upper) {
        if (is_space(c)) {
            if (!out.empty() && out.back() != U' ') out.push_back(U' ');
        } else {
            out.push_back(c);
        }
    }
    if (!out.empty() && out.back() == U' ') out.pop_back();
    return utf8_encode(out);
}

bool is_ascii_alpha(char32_t c) {
    return (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z');
}

bool is_vowel(char32_t c) {
    switch (c) {
        case U'A':
        case U'E':
        case U'I':
        case U'O':
        case U'U':
            return true;
        default:
            return false;
    }
}

}  // namespace namelink
