#include "namelink/string_metrics.hpp"

#include <algorithm>

#include "namelink/unicode.hpp"

namespace namelink {

namespace {

constexpr double kWinklerPrefixScale = 0.1;
constexpr int kWinklerPrefixCap = 4;

bool all_ascii(std::string_view s) {
    for (const char c : s) {
        if (static_cast<unsigned char>(c) >= 0x80) return false;
    }
    return true;
}

template <typename Char>
int levenshtein_impl(std::basic_string_view<Char> a, std::basic_string_view<Char> b) {
    if (a == b) return 0;
    if (a.empty()) return static_cast<int>(b.size());
    if (b.empty()) return static_cast<int>(a.size());
    if (a.size() < b.size()) std::swap(a, b);

    const std::size_t m = b.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

template <typename Char>
double jaro_impl(std::basic_string_view<Char> a, std::basic_string_view<Char> b) {
    if (a.empty() && b.empty()) return 1.0;  // identity convention
    if (a.empty() || b.empty()) return 0.0;
    if (a == b) return 1.0;

    const int la = static_cast<int>(a.size());
    const int lb = static_cast<int>(b.size());
    const int window = std::max(std::max(la, lb) / 2 - 1, 0);

    // names are short; a fixed bitmap beats allocation for the common case
    constexpr int kStackLimit = 64;
    char a_stack[kStackLimit] = {0}, b_stack[kStackLimit] = {0};
    std::vector<char> a_heap, b_heap;
    char* a_matched = a_stack;
    char* b_matched = b_stack;
    if (la > kStackLimit || lb > kStackLimit) {
        a_heap.assign(la, 0);
        b_heap.assign(lb, 0);
        a_matched = a_heap.data();
        b_matched = b_heap.data();
    }

    int matches = 0;
    for (int i = 0; i < la; ++i) {
        const int lo = std::max(0, i - window);
        const int hi = std::min(lb - 1, i + window);
        for (int j = lo; j <= hi; ++j) {
            if (!b_matched[j] && a[i] == b[j]) {
                a_matched[i] = b_matched[j] = 1;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    int half_transpositions = 0;
    int j = 0;
    for (int i = 0; i < la; ++i) {
        if (!a_matched[i]) continue;
        while (!b_matched[j]) ++j;
        if (a[i] != b[j]) ++half_transpositions;
        ++j;
    }
    const double m = matches;
    const double t = half_transpositions / 2.0;
    return (m / la + m / lb + (m - t) / m) / 3.0;
}

template <typename Char>
double jaro_winkler_impl(std::basic_string_view<Char> a, std::basic_string_view<Char> b) {
    const double j = jaro_impl(a, b);
    int prefix = 0;
    const std::size_t limit =
        std::min({a.size(), b.size(), static_cast<std::size_t>(kWinklerPrefixCap)});
    while (prefix < static_cast<int>(limit) && a[prefix] == b[prefix]) ++prefix;
    return j + prefix * kWinklerPrefixScale * (1.0 - j);
}

}  // namespace

int levenshtein(std::u32string_view a, std::u32string_view b) {
    return levenshtein_impl(a, b);
}

double jaro(std::u32string_view a, std::u32string_view b) { return jaro_impl(a, b); }

double jaro_winkler(std::u32string_view a, std::u32string_view b) {
    return jaro_winkler_impl(a, b);
}

EditScript edit_script(std::u32string_view a, std::u32string_view b) {
    const std::size_t n = a.size(), m = b.size();

    // suffix[i][j] = edit distance between a[i..) and b[j..); walking it
    // forward from (0,0) yields the script in left-to-right order, which is
    // where the tie-break applies.
    std::vector<std::vector<int>> suffix(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) suffix[i][m] = static_cast<int>(n - i);
    for (std::size_t j = 0; j <= m; ++j) suffix[n][j] = static_cast<int>(m - j);
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            if (a[i] == b[j]) {
                suffix[i][j] = suffix[i + 1][j + 1];
            } else {
                suffix[i][j] = 1 + std::min({suffix[i + 1][j + 1],  // substitution
                                             suffix[i + 1][j],      // deletion
                                             suffix[i][j + 1]});    // insertion
            }
        }
    }

    EditScript script;
    script.ops.reserve(suffix[0][0]);
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        const int rest = suffix[i][j];
        if (i < n && j < m && a[i] == b[j] && suffix[i + 1][j + 1] == rest) {
            ++i;
            ++j;
        } else if (i < n && j < m && suffix[i + 1][j + 1] + 1 == rest) {
            script.ops.push_back({EditKind::substitution, static_cast<int>(j), b[j]});
            ++i;
            ++j;
        } else if (i < n && suffix[i + 1][j] + 1 == rest) {
            script.ops.push_back({EditKind::deletion, static_cast<int>(j), a[i]});
            ++i;
        } else {
            script.ops.push_back({EditKind::insertion, static_cast<int>(j), b[j]});
            ++j;
        }
    }
    return script;
}

std::u32string apply_edit_script(std::u32string_view source, const EditScript& script) {
    std::u32string out;
    std::size_t si = 0;
    for (const EditOp& op : script.ops) {
        while (static_cast<int>(out.size()) < op.pos) out.push_back(source[si++]);
        switch (op.kind) {
            case EditKind::insertion:
                out.push_back(op.ch);
                break;
            case EditKind::deletion:
                ++si;
                break;
            case EditKind::substitution:
                out.push_back(op.ch);
                ++si;
                break;
        }
    }
    while (si < source.size()) out.push_back(source[si++]);
    return out;
}

int levenshtein(std::string_view a, std::string_view b) {
    if (all_ascii(a) && all_ascii(b)) return levenshtein_impl(a, b);
    return levenshtein_impl<char32_t>(utf8_decode(a), utf8_decode(b));
}

double jaro(std::string_view a, std::string_view b) {
    if (all_ascii(a) && all_ascii(b)) return jaro_impl(a, b);
    return jaro_impl<char32_t>(utf8_decode(a), utf8_decode(b));
}

double jaro_winkler(std::string_view a, std::string_view b) {
    if (all_ascii(a) && all_ascii(b)) return jaro_winkler_impl(a, b);
    return jaro_winkler_impl<char32_t>(utf8_decode(a), utf8_decode(b));
}

EditScript edit_script(std::string_view a, std::string_view b) {
    return edit_script(utf8_decode(a), utf8_decode(b));
}

std::string apply_edit_script(std::string_view source, const EditScript& script) {
    return utf8_encode(apply_edit_script(utf8_decode(source), script));
}

}  // namespace namelink
