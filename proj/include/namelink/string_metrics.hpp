#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace namelink {

// One primitive edit transforming a source string into a target string.
// `pos` indexes into the target; a deletion may sit one past its end when it
// removes trailing source characters.
enum class EditKind : std::uint8_t { insertion, deletion, substitution };

inline const char* edit_kind_name(EditKind k) {
    switch (k) {
        case EditKind::insertion: return "insertion";
        case EditKind::deletion: return "deletion";
        default: return "substitution";
    }
}

struct EditOp {
    EditKind kind;
    int pos;      // position in the target string
    char32_t ch;  // inserted/replacement character; the removed one for deletions

    bool operator==(const EditOp&) const = default;
};

// Minimal edit script, deterministic: ties between equal-cost scripts are
// broken by preferring substitution, then deletion, then insertion while
// scanning left to right.
struct EditScript {
    std::vector<EditOp> ops;

    bool empty() const { return ops.empty(); }
    std::size_t size() const { return ops.size(); }
    bool operator==(const EditScript&) const = default;
};

// Comparators operate on code points. The std::string overloads decode UTF-8
// first; inputs are expected to be normalised (see normalize_name).
int levenshtein(std::u32string_view a, std::u32string_view b);
double jaro(std::u32string_view a, std::u32string_view b);
double jaro_winkler(std::u32string_view a, std::u32string_view b);
EditScript edit_script(std::u32string_view a, std::u32string_view b);

// Replays `script` on `source`; inverse of edit_script.
std::u32string apply_edit_script(std::u32string_view source, const EditScript& script);

int levenshtein(std::string_view a, std::string_view b);
double jaro(std::string_view a, std::string_view b);
double jaro_winkler(std::string_view a, std::string_view b);
EditScript edit_script(std::string_view a, std::string_view b);
std::string apply_edit_script(std::string_view source, const EditScript& script);

}  // namespace namelink
