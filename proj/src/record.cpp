#include "namelink/record.hpp"

namespace namelink {

const std::vector<std::string>& standard_groups() {
    static const std::vector<std::string> groups = {
        "Asian",
        "Hispanic (White or Black)",
        "Indigenous or Pacific Islander",
        "Mixed",
        "Non-Hispanic Black",
        "Non-Hispanic White",
        "Other",
        "Unknown",
    };
    return groups;
}

}  // namespace namelink
