#include "namelink/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "namelink/allocation.hpp"
#include "namelink/corruption_engine.hpp"
#include "namelink/discrepancy_profiler.hpp"
#include "namelink/rng.hpp"
#include "namelink/unicode.hpp"

namespace namelink {

namespace {

constexpr std::size_t kPoolTarget = 220;

struct GroupStyle {
    std::vector<std::string> onsets;
    std::vector<std::string> vowels;
    std::vector<std::string> codas;
    std::array<double, 4> syllable_weights;  // 1..4 syllables
    double forename_two_term_prob;
    double surname_hyphen_prob;
    double surname_apostrophe_prob;
    double drop_final_coda_prob;  // biases vowel endings
    double unique_multiplier = 1.0;  // scales the one-off name rate
    std::vector<std::string> curated_forenames;
    std::vector<std::string> curated_surnames;
};

// Styles are caricatures tuned so name length, term structure, vowel ratios
// and prevalence differ across groups the way registry data does.
const std::map<std::string, GroupStyle>& group_styles() {
    static const std::map<std::string, GroupStyle> styles = [] {
        std::map<std::string, GroupStyle> s;

        s["Non-Hispanic White"] = {
            {"B", "BL", "BR", "C", "CH", "CHR", "CL", "D", "DR", "F", "FR", "G", "GR", "H",
             "J", "K", "KR", "L", "M", "N", "P", "PH", "PR", "R", "S", "SH", "SL", "SP",
             "ST", "STR", "T", "TH", "TR", "V", "W", "WH"},
            {"A", "E", "I", "O", "U"},
            {"N", "R", "S", "T", "L", "D", "RD", "NE", "TH", "CK", "SON", ""},
            {0.3, 0.38, 0.27, 0.05},
            0.10,
            0.02,
            0.02,
            0.25,
            1.2,
            {"JAMES", "JOHN", "ROBERT", "MICHAEL", "WILLIAM", "DAVID", "RICHARD", "THOMAS",
             "MARY", "ANNE-MARIE", "MARY ANN", "D'ARCY", "PATRICIA", "LINDA", "BARBARA",
             "ELIZABETH", "JENNIFER", "SUSAN", "MARGARET", "KAREN", "NANCY", "BETTY",
             "DOROTHY", "CHARLES", "JOSEPH", "PAUL", "MARK", "DONALD", "GEORGE", "KENNETH",
             "STEVEN", "EDWARD", "BRIAN", "SARAH", "EMILY", "LAURA", "AMY", "ANNA", "RUTH",
             "HELEN", "WALTER"},
            {"SMITH", "JOHNSON", "WILLIAMS", "JONES", "BROWN", "DAVIS", "MILLER", "WILSON",
             "MOORE", "TAYLOR", "ANDERSON", "THOMAS", "JACKSON", "WHITE", "HARRIS", "MARTIN",
             "THOMPSON", "ROBINSON", "CLARK", "LEWIS", "WALKER", "HALL", "ALLEN", "YOUNG",
             "KING", "WRIGHT", "SCOTT", "GREEN", "BAKER", "ADAMS", "NELSON", "HILL", "CAMPBELL",
             "MITCHELL", "ROBERTS", "CARTER", "PHILLIPS", "EVANS", "TURNER", "PARKER"},
        };

        s["Non-Hispanic Black"] = {
            {"D", "DAR", "J", "JA", "K", "KE", "L", "LA", "M", "MAR", "N", "R", "SH", "T", "TA",
             "TR", "DE"},
            {"A", "E", "I", "O", "AY", "EE"},
            {"N", "L", "LL", "NE", "SHA", "VON", "S", "R"},
            {0.28, 0.37, 0.28, 0.07},
            0.12,
            0.03,
            0.02,
            0.45,
            1.5,
            {"JAMES", "MICHAEL", "WILLIE", "DARNELL", "TYRONE", "JAMAL", "D'ANDRE", "MALIK",
             "ANDRE", "TA'NIYA", "DEANDRE", "MARCUS", "TERRELL", "LAMAR", "DARIUS", "KEISHA",
             "LATOYA", "TAMIKA", "EBONY", "JASMINE", "ALIYAH", "IMANI", "SHANICE", "TANISHA",
             "LATASHA", "KENYA", "AISHA", "NIA", "AMARA", "ZURI", "DOMINIQUE", "CHANTAL"},
            {"SMITH", "JOHNSON", "WILLIAMS", "JONES", "BROWN", "JACKSON", "DAVIS", "THOMAS",
             "TAYLOR", "MOORE", "WASHINGTON", "JEFFERSON", "BANKS", "GAINES", "BOLDEN",
             "MOSLEY", "WINFIELD", "HAMPTON", "RANSOM", "SIMMONS", "DOZIER", "BATTLE"},
        };

        s["Hispanic (White or Black)"] = {
            {"C", "D", "F", "G", "GU", "J", "L", "M", "P", "R", "RR", "S", "T", "V", "X", "Y"},
            {"A", "E", "I", "O", "U", "IA", "UE"},
            {"S", "Z", "N", "R", "L", "NDO", "RDO", "LIA", "CIA"},
            {0.18, 0.34, 0.36, 0.12},
            0.25,
            0.06,
            0.01,
            0.6,
            0.35,
            {"JOSE", "JUAN", "CARLOS", "MARIA", "LUIS", "JUAN CARLOS", "MARIA ELENA",
             "MIGUEL", "JORGE", "PEDRO", "RAFAEL", "FERNANDO", "ALEJANDRO", "GUADALUPE",
             "JUANA", "MARGARITA", "JOSEFINA", "ROSA", "ISABEL", "CARMEN", "LUCIA",
             "ESPERANZA", "MARIA DEL CARMEN", "JOSE LUIS", "ANA SOFIA", "MARISOL", "XIMENA",
             "CONSUELO", "DOLORES", "RAMONA"},
            {"GARCIA", "RODRIGUEZ", "MARTINEZ", "HERNANDEZ", "LOPEZ", "GONZALEZ", "PEREZ",
             "SANCHEZ", "RAMIREZ", "TORRES", "FLORES", "RIVERA", "GOMEZ", "DIAZ", "REYES",
             "MORALES", "CRUZ", "ORTIZ", "GUTIERREZ", "CHAVEZ", "RAMOS", "VARGAS",
             "CASTILLO", "JIMENEZ", "VASQUEZ", "DE LA CRUZ", "SANTIAGO-RIVERA"},
        };

        s["Asian"] = {
            {"CH", "D", "H", "J", "K", "L", "M", "N", "P", "S", "T", "W", "X", "Y", "Z", "PH",
             "TR"},
            {"A", "E", "I", "O", "U", "AI", "EI"},
            {"N", "NG", "M", "O", "U", ""},
            {0.55, 0.33, 0.1, 0.02},
            0.32,
            0.02,
            0.0,
            0.5,
            0.6,
            {"WEI", "LI", "MIN", "MEI LIN", "JUN", "CHEN", "HAO", "WEI CHEN", "YAN", "JING",
             "XIN", "MEI", "LAN", "HUI", "PING", "ANH", "LINH", "MAI", "HOA", "JIN", "SOO",
             "HYUN", "JIA YI", "MIN JUN", "HAE WON", "XIU YING", "THI MAI", "VAN ANH",
             "RAVI", "PRIYA", "ARJUN", "ANIKA"},
            {"NGUYEN", "TRAN", "LE", "PHAM", "CHEN", "WANG", "LI", "ZHANG", "LIU", "KIM",
             "PARK", "CHOI", "PATEL", "SINGH", "SHAH", "WONG", "YANG", "HUANG", "LIN", "VU",
             "HOANG", "DANG"},
        };

        s["Indigenous or Pacific Islander"] = {
            {"A", "H", "K", "KA", "L", "LO", "M", "MA", "N", "T", "TA", "W"},
            {"A", "E", "I", "O", "U", "AU", "EI"},
            {"", "NA", "LA", "NI", "KU"},
            {0.22, 0.33, 0.33, 0.12},
            0.15,
            0.04,
            0.01,
            0.7,
            0.5,
            {"KAI", "KEANU", "MOANA", "LEILANI", "KALANI", "NOELANI", "AOLANI", "MAKOA",
             "TALA", "SEFINA", "AHANU", "CHAYTON", "WINONA", "AIYANA", "TEHYA", "HONOVI",
             "KOHANA", "MIKASI", "LOMASI", "TAINI"},
            {"KAHALE", "MAHELONA", "KEALOHA", "AKANA", "NAKOA", "PALAKIKO", "KAAWA",
             "LOCKLEAR", "OXENDINE", "CHAVIS", "JACOBS", "HUNT", "BLANKS", "BULLARD"},
        };

        s["Mixed"] = {
            {"B", "C", "D", "J", "K", "L", "M", "N", "R", "S", "T", "Z"},
            {"A", "E", "I", "O", "U"},
            {"N", "R", "S", "L", "NE", ""},
            {0.28, 0.36, 0.28, 0.08},
            0.15,
            0.12,
            0.02,
            0.4,
            1.0,
            {"MAYA", "ELENA", "MARCO", "NINA", "LEO", "SOFIA", "KIRA", "DANTE", "ZARA",
             "MILAN", "NOAH", "LIAM", "AVA", "ISLA", "REMI", "JADE"},
            {"SMITH-GARCIA", "JOHNSON-LEE", "BROWN", "SILVA", "COSTA", "REED", "CRUZ-JONES",
             "TANAKA-SMITH", "OKAFOR", "ROSSI", "MORENO", "BLAKE"},
        };

        s["Other"] = {
            {"A", "AB", "AH", "F", "H", "I", "K", "KH", "M", "MO", "N", "O", "R", "S", "Y",
             "Z"},
            {"A", "E", "I", "O", "U", "AA"},
            {"D", "M", "N", "R", "S", "H", "ID", "IM"},
            {0.25, 0.35, 0.3, 0.1},
            0.2,
            0.02,
            0.01,
            0.35,
            0.8,
            {"MOHAMMED", "AHMED", "ALI", "OMAR", "HASSAN", "IBRAHIM", "YUSUF", "FATIMA",
             "AISHA", "MARIAM", "ZAINAB", "AMIRA", "LAYLA", "NOOR", "SARA", "YASMIN",
             "KHALID", "TARIQ", "SAMIR", "RANIA"},
            {"AHMED", "ALI", "KHAN", "HUSSAIN", "HASSAN", "IBRAHIM", "ABDULLAH", "RAHMAN",
             "SHEIKH", "SYED", "MALIK", "OSMAN", "FARAH", "ADEN"},
        };

        s["Unknown"] = {
            {"B", "C", "D", "G", "H", "J", "K", "L", "M", "N", "P", "R", "S", "T", "V", "W"},
            {"A", "E", "I", "O", "U"},
            {"N", "R", "S", "T", "L", "D", ""},
            {0.27, 0.37, 0.28, 0.08},
            0.1,
            0.03,
            0.01,
            0.3,
            1.0,
            {"JAMES", "MARY", "JOHN", "LINDA", "DAVID", "SARAH", "KEVIN", "DIANE", "ALEX",
             "CHRIS", "SAM", "PAT", "LEE", "JEAN", "DANA", "ROBIN"},
            {"SMITH", "JONES", "BROWN", "MILLER", "DAVIS", "MOORE", "CLARK", "HALL", "COLE",
             "FOX", "LANE", "DEAN"},
        };

        return s;
    }();
    return styles;
}

std::string pick(const std::vector<std::string>& v, SplitMix64& rng) {
    return v[static_cast<std::size_t>(rng.next_below(v.size()))];
}

// One-off names span the full structural range (1-4 syllables, occasional
// second term), so the rare tail is as diverse as a real registry's.
std::string generate_unique_name(const GroupStyle& style, SplitMix64& rng) {
    std::string name;
    const int syllables = 1 + static_cast<int>(rng.next_below(3));
    for (int s = 0; s < syllables; ++s) {
        name += pick(style.onsets, rng);
        name += pick(style.vowels, rng);
        if (rng.next_double() >= style.drop_final_coda_prob) name += pick(style.codas, rng);
    }
    if (rng.next_double() < 0.25) {
        name += " ";
        name += pick(style.onsets, rng);
        name += pick(style.vowels, rng);
    }
    return name;
}

std::string generate_term(const GroupStyle& style, SplitMix64& rng) {
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const double w : style.syllable_weights) {
        acc += w;
        cumulative.push_back(acc);
    }
    const int syllables = 1 + static_cast<int>(sample_cumulative(cumulative, rng));
    std::string term;
    for (int s = 0; s < syllables; ++s) {
        term += pick(style.onsets, rng);
        term += pick(style.vowels, rng);
        // free consonant keeps the shape space from collapsing to the
        // onset/vowel/coda grid
        if (rng.next_double() < 0.12) {
            term += static_cast<char>('B' + rng.next_below(24));
        }
        const bool last = s == syllables - 1;
        if (!last || rng.next_double() >= style.drop_final_coda_prob) {
            term += pick(style.codas, rng);
        }
    }
    if (term.size() > 9) term.resize(9);
    return term;
}

// Variant of an existing pool name sharing its initial characters, the way
// real registries fill a trigram bucket with many distinct names.
std::string make_variant(const std::string& base, const GroupStyle& style, SplitMix64& rng) {
    std::string out;
    if (rng.next_double() < 0.85) {
        // extension sibling: the whole base plus a short suffix, the
        // JAMES/JAMESON pattern that crowds real prefix buckets
        out = base;
        if (rng.next_double() < 0.5) {
            out += static_cast<char>('A' + rng.next_below(26));
        } else {
            out += pick(style.vowels, rng);
            out += pick(style.codas, rng);
        }
    } else {
        const std::size_t keep =
            std::min(base.size(), static_cast<std::size_t>(3 + rng.next_below(3)));
        out = base.substr(0, keep);
        const int extra_syllables = 1 + static_cast<int>(rng.next_below(2));
        for (int s = 0; s < extra_syllables; ++s) {
            out += pick(style.vowels, rng);
            if (rng.next_double() >= style.drop_final_coda_prob) out += pick(style.codas, rng);
        }
    }
    return out;
}

std::vector<std::string> build_pool(const std::string& group, Field field, std::uint64_t seed) {
    const GroupStyle& style = group_styles().at(group);
    const auto& curated =
        field == Field::forename ? style.curated_forenames : style.curated_surnames;

    std::vector<std::string> pool = curated;
    std::set<std::string> seen(pool.begin(), pool.end());
    SplitMix64 rng(combine_seed(combine_seed(seed, hash_bytes(group)),
                                field == Field::forename ? 0x666EULL : 0x736EULL));

    // siblings of the head names get head-adjacent ranks, so prefix buckets
    // carry several frequent distinct names the way registry buckets do
    {
        std::vector<std::string> head_siblings;
        const std::size_t heads = std::min<std::size_t>(curated.size(), 16);
        for (std::size_t h = 0; h < heads; ++h) {
            for (int k = 0; k < 5; ++k) {
                const std::string sibling = make_variant(curated[h], style, rng);
                if (sibling.size() >= 2 && seen.insert(sibling).second) {
                    head_siblings.push_back(sibling);
                }
            }
        }
        const std::size_t at = std::min<std::size_t>(pool.size(), 15);
        pool.insert(pool.begin() + at, head_siblings.begin(), head_siblings.end());
    }

    int guard = 0;
    while (pool.size() < kPoolTarget && ++guard < 100000) {
        // a family: one stem plus several extension siblings, so prefix
        // buckets hold multiple frequent, mutually similar names
        std::string stem = generate_term(style, rng);
        if (field == Field::forename && rng.next_double() < style.forename_two_term_prob) {
            stem += " " + generate_term(style, rng);
        }
        if (field == Field::surname) {
            const double roll = rng.next_double();
            if (roll < style.surname_hyphen_prob) {
                stem += "-" + generate_term(style, rng);
            } else if (roll < style.surname_hyphen_prob + style.surname_apostrophe_prob) {
                stem = "O'" + stem;
            }
        }
        if (stem.size() < 2 || !seen.insert(stem).second) continue;
        pool.push_back(stem);
        const int members = 6 + static_cast<int>(rng.next_below(3));
        for (int k = 0; k < members && pool.size() < kPoolTarget; ++k) {
            const std::string sibling = make_variant(stem, style, rng);
            if (sibling.size() >= 2 && seen.insert(sibling).second) pool.push_back(sibling);
        }
    }
    return pool;
}

std::vector<double> zipf_cumulative(std::size_t n, double alpha) {
    std::vector<double> cumulative;
    cumulative.reserve(n);
    double acc = 0.0;
    for (std::size_t r = 1; r <= n; ++r) {
        acc += std::pow(static_cast<double>(r), -alpha);
        cumulative.push_back(acc);
    }
    return cumulative;
}

// Per-group drift mechanism shapes: type mix, distance mix (1..7+), position
// mix (start, first half, second half, end, across). Minoritised groups skew
// to larger distances and distributed positions; surnames drift harder than
// forenames, as registry name changes do.
struct DriftShape {
    std::array<double, 3> type;      // del, ins, rep
    std::array<double, 7> distance;  // 1..7+
    std::array<double, 5> position;  // start, first, second, end, across
};

const std::map<std::string, std::array<DriftShape, 2>>& drift_shapes() {
    static const std::map<std::string, std::array<DriftShape, 2>> shapes = [] {
        std::map<std::string, std::array<DriftShape, 2>> m;
        // {forename, surname}
        m["Non-Hispanic White"] = {
            DriftShape{{.20, .20, .60}, {.08, .14, .24, .21, .13, .10, .10}, {.01, .03, .38, .22, .36}},
            DriftShape{{.26, .26, .48}, {.010, .015, .030, .060, .130, .210, .545}, {.00, .01, .04, .02, .93}}};
        m["Non-Hispanic Black"] = {
            DriftShape{{.20, .20, .60}, {.09, .15, .24, .20, .12, .10, .10}, {.01, .04, .38, .21, .36}},
            DriftShape{{.26, .28, .46}, {.010, .015, .030, .060, .130, .220, .535}, {.00, .03, .06, .02, .89}}};
        m["Hispanic (White or Black)"] = {
            DriftShape{{.12, .12, .76}, {.03, .08, .26, .28, .17, .09, .09}, {.01, .02, .45, .16, .36}},
            DriftShape{{.28, .28, .44}, {.008, .012, .025, .050, .120, .210, .575}, {.00, .06, .10, .03, .81}}};
        m["Asian"] = {
            DriftShape{{.22, .22, .56}, {.07, .12, .22, .20, .14, .11, .14}, {.01, .03, .36, .23, .37}},
            DriftShape{{.24, .28, .48}, {.010, .015, .030, .060, .130, .200, .555}, {.00, .03, .09, .02, .86}}};
        m["Indigenous or Pacific Islander"] = {
            DriftShape{{.13, .13, .74}, {.04, .09, .25, .26, .17, .10, .09}, {.01, .02, .44, .16, .37}},
            DriftShape{{.27, .27, .46}, {.008, .012, .025, .050, .120, .220, .565}, {.00, .02, .06, .02, .90}}};
        m["Mixed"] = {
            DriftShape{{.20, .20, .60}, {.08, .14, .23, .20, .13, .11, .11}, {.01, .04, .37, .21, .37}},
            DriftShape{{.27, .28, .45}, {.010, .015, .030, .060, .125, .210, .550}, {.00, .05, .08, .02, .85}}};
        m["Other"] = {
            DriftShape{{.21, .21, .58}, {.07, .12, .22, .20, .14, .12, .13}, {.01, .03, .36, .21, .39}},
            DriftShape{{.28, .29, .43}, {.008, .012, .025, .050, .120, .210, .575}, {.00, .07, .09, .02, .82}}};
        m["Unknown"] = {
            DriftShape{{.20, .20, .60}, {.08, .14, .23, .20, .13, .11, .11}, {.01, .03, .37, .21, .38}},
            DriftShape{{.27, .28, .45}, {.010, .015, .030, .060, .125, .210, .550}, {.00, .05, .08, .02, .85}}};
        return m;
    }();
    return shapes;
}

// Joint distribution from the marginal shapes, skipping shapes a minimal
// script can never take (single-edit "across", multi-edit insert/replace
// pinned to one end).
CellDistribution drift_distribution(const DriftShape& shape) {
    static const std::array<ErrorType, 3> types = {ErrorType::deletion, ErrorType::insertion,
                                                   ErrorType::replacement};
    static const std::array<EditPosition, 5> positions = {
        EditPosition::start, EditPosition::first_half, EditPosition::second_half,
        EditPosition::end, EditPosition::across};
    CellDistribution dist;
    for (std::size_t t = 0; t < types.size(); ++t) {
        for (int k = 1; k <= kMaxDistanceBucket; ++k) {
            for (std::size_t p = 0; p < positions.size(); ++p) {
                const EditPosition pos = positions[p];
                if (pos == EditPosition::across && k == 1) continue;
                const bool pinned = pos == EditPosition::start || pos == EditPosition::end;
                if (pinned && k > 1 && types[t] != ErrorType::deletion) continue;
                const double mass = shape.type[t] * shape.distance[k - 1] * shape.position[p];
                if (mass > 0.0) dist.add({types[t], k, pos}, mass);
            }
        }
    }
    dist.normalise();
    return dist;
}

}  // namespace

const std::map<std::string, double>& default_group_shares() {
    static const std::map<std::string, double> shares = {
        {"Asian", 0.04},
        {"Hispanic (White or Black)", 0.06},
        {"Indigenous or Pacific Islander", 0.02},
        {"Mixed", 0.02},
        {"Non-Hispanic Black", 0.20},
        {"Non-Hispanic White", 0.60},
        {"Other", 0.04},
        {"Unknown", 0.02},
    };
    return shares;
}

double zipf_rank1_share(std::size_t pool_size, double alpha) {
    double h = 0.0;
    for (std::size_t r = 1; r <= pool_size; ++r) {
        h += std::pow(static_cast<double>(r), -alpha);
    }
    return 1.0 / h;
}

std::size_t synth_forename_pool_size() { return kPoolTarget; }

Dataset synth_corpus(const SynthSpec& spec) {
    std::map<std::string, std::int64_t> sizes = spec.group_sizes;
    if (sizes.empty()) {
        const auto& shares = spec.group_shares.empty() ? default_group_shares() : spec.group_shares;
        std::vector<std::string> groups;
        std::vector<double> weights;
        for (const auto& [group, share] : shares) {
            groups.push_back(group);
            weights.push_back(share);
        }
        const auto counts = largest_remainder(spec.size, weights);
        for (std::size_t g = 0; g < groups.size(); ++g) sizes[groups[g]] = counts[g];
    }

    Dataset data;
    std::int64_t serial = 0;
    for (const auto& [group, count] : sizes) {
        if (!group_styles().count(group)) throw ConfigError("no synth style for group: " + group);
        const auto fore_pool = build_pool(group, Field::forename, spec.seed);
        const auto sur_pool = build_pool(group, Field::surname, spec.seed);
        const auto fore_cumulative =
            zipf_cumulative(fore_pool.size(), spec.zipf_alpha_forename);
        const auto sur_cumulative = zipf_cumulative(sur_pool.size(), spec.zipf_alpha_surname);
        const GroupStyle& style = group_styles().at(group);

        SplitMix64 rng(combine_seed(combine_seed(spec.seed, hash_bytes(group)), 0x726563ULL));
        for (std::int64_t k = 0; k < count; ++k) {
            PersonRecord r;
            char idbuf[16];
            std::snprintf(idbuf, sizeof(idbuf), "P%08lld", static_cast<long long>(serial++));
            r.id = idbuf;
            r.group = group;
            const double unique_rate =
                std::min(spec.unique_rate * style.unique_multiplier, 0.9);
            if (rng.next_double() < unique_rate) {
                r.forename = normalize_name(generate_unique_name(style, rng));
            } else {
                r.forename = normalize_name(fore_pool[sample_cumulative(fore_cumulative, rng)]);
            }
            if (rng.next_double() < unique_rate) {
                r.surname = normalize_name(generate_unique_name(style, rng));
            } else {
                r.surname = normalize_name(sur_pool[sample_cumulative(sur_cumulative, rng)]);
            }
            const int span = spec.year_max - spec.year_min + 1;
            r.birth_year = spec.year_min + static_cast<int>((rng.next_below(span) +
                                                             rng.next_below(span)) /
                                                            2);
            r.gender = rng.next_double() < 0.5 ? "F" : "M";
            data.add(std::move(r));
        }
    }
    return data;
}

std::pair<Dataset, Dataset> synth_snapshot_pair(const Dataset& base, const SynthSpec& spec) {
    Dataset snap_a;
    Dataset snap_b;
    for (const PersonRecord& r : base.records()) snap_a.add(r);
    for (const PersonRecord& r : base.records()) snap_b.add(r);

    // drift letters skew heavily to vowels: vowel-for-vowel slips keep the
    // name's shape while still registering as string edits
    CharInventory drift_inventory;
    for (const EditPosition pos : {EditPosition::start, EditPosition::first_half,
                                   EditPosition::second_half, EditPosition::end}) {
        for (const char32_t v : {U'A', U'E', U'I', U'O', U'U'}) {
            for (int k = 0; k < 7; ++k) drift_inventory.add(pos, v);
        }
        for (char32_t c = U'A'; c <= U'Z'; ++c) drift_inventory.add(pos, c);
    }
    for (const Field field : {Field::forename, Field::surname}) {
        const double rate =
            field == Field::forename ? spec.drift_forename_rate : spec.drift_surname_rate;
        // SRS of round(rate * N) records to drift
        std::vector<std::size_t> indices(base.size());
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        SplitMix64 pick_rng(combine_seed(combine_seed(spec.seed, 0x64726966ULL),
                                         static_cast<std::uint64_t>(field)));
        pick_rng.shuffle(indices);
        const std::size_t take = static_cast<std::size_t>(
            std::llround(rate * static_cast<double>(base.size())));

        for (std::size_t k = 0; k < take && k < indices.size(); ++k) {
            PersonRecord& r = snap_b[indices[k]];
            if (r.name(field).empty()) continue;
            const auto& shape = drift_shapes().at(r.group)[static_cast<int>(field)];
            const CellDistribution dist = drift_distribution(shape);
            SplitMix64 rng(combine_seed(combine_seed(spec.seed, hash_bytes(r.id)),
                                        0xD21F7000ULL + static_cast<std::uint64_t>(field)));
            const MechanismCell cell = dist.sample(rng);
            r.name(field) = apply_corruption(r.name(field), cell, drift_inventory, rng).value;
        }
    }
    return {snap_a, snap_b};
}

}  // namespace namelink
