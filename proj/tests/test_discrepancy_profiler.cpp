#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "namelink/discrepancy_profiler.hpp"
#include "namelink/unicode.hpp"

#include "oracles.hpp"

using namespace namelink;

namespace {

PersonRecord make_record(std::string id, std::string forename, std::string surname,
                         std::string group = "Non-Hispanic White") {
    PersonRecord r;
    r.id = std::move(id);
    r.forename = std::move(forename);
    r.surname = std::move(surname);
    r.birth_year = 1970;
    r.gender = "F";
    r.group = std::move(group);
    return r;
}

}  // namespace

TEST_CASE("classify_edit reference cases") {
    const auto jon = classify_edit(std::string_view("JON"), std::string_view("JOHN"));
    CHECK(jon.primary_type == ErrorType::insertion);
    CHECK(jon.kind_mask == (1u << static_cast<int>(EditKind::insertion)));
    CHECK(jon.bucket == 1);
    CHECK(jon.position == EditPosition::second_half);

    const auto maria = classify_edit(std::string_view("MARIA"), std::string_view("ARIA"));
    CHECK(maria.primary_type == ErrorType::deletion);
    CHECK(maria.bucket == 1);
    CHECK(maria.position == EditPosition::start);

    // tie-broken script is (substitution at 2, insertion at 5): one edit in
    // each half of the 6-character target
    const auto smith = classify_edit(std::string_view("SMITH"), std::string_view("SMYTHE"));
    CHECK(smith.bucket == 2);
    CHECK(smith.has_kind(EditKind::substitution));
    CHECK(smith.has_kind(EditKind::insertion));
    CHECK(smith.position == EditPosition::across);

    CHECK_THROWS_AS(classify_edit(std::string_view("ANNA"), std::string_view("ANNA")),
                    IdenticalInputsError);
}

TEST_CASE("classify_edit distance bucket saturates at 7") {
    const auto cls = classify_edit(std::string_view("AB"), std::string_view("ZYXWVUTSRQ"));
    CHECK(cls.distance >= 8);
    CHECK(cls.bucket == 7);
}

TEST_CASE("classification of a replayed script matches the original pair") {
    SplitMix64 rng(0x1234);
    int checked = 0;
    for (int k = 0; k < 5000; ++k) {
        const std::u32string a = oracle::random_name(rng, 1, 10, 6);
        const std::u32string b = oracle::random_name(rng, 1, 10, 6);
        if (a == b) continue;
        ++checked;
        const EditScript script = edit_script(std::u32string_view(a), std::u32string_view(b));
        const std::u32string replayed = apply_edit_script(std::u32string_view(a), script);
        REQUIRE(classify_edit(std::u32string_view(a), std::u32string_view(replayed)) ==
                classify_edit(std::u32string_view(a), std::u32string_view(b)));
    }
    CHECK(checked > 4000);
}

TEST_CASE("pair_snapshots emits one record per differing field") {
    Dataset a, b;
    a.add(make_record("7", "JON", "DOE"));
    b.add(make_record("7", "JOHN", "DOE"));
    const auto records = pair_snapshots(a, b);
    REQUIRE(records.size() == 1);
    CHECK(records[0].person_id == "7");
    CHECK(records[0].field == Field::forename);
    CHECK(records[0].value_a == "JON");
    CHECK(records[0].value_b == "JOHN");
    CHECK(records[0].lev == 1);
    CHECK(records[0].jw == doctest::Approx(jaro_winkler(std::string_view("JON"),
                                                        std::string_view("JOHN"))));
}

TEST_CASE("pair_snapshots with disjoint ids is empty") {
    Dataset a, b;
    a.add(make_record("1", "ANNA", "SMITH"));
    b.add(make_record("2", "ANNA", "SMITH"));
    CHECK(pair_snapshots(a, b).empty());
}

TEST_CASE("datasets reject duplicate ids") {
    Dataset a;
    a.add(make_record("1", "ANNA", "SMITH"));
    CHECK_THROWS_AS(a.add(make_record("1", "BETH", "JONES")), DuplicateIdError);
}

TEST_CASE("build_profile on a degenerate stream puts all mass on one cell") {
    std::vector<DiscrepancyRecord> discrepancies;
    for (int i = 0; i < 20; ++i) {
        DiscrepancyRecord d;
        d.person_id = "P" + std::to_string(i);
        d.field = Field::forename;
        d.value_a = "MARIA";
        d.value_b = "ARIA";
        d.cls = classify_edit(std::string_view(d.value_a), std::string_view(d.value_b));
        d.lev = d.cls.distance;
        discrepancies.push_back(d);
    }
    const auto profile =
        build_profile(discrepancies, [](const std::string&) { return std::string("G"); });
    const MechanismCell cell{ErrorType::deletion, 1, EditPosition::start};
    CHECK(profile.groups.at("G").probability(cell) == doctest::Approx(1.0));
    CHECK(profile.pooled.probability(cell) == doctest::Approx(1.0));
}

TEST_CASE("build_profile: identical discrepancy streams give identical distributions") {
    SplitMix64 rng(0x77);
    std::vector<DiscrepancyRecord> discrepancies;
    for (int i = 0; i < 200; ++i) {
        const std::u32string a = oracle::random_name(rng, 2, 9, 8);
        std::u32string b = oracle::random_name(rng, 2, 9, 8);
        if (a == b) b.push_back(U'Q');
        DiscrepancyRecord d;
        d.person_id = (i % 2 == 0 ? "A" : "B") + std::to_string(i / 2);
        d.field = Field::forename;
        d.value_a = utf8_encode(a);
        d.value_b = utf8_encode(b);
        d.cls = classify_edit(std::u32string_view(a), std::u32string_view(b));
        discrepancies.push_back(d);
    }
    // duplicate the stream under a second group label
    std::vector<DiscrepancyRecord> doubled;
    for (const DiscrepancyRecord& d : discrepancies) {
        DiscrepancyRecord da = d;
        da.person_id = "A" + d.person_id.substr(1);
        doubled.push_back(da);
        DiscrepancyRecord db = d;
        db.person_id = "B" + d.person_id.substr(1);
        doubled.push_back(db);
    }
    const auto profile = build_profile(
        doubled, [](const std::string& id) { return id.substr(0, 1); });
    REQUIRE(profile.groups.count("A") == 1);
    REQUIRE(profile.groups.count("B") == 1);
    const auto& ga = profile.groups.at("A").cells();
    const auto& gb = profile.groups.at("B").cells();
    REQUIRE(ga.size() == gb.size());
    for (std::size_t i = 0; i < ga.size(); ++i) {
        CHECK(ga[i].first == gb[i].first);
        CHECK(ga[i].second == doctest::Approx(gb[i].second).epsilon(1e-12));
    }
}

TEST_CASE("build_profile rejects an empty stream and inherits pooled for absent groups") {
    CHECK_THROWS_AS(
        build_profile({}, [](const std::string&) { return std::string("G"); }),
        EmptyGroupError);

    std::vector<DiscrepancyRecord> one;
    DiscrepancyRecord d;
    d.person_id = "X1";
    d.field = Field::forename;
    d.value_a = "ANNA";
    d.value_b = "ANA";
    d.cls = classify_edit(std::string_view("ANNA"), std::string_view("ANA"));
    one.push_back(d);
    const auto profile = build_profile(
        one, [](const std::string&) { return std::string("seen"); }, {"seen", "unseen"});
    REQUIRE(profile.inherited_groups == std::vector<std::string>{"unseen"});
    CHECK(profile.groups.at("unseen").cells() == profile.pooled.cells());
}

TEST_CASE("profile cells sum to one and marginals are consistent") {
    SplitMix64 rng(0x99);
    std::vector<DiscrepancyRecord> discrepancies;
    for (int i = 0; i < 500; ++i) {
        const std::u32string a = oracle::random_name(rng, 2, 9, 7);
        std::u32string b = oracle::random_name(rng, 2, 9, 7);
        if (a == b) b.push_back(U'Q');
        DiscrepancyRecord d;
        d.person_id = "P" + std::to_string(i);
        d.field = Field::surname;
        d.value_a = utf8_encode(a);
        d.value_b = utf8_encode(b);
        d.cls = classify_edit(std::u32string_view(a), std::u32string_view(b));
        discrepancies.push_back(d);
    }
    const auto profile = build_profile(
        discrepancies, [](const std::string& id) { return id.size() % 2 ? "odd" : "even"; });
    for (const auto& [group, dist] : profile.groups) {
        double total = 0.0;
        for (const auto& [cell, p] : dist.cells()) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

        double type_total = 0.0, bucket_total = 0.0, position_total = 0.0;
        for (const auto& [t, p] : dist.type_marginal()) type_total += p;
        for (const auto& [bkt, p] : dist.bucket_marginal()) bucket_total += p;
        for (const auto& [pos, p] : dist.position_marginal()) position_total += p;
        CHECK(type_total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(bucket_total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(position_total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("profile JSON round-trips") {
    std::vector<DiscrepancyRecord> discrepancies;
    SplitMix64 rng(0xAB);
    for (int i = 0; i < 100; ++i) {
        const std::u32string a = oracle::random_name(rng, 2, 8, 6);
        std::u32string b = oracle::random_name(rng, 2, 8, 6);
        if (a == b) b.push_back(U'Z');
        DiscrepancyRecord d;
        d.person_id = "P" + std::to_string(i);
        d.field = Field::forename;
        d.value_a = utf8_encode(a);
        d.value_b = utf8_encode(b);
        d.cls = classify_edit(std::u32string_view(a), std::u32string_view(b));
        discrepancies.push_back(d);
    }
    const auto profile =
        build_profile(discrepancies, [](const std::string&) { return std::string("G"); });
    const auto round = ErrorProfile::from_json(profile.to_json());
    REQUIRE(round.groups.at("G").cells().size() == profile.groups.at("G").cells().size());
    for (std::size_t i = 0; i < round.pooled.cells().size(); ++i) {
        CHECK(round.pooled.cells()[i].first == profile.pooled.cells()[i].first);
        CHECK(round.pooled.cells()[i].second ==
              doctest::Approx(profile.pooled.cells()[i].second).epsilon(1e-12));
    }
}

TEST_CASE("bundled reference profiles carry the published marginals") {
    std::ifstream in(std::string(NAMELINK_TEST_DATA_DIR) + "/reference_profile_forename.json");
    REQUIRE(in.good());
    const auto profile = ErrorProfile::from_json(nlohmann::json::parse(in));

    const auto asian = profile.groups.at("Asian").type_marginal();
    CHECK(asian.at(ErrorType::deletion) == doctest::Approx(0.386).epsilon(1e-3));
    CHECK(asian.at(ErrorType::insertion) == doctest::Approx(0.411).epsilon(1e-3));
    CHECK(asian.at(ErrorType::replacement) == doctest::Approx(0.203).epsilon(1e-3));

    const auto white = profile.groups.at("Non-Hispanic White").position_marginal();
    CHECK(white.at(EditPosition::across) == doctest::Approx(0.586).epsilon(1e-3));
    CHECK(white.at(EditPosition::second_half) == doctest::Approx(0.300).epsilon(1e-3));

    for (const auto& [group, dist] : profile.groups) {
        double total = 0.0;
        for (const auto& [cell, p] : dist.cells()) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}
