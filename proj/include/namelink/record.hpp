#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "namelink/errors.hpp"

namespace namelink {

enum class Field : int { forename = 0, surname = 1 };

constexpr int kFieldCount = 2;

inline const char* field_name(Field f) {
    return f == Field::forename ? "forename" : "surname";
}

// One registry row. Names are stored in normalised form (see normalize_name);
// an empty name marks the field as missing and non-corruptible.
struct PersonRecord {
    std::string id;
    std::string forename;
    std::string surname;
    int birth_year = 0;
    std::string gender;
    std::string group;

    const std::string& name(Field f) const {
        return f == Field::forename ? forename : surname;
    }
    std::string& name(Field f) { return f == Field::forename ? forename : surname; }
};

// Record collection keyed by unique id. Insertion order is preserved; lookups
// go through the id index.
class Dataset {
public:
    void add(PersonRecord r) {
        auto [it, inserted] = by_id_.emplace(r.id, records_.size());
        if (!inserted) throw DuplicateIdError(r.id);
        records_.push_back(std::move(r));
    }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const PersonRecord& operator[](std::size_t i) const { return records_[i]; }
    PersonRecord& operator[](std::size_t i) { return records_[i]; }

    const std::vector<PersonRecord>& records() const { return records_; }

    bool contains(const std::string& id) const { return by_id_.count(id) > 0; }

    // Index of the record with `id`, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_of(const std::string& id) const {
        const auto it = by_id_.find(id);
        return it == by_id_.end() ? npos : it->second;
    }

private:
    std::vector<PersonRecord> records_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// The eight group labels the reports stratify by.
const std::vector<std::string>& standard_groups();

inline constexpr const char* kReferenceGroup = "Non-Hispanic White";

}  // namespace namelink
