#pragma once

#include <stdexcept>
#include <string>

namespace namelink {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(std::string id)
        : Error("duplicate record id: " + id), id_(std::move(id)) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class SchemaError : public Error {
public:
    explicit SchemaError(std::string column)
        : Error("missing or malformed column: " + column), column_(std::move(column)) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class EmptyNameError : public Error {
public:
    EmptyNameError() : Error("name has no alphabetic characters") {}
};

class DegenerateFeatureError : public Error {
public:
    explicit DegenerateFeatureError(int index)
        : Error("feature " + std::to_string(index) + " has zero variance"), index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

class InsufficientPairsError : public Error {
public:
    InsufficientPairsError(std::size_t got, std::size_t needed)
        : Error("need at least " + std::to_string(needed) + " discrepant pairs, got " +
                std::to_string(got)) {}
};

class StrictOrderViolationError : public Error {
public:
    StrictOrderViolationError() : Error("percentile cuts are not strictly increasing") {}
};

class IdenticalInputsError : public Error {
public:
    IdenticalInputsError() : Error("inputs are identical; nothing to classify") {}
};

class EmptyGroupError : public Error {
public:
    explicit EmptyGroupError(std::string group)
        : Error("no data for group: " + group), group_(std::move(group)) {}
    const std::string& group() const { return group_; }

private:
    std::string group_;
};

class InfeasibleBudgetError : public Error {
public:
    InfeasibleBudgetError(long long budget, long long eligible)
        : Error("corruption budget " + std::to_string(budget) + " exceeds " +
                std::to_string(eligible) + " eligible records") {}
};

class MissingGroupProfileError : public Error {
public:
    explicit MissingGroupProfileError(std::string group)
        : Error("no error profile for group: " + group), group_(std::move(group)) {}
    const std::string& group() const { return group_; }

private:
    std::string group_;
};

class MissingGoldError : public Error {
public:
    explicit MissingGoldError(std::string id)
        : Error("no gold record for id: " + id), id_(std::move(id)) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace namelink
