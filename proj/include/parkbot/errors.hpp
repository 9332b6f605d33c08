#pragma once

#include <stdexcept>
#include <string>

namespace parkbot {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Planning failures (exit code 3 at the CLI).
class PlanningError : public Error {
public:
    using Error::Error;
};

class EmptyField : public PlanningError {
public:
    EmptyField() : PlanningError("field contains no free megacell") {}
};

class StartBlocked : public PlanningError {
public:
    explicit StartBlocked(const std::string& what) : PlanningError("start blocked: " + what) {}
};

class BaselineTooShort : public Error {
public:
    BaselineTooShort(double baseline, double min_baseline);
    double baseline;
};

class AlreadyAttempted : public Error {
public:
    AlreadyAttempted() : Error("pickup already attempted on this item") {}
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Carries the name of the offending scenario field, e.g. "trash[3]".
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& reason)
        : Error(field + ": " + reason), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

}  // namespace parkbot
