#pragma once

#include <stdexcept>
#include <string>

namespace margin {

// Argument outside the mathematical domain of a function or distribution.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Caller misuse: empty inputs, wrong shapes, unknown names.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation produced or encountered a non-finite value, or an
// integral/optimum could not be established.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace margin
