#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

// Base for every error this library throws. `where` names module/operation.
class Error : public std::runtime_error {
public:
    Error(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

struct ParseError : Error {
    using Error::Error;
};
struct PrecisionExhausted : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NotInFragment : Error {
    using Error::Error;
};
struct Overflow : Error {
    using Error::Error;
};
struct BudgetExceeded : Error {
    using Error::Error;
};
struct NotNice : Error {
    using Error::Error;
};
struct DegreeZero : Error {
    using Error::Error;
};
struct UsageError : Error {
    using Error::Error;
};

}  // namespace ergolab
