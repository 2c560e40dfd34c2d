#pragma once

#include <stdexcept>
#include <string>

namespace opchain {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularityError : std::runtime_error {
    double rcond;
    SingularityError(const std::string& what, double rc) : std::runtime_error(what), rcond(rc) {}
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

}  // namespace opchain
