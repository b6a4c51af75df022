#pragma once

#include <stdexcept>
#include <string>

namespace acasimir {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// contract violations on inputs (bad tolerances, malformed intervals, r >= 1)
struct InvalidArgument : Error {
    using Error::Error;
};

// nonpositive or nonfinite separations and gaps
struct InvalidGeometry : Error {
    using Error::Error;
};

// find_root precondition failure
struct NoSignChange : Error {
    using Error::Error;
};

// no static equilibrium exists (device past pull-in)
struct NoEquilibrium : Error {
    using Error::Error;
};

// reflection series requested outside its convergence region
struct SeriesDivergence : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    std::string field;
    ConfigError(std::string field_, const std::string& msg)
        : Error("config field '" + field_ + "': " + msg), field(std::move(field_)) {}
};

// quadrature ran out of its evaluation budget; carries the best estimate so far
struct BudgetExhausted : Error {
    double estimate;
    double error_bound;
    std::string level;
    BudgetExhausted(std::string level_, double estimate_, double error_bound_)
        : Error("evaluation budget exhausted in " + level_ + ", best estimate " +
                std::to_string(estimate_) + " with error bound " + std::to_string(error_bound_)),
          estimate(estimate_),
          error_bound(error_bound_),
          level(std::move(level_)) {}
};

// integrand or objective returned NaN or infinity; carries the offending abscissa
struct NonFiniteValue : Error {
    double abscissa;
    NonFiniteValue(const std::string& where, double x)
        : Error("non-finite value in " + where + " at x = " + std::to_string(x)), abscissa(x) {}
};

}  // namespace acasimir
