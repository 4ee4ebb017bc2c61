#pragma once

#include <stdexcept>
#include <string>

namespace zal {

// Base class for all errors raised by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or precondition violation (maps to CLI exit code 2).
class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(what) {}
};

// Zero-count completeness could not be certified (maps to CLI exit code 3).
// Carries the interval in which the count is ambiguous.
class integrity_error : public error {
public:
    integrity_error(const std::string& what, double t_lo, double t_hi)
        : error(what), t_lo(t_lo), t_hi(t_hi) {}
    double t_lo;
    double t_hi;
};

// A quadrature or series failed to reach the requested tolerance.
class numeric_error : public error {
public:
    numeric_error(const std::string& what, double achieved = 0.0)
        : error(what), achieved_error(achieved) {}
    double achieved_error;
};

// Construction of a derived object (kernel tabulation, ...) failed.
class construction_error : public error {
public:
    explicit construction_error(const std::string& what) : error(what) {}
};

// A memory or size budget would be exceeded.
class resource_error : public error {
public:
    explicit resource_error(const std::string& what) : error(what) {}
};

} // namespace zal
