#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace phonon {

/// Argument outside the domain of an operation (e.g. omega_prime at k = 0).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Kernel evaluated exactly on the curve F_-(k,k') = 0.
class singular_curve_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature did not reach its tolerance.
class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& what, double achieved)
        : std::runtime_error(format(what, achieved)), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    static std::string format(const std::string& what, double achieved) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (achieved error %.3e)", achieved);
        return what + buf;
    }
    double achieved_;
};

/// Invalid parameters or inconsistent tables.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File access or format failures.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace phonon
