#pragma once

#include <stdexcept>
#include <string>

namespace stimrec {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (bad manifest, wrong file size,
// missing channel, precondition violation on user-supplied values).
class data_error : public error {
 public:
    explicit data_error(const std::string& what) : error(what) {}
};

// Numerical failure (singular system, non-convergent iteration).
class numeric_error : public error {
 public:
    explicit numeric_error(const std::string& what) : error(what) {}
};

}  // namespace stimrec
