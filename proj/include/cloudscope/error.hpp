#pragma once

#include <stdexcept>
#include <string>

namespace cloudscope {

/// Bad arguments or an inconsistent configuration. The command-line front end
/// maps this to exit code 1.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The data cannot be analyzed: zero pixels, constant fields, geometry
/// mismatches, unreadable files. Maps to exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace cloudscope
