#pragma once

#include <stdexcept>
#include <string>

namespace walkaudit {

/// Missing or unreadable input. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed record, bad schema, or a file with no usable rows.
/// The CLI maps this to exit code 3.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, out-of-band parameter, or broken precondition.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace walkaudit
