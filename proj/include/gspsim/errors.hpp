#pragma once

#include <stdexcept>
#include <string>

namespace gspsim {

/// A computation left its numeric domain: non-finite ranking weight, a
/// distribution parameter that became invalid at runtime, a degenerate series.
class NumericDomainError : public std::domain_error {
 public:
  explicit NumericDomainError(const std::string& what) : std::domain_error(what) {}
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gspsim
