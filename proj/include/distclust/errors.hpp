#pragma once

#include <stdexcept>
#include <string>

namespace distclust {

// Raised on contract violations of the input shape: dimension mismatch,
// empty center sets, out-of-range indices, invalid parameters.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by the sensitivity formula when a cluster has zero size.
class DegenerateClusterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace distclust
