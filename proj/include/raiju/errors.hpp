#pragma once

#include <stdexcept>
#include <string>

namespace raiju {

/// Caller broke a precondition (bad action id, step after done, shape mismatch).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input text could not be parsed. `where()` names the field or line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)), detail_(what) {}
  const std::string& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string where_;
  std::string detail_;
};

/// Input parsed but violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure; message carries the path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace raiju
