#pragma once

#include <stdexcept>
#include <string>

namespace hierseg {

/// Raised when a caller breaks an operation's precondition (wrong colorspace,
/// arity mismatch, order out of range, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// File could not be read, decoded or written.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& reason)
      : std::runtime_error(path + ": " + reason), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace hierseg
