#pragma once

#include <stdexcept>
#include <string>

namespace speccoc {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  schema = 1,        // malformed input or configuration
  precondition = 2,  // a documented precondition does not hold
  numerical = 3,     // an estimator could not certify its result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::precondition, what);
}

}  // namespace speccoc
