#pragma once

#include <stdexcept>
#include <string>

namespace j0rank {

// Failure classes. The numeric values double as CLI exit codes where one
// exists (usage 2, invariant/data 3, capacity 4).
enum class ErrorKind {
  Usage = 2,
  Invariant = 3,
  Capacity = 4,
  Parse = 5,
  Io = 6,
  NeedsMorePrimes = 7,
  Numerical = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

const char* error_kind_name(ErrorKind kind) noexcept;

}  // namespace j0rank
