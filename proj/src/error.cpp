#include "j0rank/error.hpp"

namespace j0rank {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::NeedsMorePrimes: return "needs-more-primes";
    case ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace j0rank
