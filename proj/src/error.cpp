#include "adopt/error.hpp"

#include <utility>

namespace adopt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Duplicate: return "duplicate";
    case ErrorKind::Splice: return "splice";
    case ErrorKind::Gap: return "gap";
    case ErrorKind::Unavailable: return "unavailable";
    case ErrorKind::Io: return "io";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error("[" + module + "] " + message),
      kind_(kind),
      module_(std::move(module)),
      detail_(message) {}

}  // namespace adopt
