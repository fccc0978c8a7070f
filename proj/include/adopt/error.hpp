#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adopt {

enum class ErrorKind {
  Format,
  Validation,
  Domain,
  Integrity,
  InsufficientData,
  Duplicate,
  Splice,
  Gap,
  Unavailable,
  Io,
  Usage,
};

std::string_view to_string(ErrorKind kind);

// Every error raised by the library carries the module it came from so the
// CLI can print "[module] message" and pick an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  // The message without the "[module] " prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string detail_;
};

}  // namespace adopt
