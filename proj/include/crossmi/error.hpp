#pragma once

#include <stdexcept>
#include <string>

namespace crossmi {

// Error categories, mapped to CLI exit codes (input -> 2, check_failed -> 1).
enum class errc {
  invalid_input,    // bad arguments, malformed files, violated preconditions
  io,               // missing/unwritable files
  degenerate_data,  // zero variance, |rho| -> 1, duplicate points after jitter
  check_failed,     // a figure-pipeline assertion did not hold
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const { return code_; }

  const char* code_name() const {
    switch (code_) {
      case errc::invalid_input: return "invalid-input";
      case errc::io: return "io";
      case errc::degenerate_data: return "degenerate-data";
      case errc::check_failed: return "check-failed";
    }
    return "unknown";
  }

 private:
  errc code_;
};

}  // namespace crossmi
