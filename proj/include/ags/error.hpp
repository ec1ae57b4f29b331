#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ags {

// Domain error categories. The service maps these onto HTTP statuses and the
// CLI maps them onto exit codes, so every thrown Error must pick one.
enum class ErrorCode {
  invalid,         // malformed input or violated type invariant
  authentication,  // signature does not verify
  authorization,   // signer is not allowed to perform the action
  not_found,
  conflict,        // stale version, double vote, duplicate, nonce replay
  evaluation,      // SLA program evaluation failure
  arithmetic,      // decimal overflow or division by zero
  io,
  corrupt,         // persisted data failed an integrity check
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ags
