#include "ags/error.hpp"

namespace ags {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid: return "invalid";
    case ErrorCode::authentication: return "authentication";
    case ErrorCode::authorization: return "authorization";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::evaluation: return "evaluation";
    case ErrorCode::arithmetic: return "arithmetic";
    case ErrorCode::io: return "io";
    case ErrorCode::corrupt: return "corrupt";
  }
  return "unknown";
}

}  // namespace ags
