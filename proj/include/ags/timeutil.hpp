#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ags {

// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

TimestampMs now_ms();

// RFC 3339 with millisecond precision, always "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_rfc3339(TimestampMs ts);

// Accepts only the exact form produced by format_rfc3339.
TimestampMs parse_rfc3339(std::string_view text);

}  // namespace ags
