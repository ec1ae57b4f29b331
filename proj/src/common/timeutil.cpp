#include "ags/timeutil.hpp"

#include <chrono>
#include <cstdio>

#include "ags/error.hpp"

namespace ags {

namespace {

// Howard Hinnant's civil-from-days / days-from-civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

TimestampMs now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string format_rfc3339(TimestampMs ts) {
  const std::int64_t days = floor_div(ts, 86'400'000);
  std::int64_t rem = ts - days * 86'400'000;
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  const int hh = static_cast<int>(rem / 3'600'000);
  rem %= 3'600'000;
  const int mm = static_cast<int>(rem / 60'000);
  rem %= 60'000;
  const int ss = static_cast<int>(rem / 1000);
  const int ms = static_cast<int>(rem % 1000);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<long long>(y), m, d, hh,
                mm, ss, ms);
  return buf;
}

TimestampMs parse_rfc3339(std::string_view text) {
  if (text.size() != 24) throw Error(ErrorCode::invalid, "timestamp must be YYYY-MM-DDTHH:MM:SS.mmmZ");
  auto num = [&](std::size_t pos, std::size_t len) {
    std::int64_t v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') throw Error(ErrorCode::invalid, "timestamp has non-digit field");
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' || text[16] != ':' ||
      text[19] != '.' || text[23] != 'Z')
    throw Error(ErrorCode::invalid, "timestamp separators malformed");
  const std::int64_t y = num(0, 4);
  const auto mo = static_cast<unsigned>(num(5, 2));
  const auto d = static_cast<unsigned>(num(8, 2));
  const std::int64_t hh = num(11, 2), mi = num(14, 2), ss = num(17, 2), ms = num(20, 3);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mi > 59 || ss > 59)
    throw Error(ErrorCode::invalid, "timestamp field out of range");
  const TimestampMs ts =
      days_from_civil(y, mo, d) * 86'400'000 + hh * 3'600'000 + mi * 60'000 + ss * 1000 + ms;
  if (format_rfc3339(ts) != text) throw Error(ErrorCode::invalid, "timestamp is not a valid calendar instant");
  return ts;
}

}  // namespace ags
