#include "tcurator/time.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace tcurator {
namespace {

using namespace std::chrono;

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return true;
}

std::optional<Instant> civil_to_instant(int y, int mon, int d, int h, int mi, int s, int ms, int offset_minutes) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mon)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
  return Instant{local - minutes{offset_minutes}};
}

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

}  // namespace

std::optional<Timestamp> parse_clf_timestamp(std::string_view text) {
  // dd/Mon/yyyy:HH:mm:ss +zzzz
  if (text.size() != 26) return std::nullopt;
  int d = 0, y = 0, h = 0, mi = 0, s = 0, oh = 0, om = 0;
  if (!read_int(text, 0, 2, d) || text[2] != '/' || text[6] != '/' || !read_int(text, 7, 4, y) || text[11] != ':' ||
      !read_int(text, 12, 2, h) || text[14] != ':' || !read_int(text, 15, 2, mi) || text[17] != ':' ||
      !read_int(text, 18, 2, s) || text[20] != ' ' || (text[21] != '+' && text[21] != '-') ||
      !read_int(text, 22, 2, oh) || !read_int(text, 24, 2, om)) {
    return std::nullopt;
  }
  int mon = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (text.substr(3, 3) == kMonths[i]) mon = static_cast<int>(i) + 1;
  }
  if (mon == 0 || om > 59) return std::nullopt;
  const int offset = (text[21] == '-' ? -1 : 1) * (oh * 60 + om);
  auto instant = civil_to_instant(y, mon, d, h, mi, s, 0, offset);
  if (!instant) return std::nullopt;
  return Timestamp{*instant, offset};
}

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
  int y = 0, mon = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || text.size() < 20 || text[4] != '-' || !read_int(text, 5, 2, mon) ||
      text[7] != '-' || !read_int(text, 8, 2, d) || (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      !read_int(text, 11, 2, h) || text[13] != ':' || !read_int(text, 14, 2, mi) || text[16] != ':' ||
      !read_int(text, 17, 2, s)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  int ms = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (; digits < 3; ++digits) ms *= 10;
  }
  if (pos >= text.size()) return std::nullopt;
  int offset = 0;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int oh = 0, om = 0;
    if (!read_int(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !read_int(text, pos + 4, 2, om) || om > 59) {
      return std::nullopt;
    }
    offset = (text[pos] == '-' ? -1 : 1) * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  auto instant = civil_to_instant(y, mon, d, h, mi, s, ms, offset);
  if (!instant) return std::nullopt;
  return Timestamp{*instant, offset};
}

std::string format_rfc3339(const Timestamp& ts) {
  const auto local = ts.utc + minutes{ts.offset_minutes};
  const auto day_point = floor<days>(local);
  const year_month_day ymd{day_point};
  const hh_mm_ss tod{local - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()), static_cast<int>(tod.subseconds().count()));
  std::string out = buf;
  if (ts.offset_minutes == 0) {
    out += 'Z';
  } else {
    const int abs_off = ts.offset_minutes < 0 ? -ts.offset_minutes : ts.offset_minutes;
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", ts.offset_minutes < 0 ? '-' : '+', abs_off / 60, abs_off % 60);
    out += buf;
  }
  return out;
}

std::string format_rfc3339(Instant instant) { return format_rfc3339(Timestamp{instant, 0}); }

Instant now_ms() { return floor<milliseconds>(system_clock::now()); }

}  // namespace tcurator
