#include "tcurator/ingestion.hpp"

#include <charconv>

#include "tcurator/sparql/lexer.hpp"

namespace tcurator {
namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const noexcept { return i_ >= s_.size(); }
  void skip_spaces() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  std::string_view word() {
    skip_spaces();
    const auto start = i_;
    while (i_ < s_.size() && s_[i_] != ' ' && s_[i_] != '\t') ++i_;
    return s_.substr(start, i_ - start);
  }
  std::optional<std::string_view> bracketed(char open, char close) {
    skip_spaces();
    if (i_ >= s_.size() || s_[i_] != open) return std::nullopt;
    const auto start = ++i_;
    while (i_ < s_.size() && s_[i_] != close) {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) ++i_;
      ++i_;
    }
    if (i_ >= s_.size()) return std::nullopt;
    return s_.substr(start, i_++ - start);
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

std::optional<int> parse_status(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v < 100 || v > 599) return std::nullopt;
  return v;
}

std::string unescape_quoted(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

LogItem parse_combined(std::string_view line, const std::string& source_log, std::size_t line_no) {
  auto error = [line_no](std::string reason) { return LineError{line_no, std::move(reason)}; };
  Cursor c(line);
  RawLogEntry e;
  const auto ip_text = c.word();
  auto ip = IpAddress::parse(ip_text);
  if (!ip) return error("invalid IP address '" + std::string(ip_text) + "'");
  e.ip = *ip;
  c.word();
  c.word();
  auto ts_text = c.bracketed('[', ']');
  if (!ts_text) return error("missing [timestamp]");
  auto ts = parse_clf_timestamp(*ts_text);
  if (!ts) return error("unparseable timestamp '" + std::string(*ts_text) + "'");
  e.timestamp = *ts;
  auto request = c.bracketed('"', '"');
  if (!request) return error("missing quoted request");
  Cursor rc(*request);
  e.method = std::string(rc.word());
  std::string_view target = rc.word();
  if (e.method.empty() || target.empty()) return error("malformed request line");
  e.raw_request = std::string(target);
  auto status = parse_status(c.word());
  if (!status) return error("status outside 100-599");
  e.status = *status;
  c.word();
  c.bracketed('"', '"');
  if (auto agent = c.bracketed('"', '"'); agent && *agent != "-" && !agent->empty()) {
    e.user_agent = unescape_quoted(*agent);
  }
  e.source_log = source_log;
  e.line_number = line_no;
  return e;
}

LogItem parse_tsv(std::string_view line, const std::string& source_log, std::size_t line_no) {
  auto error = [line_no](std::string reason) { return LineError{line_no, std::move(reason)}; };
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (cols.size() < 4 || cols.size() > 5) return error("expected 4 tab-separated columns");
  RawLogEntry e;
  auto ip = IpAddress::parse(cols[0]);
  if (!ip) return error("invalid IP address '" + std::string(cols[0]) + "'");
  e.ip = *ip;
  auto ts = parse_rfc3339(cols[1]);
  if (!ts) return error("unparseable timestamp '" + std::string(cols[1]) + "'");
  e.timestamp = *ts;
  if (cols[2].empty()) return error("empty query column");
  e.method = "GET";
  e.raw_request = std::string(cols[2]);
  auto status = parse_status(cols[3]);
  if (!status) return error("status outside 100-599");
  e.status = *status;
  if (cols.size() == 5 && !cols[4].empty() && cols[4] != "-") e.user_agent = std::string(cols[4]);
  e.source_log = source_log;
  e.line_number = line_no;
  return e;
}

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

void LogFormat::validate() const {
  if (query_param.empty() || query_param.find_first_of("=&") != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "query parameter name '" + query_param + "' is not a valid token");
  }
}

const char* to_string(LogFormat::Kind kind) noexcept {
  return kind == LogFormat::Kind::CombinedAccessLog ? "combined" : "tsv";
}

std::optional<LogFormat::Kind> parse_log_format(std::string_view name) noexcept {
  if (sparql::iequals(name, "combined") || sparql::iequals(name, "clf")) return LogFormat::Kind::CombinedAccessLog;
  if (sparql::iequals(name, "tsv") || sparql::iequals(name, "tab")) return LogFormat::Kind::TabSeparated;
  return std::nullopt;
}

LogItem parse_log_line(std::string_view line, const LogFormat& format, const std::string& source_log,
                       std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.find_first_not_of(" \t") == std::string_view::npos) return LineError{line_number, "empty line"};
  return format.kind == LogFormat::Kind::CombinedAccessLog ? parse_combined(line, source_log, line_number)
                                                            : parse_tsv(line, source_log, line_number);
}

LogReader::LogReader(const std::filesystem::path& path, LogFormat format, std::string source_log)
    : in_(path, std::ios::binary), format_(std::move(format)), source_log_(std::move(source_log)) {
  if (!in_ || std::filesystem::is_directory(path)) throw Error(ErrorCode::FileNotReadable, path.string());
  format_.validate();
  if (source_log_.empty()) source_log_ = path.stem().string();
}

std::optional<LogItem> LogReader::next() {
  if (!std::getline(in_, line_)) return std::nullopt;
  return parse_log_line(line_, format_, source_log_, ++line_no_);
}

std::vector<LogItem> read_log(const std::filesystem::path& path, const LogFormat& format, std::string source_log) {
  LogReader reader(path, format, std::move(source_log));
  std::vector<LogItem> out;
  while (auto item = reader.next()) out.push_back(std::move(*item));
  return out;
}

std::string percent_decode(std::string_view text, bool plus_as_space) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '%' && i + 2 < text.size() && hex_value(text[i + 1]) >= 0 && hex_value(text[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2]));
      i += 2;
    } else if (c == '+' && plus_as_space) {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

bool valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

std::optional<std::string> try_decode_query(std::string_view raw_request, const LogFormat& format, ErrorCode* why) {
  auto reject = [why](ErrorCode code) -> std::optional<std::string> {
    if (why) *why = code;
    return std::nullopt;
  };
  std::string_view value;
  if (format.kind == LogFormat::Kind::TabSeparated) {
    value = raw_request;
  } else {
    const auto q = raw_request.find('?');
    if (q == std::string_view::npos) return reject(ErrorCode::NoQueryParameter);
    std::string_view rest = raw_request.substr(q + 1);
    if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    bool found = false;
    while (!rest.empty()) {
      const auto amp = rest.find('&');
      const auto pair = rest.substr(0, amp);
      const auto eq = pair.find('=');
      if (pair.substr(0, eq) == format.query_param) {
        value = eq == std::string_view::npos ? std::string_view{} : pair.substr(eq + 1);
        found = true;
        break;
      }
      if (amp == std::string_view::npos) break;
      rest = rest.substr(amp + 1);
    }
    if (!found) return reject(ErrorCode::NoQueryParameter);
  }
  auto decoded = percent_decode(value, true);
  if (!valid_utf8(decoded)) return reject(ErrorCode::InvalidUtf8);
  if (decoded.find_first_not_of(" \t\r\n") == std::string::npos) return reject(ErrorCode::EmptyQuery);
  return decoded;
}

std::string decode_query(std::string_view raw_request, const LogFormat& format) {
  ErrorCode why = ErrorCode::NoQueryParameter;
  auto out = try_decode_query(raw_request, format, &why);
  if (!out) throw Error(why, std::string(raw_request.substr(0, 200)));
  return std::move(*out);
}

QueryExtractor::QueryExtractor(LogFormat format, std::set<sparql::QueryForm> keep_forms)
    : format_(std::move(format)), keep_(std::move(keep_forms)) {
  format_.validate();
}

std::optional<CuratedQuery> QueryExtractor::offer(const RawLogEntry& entry) {
  auto text = try_decode_query(entry.raw_request, format_);
  std::optional<sparql::QueryForm> form;
  if (text) form = sparql::detect_query_form(*text);
  if (!form || !keep_.contains(*form)) {
    ++rejected_;
    return std::nullopt;
  }
  ++emitted_;
  CuratedQuery q;
  q.id = make_query_id(entry.source_log, entry.line_number, *text);
  q.text = std::move(*text);
  q.entry = entry;
  q.source_log = entry.source_log;
  return q;
}

std::pair<std::vector<CuratedQuery>, std::size_t> extract_queries(const std::vector<RawLogEntry>& entries,
                                                                  const LogFormat& format,
                                                                  const std::set<sparql::QueryForm>& keep_forms) {
  QueryExtractor ex(format, keep_forms);
  std::vector<CuratedQuery> out;
  for (const auto& e : entries) {
    if (auto q = ex.offer(e)) out.push_back(std::move(*q));
  }
  return {std::move(out), ex.rejected()};
}

ExtractedLog extract_log(const std::filesystem::path& path, const LogFormat& format, std::string source_log,
                         std::string source_dataset, const std::set<sparql::QueryForm>& keep_forms) {
  LogReader reader(path, format, std::move(source_log));
  QueryExtractor ex(format, keep_forms);
  ExtractedLog out;
  out.log.id = reader.source_log();
  out.log.source_dataset = std::move(source_dataset);
  while (auto item = reader.next()) {
    if (auto* err = std::get_if<LineError>(&*item)) {
      out.line_errors.push_back(std::move(*err));
      continue;
    }
    if (auto q = ex.offer(std::get<RawLogEntry>(*item))) out.log.entries.push_back(std::move(*q));
  }
  out.lines = reader.lines_read();
  out.rejected = ex.rejected();
  return out;
}

}  // namespace tcurator
