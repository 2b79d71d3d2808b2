#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tcurator/error.hpp"
#include "tcurator/model.hpp"

namespace tcurator {

struct LogFormat {
  enum class Kind : std::uint8_t { CombinedAccessLog, TabSeparated };

  Kind kind = Kind::CombinedAccessLog;
  std::string query_param = "query";

  /// Throws InvalidArgument for an empty parameter name or one containing '=' or '&'.
  void validate() const;
};

const char* to_string(LogFormat::Kind kind) noexcept;
/// Accepts "combined"/"clf" and "tsv"/"tab".
std::optional<LogFormat::Kind> parse_log_format(std::string_view name) noexcept;

struct LineError {
  std::size_t line_number = 0;
  std::string reason;

  friend bool operator==(const LineError&, const LineError&) = default;
};

using LogItem = std::variant<RawLogEntry, LineError>;

/// Parses one physical line. `line_number` is 1-based.
LogItem parse_log_line(std::string_view line, const LogFormat& format, const std::string& source_log,
                       std::size_t line_number);

/// Streaming reader: holds one line at a time.
class LogReader {
 public:
  /// Throws FileNotReadable. `source_log` defaults to the file stem.
  LogReader(const std::filesystem::path& path, LogFormat format, std::string source_log = {});

  std::optional<LogItem> next();
  std::size_t lines_read() const noexcept { return line_no_; }
  const std::string& source_log() const noexcept { return source_log_; }

 private:
  std::ifstream in_;
  LogFormat format_;
  std::string source_log_;
  std::string line_;
  std::size_t line_no_ = 0;
};

/// Collects every item of a log into memory.
std::vector<LogItem> read_log(const std::filesystem::path& path, const LogFormat& format, std::string source_log = {});

/// Percent-decodes the query parameter (or the whole field for tab-separated
/// logs) exactly once, '+' as space, and validates UTF-8. Throws
/// NoQueryParameter, InvalidUtf8 or EmptyQuery.
std::string decode_query(std::string_view raw_request, const LogFormat& format);

/// Non-throwing variant; `why` receives the failure code.
std::optional<std::string> try_decode_query(std::string_view raw_request, const LogFormat& format,
                                            ErrorCode* why = nullptr);

std::string percent_decode(std::string_view text, bool plus_as_space);
bool valid_utf8(std::string_view text) noexcept;

inline const std::set<sparql::QueryForm>& default_keep_forms() {
  static const std::set<sparql::QueryForm> forms{sparql::QueryForm::Select, sparql::QueryForm::Construct};
  return forms;
}

/// Turns log entries into unparsed CuratedQuery values, counting rejections.
class QueryExtractor {
 public:
  explicit QueryExtractor(LogFormat format, std::set<sparql::QueryForm> keep_forms = default_keep_forms());

  std::optional<CuratedQuery> offer(const RawLogEntry& entry);

  std::size_t emitted() const noexcept { return emitted_; }
  std::size_t rejected() const noexcept { return rejected_; }

 private:
  LogFormat format_;
  std::set<sparql::QueryForm> keep_;
  std::size_t emitted_ = 0;
  std::size_t rejected_ = 0;
};

std::pair<std::vector<CuratedQuery>, std::size_t> extract_queries(
    const std::vector<RawLogEntry>& entries, const LogFormat& format,
    const std::set<sparql::QueryForm>& keep_forms = default_keep_forms());

struct ExtractedLog {
  QueryLog log;
  std::size_t lines = 0;
  std::size_t rejected = 0;
  std::vector<LineError> line_errors;
};

/// read_log + extract_queries in one streaming pass.
ExtractedLog extract_log(const std::filesystem::path& path, const LogFormat& format, std::string source_log = {},
                         std::string source_dataset = {},
                         const std::set<sparql::QueryForm>& keep_forms = default_keep_forms());

}  // namespace tcurator
