#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "tcurator/error.hpp"
#include "tcurator/model.hpp"
#include "tcurator/sparql/parser.hpp"
#include "tcurator/time.hpp"

namespace testing {

inline tcurator::Instant at_seconds(double s) {
  return tcurator::Instant(std::chrono::milliseconds(static_cast<std::int64_t>(s * 1000.0)) +
                           std::chrono::milliseconds(1700000000000LL));
}

inline tcurator::CuratedQuery make_query(const std::string& text, const std::string& ip = "192.0.2.1",
                                         double t = 0, std::optional<std::string> agent = std::nullopt,
                                         const std::string& source = "log", std::size_t line = 0) {
  static std::atomic<std::size_t> counter{1};
  if (line == 0) line = counter++;
  tcurator::CuratedQuery q;
  q.text = text;
  q.source_log = source;
  q.entry.ip = *tcurator::IpAddress::parse(ip);
  q.entry.timestamp = tcurator::Timestamp{at_seconds(t), 0};
  q.entry.method = "GET";
  q.entry.raw_request = "/sparql";
  q.entry.user_agent = std::move(agent);
  q.entry.source_log = source;
  q.entry.line_number = line;
  q.id = tcurator::make_query_id(source, line, text);
  return q;
}

inline tcurator::CuratedQuery parsed(tcurator::CuratedQuery q) {
  auto r = tcurator::sparql::parse_query(q.text);
  if (tcurator::sparql::parsed_ok(r)) {
    q.parse = std::get<tcurator::sparql::ParsedQuery>(std::move(r));
  } else {
    q.parse = std::get<std::vector<tcurator::sparql::SyntaxIssue>>(std::move(r));
  }
  return q;
}

inline tcurator::sparql::ParsedQuery must_parse(const std::string& text) {
  auto r = tcurator::sparql::parse_query(text);
  if (!tcurator::sparql::parsed_ok(r)) {
    throw std::runtime_error("does not parse: " + text + " (" +
                             std::get<std::vector<tcurator::sparql::SyntaxIssue>>(r).front().rule + ")");
  }
  return std::get<tcurator::sparql::ParsedQuery>(std::move(r));
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> n{0};
    path_ = std::filesystem::temp_directory_path() /
            ("tcurator-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Code of the tcurator::Error thrown by `f`, or nullopt when nothing is thrown.
template <typename F>
std::optional<tcurator::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const tcurator::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::filesystem::path data(const std::string& rel) { return std::filesystem::path(TCURATOR_TEST_DATA) / rel; }

}  // namespace testing
