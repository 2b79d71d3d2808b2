#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcurator/model.hpp"

struct sqlite3;

namespace tcurator {

enum class FileFormat : std::uint8_t { NdjsonLike, PlainText };

const char* to_string(FileFormat f) noexcept;
/// Accepts "ndjson"/"NdjsonLike" and "text"/"plain"/"PlainText".
std::optional<FileFormat> parse_file_format(std::string_view name) noexcept;

nlohmann::ordered_json annotation_to_json(const TrustAnnotation& a);
TrustAnnotation annotation_from_json(const nlohmann::json& j);

/// Fixed field order: id, text, source_log, annotations, then entry metadata.
nlohmann::ordered_json query_to_json(const CuratedQuery& q);
/// Parse state comes back Unparsed and features empty.
CuratedQuery query_from_json(const nlohmann::json& j);

/// Per-query state carried by a checkpoint. `text` is set only when a
/// corrector changed the query relative to its extracted form.
struct QuerySnapshot {
  QueryId id;
  std::string source_log;
  std::optional<std::string> text;
  std::vector<TrustAnnotation> annotations;

  friend bool operator==(const QuerySnapshot&, const QuerySnapshot&) = default;
};

struct Checkpoint {
  OperatorOutcome outcome;
  std::vector<QuerySnapshot> trusted;
  std::vector<QuerySnapshot> untrusted;
};

bool operator==(const OperatorOutcome& a, const OperatorOutcome& b);

nlohmann::ordered_json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

struct RunRecord {
  std::string run_id;
  std::string spec_yaml;
  Instant started{};
  std::optional<Instant> finished;
};

/// Single-file embedded store. Every write runs in its own transaction.
class Store {
 public:
  static constexpr int kSchemaVersion = 1;

  /// An empty path opens a private in-memory database. Throws
  /// StorageFailure or SchemaMismatch.
  explicit Store(const std::filesystem::path& path);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

  /// Replaces the run's rows in `queries` and `annotations`.
  std::size_t load_queries(const std::vector<CuratedQuery>& queries, const std::string& run_id);
  /// In load order, annotations in application order.
  std::vector<CuratedQuery> read_queries(const std::string& run_id);
  std::size_t query_count(const std::string& run_id);

  /// Extracted logs of a run, kept once so checkpoints need only ids.
  void save_inputs(const std::string& run_id, const std::vector<QueryLog>& logs);
  std::vector<QueryLog> read_inputs(const std::string& run_id);

  void write_checkpoint(const std::string& run_id, const std::string& stage, const Checkpoint& checkpoint);
  /// Throws MissingCheckpoint.
  Checkpoint read_checkpoint(const std::string& run_id, const std::string& stage);
  bool has_checkpoint(const std::string& run_id, const std::string& stage);
  /// Stage names in write order.
  std::vector<std::string> checkpoint_stages(const std::string& run_id);
  void clear_checkpoints(const std::string& run_id);

  void begin_run(const std::string& run_id, const std::string& spec_yaml, Instant started);
  void finish_run(const std::string& run_id, Instant finished);
  std::optional<RunRecord> read_run(const std::string& run_id);

 private:
  class Tx;
  void exec(const char* sql);
  void migrate();

  std::filesystem::path path_;
  sqlite3* db_ = nullptr;
};

/// Opens (or creates) the database at `db_path` and loads the queries under
/// `run_id`, replacing earlier rows of that run.
std::size_t load_to_store(const std::vector<CuratedQuery>& queries, const std::filesystem::path& db_path,
                          const std::string& run_id);

/// Throws WriteFailure.
std::size_t load_to_file(const std::vector<CuratedQuery>& queries, const std::filesystem::path& path,
                         FileFormat format);
/// Throws FileNotReadable, or InvalidArgument on a malformed record.
std::vector<CuratedQuery> read_ndjson(const std::filesystem::path& path);

}  // namespace tcurator
