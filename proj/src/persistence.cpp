#include "tcurator/persistence.hpp"

#include <sqlite3.h>

#include <fstream>

#include "tcurator/error.hpp"
#include "tcurator/sparql/canonical.hpp"
#include "tcurator/sparql/parser.hpp"

namespace tcurator {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(FileFormat f) noexcept { return f == FileFormat::NdjsonLike ? "NdjsonLike" : "PlainText"; }

std::optional<FileFormat> parse_file_format(std::string_view name) noexcept {
  if (name == "ndjson" || name == "NdjsonLike") return FileFormat::NdjsonLike;
  if (name == "text" || name == "plain" || name == "PlainText") return FileFormat::PlainText;
  return std::nullopt;
}

namespace {

std::int64_t millis(Instant t) { return t.time_since_epoch().count(); }
Instant instant(std::int64_t ms) { return Instant(std::chrono::milliseconds(ms)); }

OperatorKind operator_named(const std::string& name) {
  auto op = parse_operator(name);
  if (!op) throw Error(ErrorCode::InvalidArgument, "unknown operator '" + name + "'");
  return *op;
}

IpAddress ip_named(const std::string& text) {
  auto ip = IpAddress::parse(text);
  if (!ip) throw Error(ErrorCode::InvalidArgument, "bad address '" + text + "'");
  return *ip;
}

std::optional<std::string> canonical_text(const std::string& text) {
  auto r = sparql::parse_query(text);
  if (!sparql::parsed_ok(r)) return std::nullopt;
  return sparql::canonicalize(std::get<sparql::ParsedQuery>(r));
}

}  // namespace

ordered_json annotation_to_json(const TrustAnnotation& a) {
  ordered_json j;
  j["operator"] = std::string(to_string(a.op));
  if (a.degree.kind == TrustDegree::Kind::Boolean) {
    j["kind"] = "Boolean";
    j["value"] = a.degree.value ? 1 : 0;
  } else {
    j["kind"] = "Categorical";
    j["value"] = a.degree.label;
  }
  j["applied_at"] = millis(a.applied_at);
  return j;
}

TrustAnnotation annotation_from_json(const json& j) {
  TrustAnnotation a;
  a.op = operator_named(j.at("operator").get<std::string>());
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "Boolean") {
    a.degree = TrustDegree::boolean(j.at("value").get<int>() != 0);
  } else if (kind == "Categorical") {
    a.degree = TrustDegree::categorical(j.at("value").get<std::string>());
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown annotation kind '" + kind + "'");
  }
  a.applied_at = instant(j.at("applied_at").get<std::int64_t>());
  return a;
}

ordered_json query_to_json(const CuratedQuery& q) {
  ordered_json j;
  j["id"] = q.id.value;
  j["text"] = q.text;
  j["source_log"] = q.source_log;
  auto anns = ordered_json::array();
  for (const auto& a : q.annotations) anns.push_back(annotation_to_json(a));
  j["annotations"] = std::move(anns);
  j["ip"] = q.entry.ip.to_string();
  j["timestamp"] = format_rfc3339(q.entry.timestamp);
  j["method"] = q.entry.method;
  j["raw_request"] = q.entry.raw_request;
  j["status"] = q.entry.status;
  j["user_agent"] = q.entry.user_agent ? ordered_json(*q.entry.user_agent) : ordered_json(nullptr);
  j["entry_log"] = q.entry.source_log;
  j["line"] = q.entry.line_number;
  return j;
}

CuratedQuery query_from_json(const json& j) {
  try {
    CuratedQuery q;
    q.id = QueryId{j.at("id").get<std::string>()};
    q.text = j.at("text").get<std::string>();
    q.source_log = j.at("source_log").get<std::string>();
    for (const auto& a : j.at("annotations")) q.annotations.push_back(annotation_from_json(a));
    q.entry.ip = ip_named(j.at("ip").get<std::string>());
    auto ts = parse_rfc3339(j.at("timestamp").get<std::string>());
    if (!ts) throw Error(ErrorCode::InvalidArgument, "bad timestamp in record " + q.id.value);
    q.entry.timestamp = *ts;
    q.entry.method = j.at("method").get<std::string>();
    q.entry.raw_request = j.at("raw_request").get<std::string>();
    q.entry.status = j.at("status").get<int>();
    if (!j.at("user_agent").is_null()) q.entry.user_agent = j.at("user_agent").get<std::string>();
    q.entry.source_log = j.at("entry_log").get<std::string>();
    q.entry.line_number = j.at("line").get<std::size_t>();
    return q;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed query record: ") + e.what());
  }
}

bool operator==(const OperatorOutcome& a, const OperatorOutcome& b) {
  return a.op == b.op && a.input_count == b.input_count && a.trusted == b.trusted && a.untrusted == b.untrusted &&
         a.rate_of_trust == b.rate_of_trust && a.duration == b.duration && a.external_input == b.external_input;
}

namespace {

ordered_json snapshot_to_json(const QuerySnapshot& s) {
  ordered_json j;
  j["id"] = s.id.value;
  j["source_log"] = s.source_log;
  if (s.text) j["text"] = *s.text;
  auto anns = ordered_json::array();
  for (const auto& a : s.annotations) anns.push_back(annotation_to_json(a));
  j["annotations"] = std::move(anns);
  return j;
}

QuerySnapshot snapshot_from_json(const json& j) {
  QuerySnapshot s;
  s.id = QueryId{j.at("id").get<std::string>()};
  s.source_log = j.at("source_log").get<std::string>();
  if (j.contains("text")) s.text = j.at("text").get<std::string>();
  for (const auto& a : j.at("annotations")) s.annotations.push_back(annotation_from_json(a));
  return s;
}

ordered_json ids_to_json(const std::vector<QueryId>& ids) {
  auto arr = ordered_json::array();
  for (const auto& id : ids) arr.push_back(id.value);
  return arr;
}

std::vector<QueryId> ids_from_json(const json& j) {
  std::vector<QueryId> ids;
  for (const auto& v : j) ids.push_back(QueryId{v.get<std::string>()});
  return ids;
}

}  // namespace

ordered_json checkpoint_to_json(const Checkpoint& c) {
  ordered_json j;
  j["operator"] = std::string(to_string(c.outcome.op));
  j["input"] = c.outcome.input_count;
  j["external_input"] = c.outcome.external_input;
  j["duration_ms"] = c.outcome.duration.count();
  j["trusted_ids"] = ids_to_json(c.outcome.trusted);
  j["untrusted_ids"] = ids_to_json(c.outcome.untrusted);
  auto t = ordered_json::array();
  for (const auto& s : c.trusted) t.push_back(snapshot_to_json(s));
  auto u = ordered_json::array();
  for (const auto& s : c.untrusted) u.push_back(snapshot_to_json(s));
  j["trusted"] = std::move(t);
  j["untrusted"] = std::move(u);
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    Checkpoint c;
    c.outcome.op = operator_named(j.at("operator").get<std::string>());
    c.outcome.input_count = j.at("input").get<std::size_t>();
    c.outcome.external_input = j.at("external_input").get<std::size_t>();
    c.outcome.duration = std::chrono::milliseconds(j.at("duration_ms").get<std::int64_t>());
    c.outcome.trusted = ids_from_json(j.at("trusted_ids"));
    c.outcome.untrusted = ids_from_json(j.at("untrusted_ids"));
    if (c.outcome.trusted.size() > c.outcome.input_count) {
      throw Error(ErrorCode::StorageFailure, "checkpoint trusted count exceeds its input");
    }
    c.outcome.rate_of_trust =
        c.outcome.input_count == 0 ? Rational{} : Rational(c.outcome.input_count - c.outcome.trusted.size(), c.outcome.input_count);
    for (const auto& s : j.at("trusted")) c.trusted.push_back(snapshot_from_json(s));
    for (const auto& s : j.at("untrusted")) c.untrusted.push_back(snapshot_from_json(s));
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageFailure, std::string("corrupt checkpoint payload: ") + e.what());
  }
}

namespace {

class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::StorageFailure, sqlite3_errmsg(db));
    }
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int i, const std::string& v) {
    check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Stmt& bind(int i, std::int64_t v) {
    check(sqlite3_bind_int64(stmt_, i, v));
    return *this;
  }
  Stmt& bind(int i, const std::optional<std::string>& v) {
    if (!v) {
      check(sqlite3_bind_null(stmt_, i));
      return *this;
    }
    return bind(i, *v);
  }
  Stmt& bind_null(int i) {
    check(sqlite3_bind_null(stmt_, i));
    return *this;
  }

  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::StorageFailure, sqlite3_errmsg(db_));
  }
  void run() {
    step();
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::optional<std::string> opt_text(int col) const {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return text(col);
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
  bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) throw Error(ErrorCode::StorageFailure, sqlite3_errmsg(db_));
  }
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

constexpr const char* kSchema = R"sql(
CREATE TABLE queries(
  run_id TEXT NOT NULL, ord INTEGER NOT NULL, id TEXT NOT NULL, source_log TEXT NOT NULL,
  text TEXT NOT NULL, canonical_text TEXT, ip TEXT NOT NULL, ts INTEGER NOT NULL,
  tz_offset INTEGER NOT NULL, status INTEGER NOT NULL, method TEXT NOT NULL, raw_request TEXT NOT NULL,
  user_agent TEXT, entry_log TEXT NOT NULL, line_number INTEGER NOT NULL,
  PRIMARY KEY(run_id, ord));
CREATE INDEX queries_by_id ON queries(run_id, id);
CREATE TABLE annotations(
  run_id TEXT NOT NULL, query_ord INTEGER NOT NULL, query_id TEXT NOT NULL, seq INTEGER NOT NULL,
  operator TEXT NOT NULL, kind TEXT NOT NULL, value TEXT NOT NULL, applied_at INTEGER NOT NULL,
  PRIMARY KEY(run_id, query_ord, seq));
CREATE TABLE checkpoints(
  run_id TEXT NOT NULL, stage TEXT NOT NULL, seq INTEGER NOT NULL, payload TEXT NOT NULL,
  PRIMARY KEY(run_id, stage));
CREATE TABLE runs(
  run_id TEXT PRIMARY KEY, spec_yaml TEXT NOT NULL, started INTEGER NOT NULL, finished INTEGER);
CREATE TABLE run_inputs(
  run_id TEXT NOT NULL, log_ord INTEGER NOT NULL, log_id TEXT NOT NULL, source_dataset TEXT NOT NULL,
  ord INTEGER NOT NULL, payload TEXT NOT NULL,
  PRIMARY KEY(run_id, log_ord, ord));
)sql";

}  // namespace

class Store::Tx {
 public:
  explicit Tx(Store& s) : s_(s) { s_.exec("BEGIN IMMEDIATE"); }
  ~Tx() {
    if (!done_) sqlite3_exec(s_.db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    s_.exec("COMMIT");
    done_ = true;
  }

 private:
  Store& s_;
  bool done_ = false;
};

Store::Store(const std::filesystem::path& path) : path_(path) {
  const std::string target = path.empty() ? std::string(":memory:") : path.string();
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(target.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "cannot open";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::StorageFailure, target + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 10000);
  try {
    migrate();
  } catch (...) {
    sqlite3_close(db_);
    db_ = nullptr;
    throw;
  }
}

Store::~Store() {
  if (db_) sqlite3_close(db_);
}

void Store::exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : sqlite3_errmsg(db_);
    sqlite3_free(err);
    throw Error(ErrorCode::StorageFailure, msg);
  }
}

void Store::migrate() {
  std::int64_t version = 0;
  {
    Stmt s(db_, "PRAGMA user_version");
    if (s.step()) version = s.integer(0);
  }
  if (version == kSchemaVersion) return;
  if (version != 0) {
    throw Error(ErrorCode::SchemaMismatch, path_.string() + " has schema version " + std::to_string(version) +
                                               ", expected " + std::to_string(kSchemaVersion));
  }
  {
    Stmt s(db_, "SELECT count(*) FROM sqlite_master");
    s.step();
    if (s.integer(0) != 0) throw Error(ErrorCode::SchemaMismatch, path_.string() + " is not a curation store");
  }
  if (!path_.empty()) exec("PRAGMA journal_mode=WAL");
  Tx tx(*this);
  exec(kSchema);
  exec(("PRAGMA user_version = " + std::to_string(kSchemaVersion)).c_str());
  tx.commit();
}

std::size_t Store::load_queries(const std::vector<CuratedQuery>& queries, const std::string& run_id) {
  Tx tx(*this);
  Stmt(db_, "DELETE FROM annotations WHERE run_id = ?1").bind(1, run_id).run();
  Stmt(db_, "DELETE FROM queries WHERE run_id = ?1").bind(1, run_id).run();
  Stmt q(db_,
         "INSERT INTO queries(run_id, ord, id, source_log, text, canonical_text, ip, ts, tz_offset, status, method,"
         " raw_request, user_agent, entry_log, line_number) VALUES(?1,?2,?3,?4,?5,?6,?7,?8,?9,?10,?11,?12,?13,?14,?15)");
  Stmt a(db_,
         "INSERT INTO annotations(run_id, query_ord, query_id, seq, operator, kind, value, applied_at)"
         " VALUES(?1,?2,?3,?4,?5,?6,?7,?8)");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& cq = queries[i];
    const auto ord = static_cast<std::int64_t>(i);
    q.bind(1, run_id).bind(2, ord).bind(3, cq.id.value).bind(4, cq.source_log).bind(5, cq.text);
    q.bind(6, canonical_text(cq.text)).bind(7, cq.entry.ip.to_string()).bind(8, millis(cq.entry.timestamp.utc));
    q.bind(9, static_cast<std::int64_t>(cq.entry.timestamp.offset_minutes)).bind(10, static_cast<std::int64_t>(cq.entry.status));
    q.bind(11, cq.entry.method).bind(12, cq.entry.raw_request).bind(13, cq.entry.user_agent);
    q.bind(14, cq.entry.source_log).bind(15, static_cast<std::int64_t>(cq.entry.line_number));
    q.run();
    for (std::size_t k = 0; k < cq.annotations.size(); ++k) {
      const auto& ann = cq.annotations[k];
      const bool boolean = ann.degree.kind == TrustDegree::Kind::Boolean;
      a.bind(1, run_id).bind(2, ord).bind(3, cq.id.value).bind(4, static_cast<std::int64_t>(k));
      a.bind(5, std::string(to_string(ann.op))).bind(6, std::string(boolean ? "Boolean" : "Categorical"));
      a.bind(7, boolean ? std::string(ann.degree.value ? "1" : "0") : ann.degree.label).bind(8, millis(ann.applied_at));
      a.run();
    }
  }
  tx.commit();
  return queries.size();
}

std::vector<CuratedQuery> Store::read_queries(const std::string& run_id) {
  std::vector<CuratedQuery> out;
  Stmt q(db_,
         "SELECT id, source_log, text, ip, ts, tz_offset, status, method, raw_request, user_agent, entry_log,"
         " line_number FROM queries WHERE run_id = ?1 ORDER BY ord");
  q.bind(1, run_id);
  while (q.step()) {
    CuratedQuery cq;
    cq.id = QueryId{q.text(0)};
    cq.source_log = q.text(1);
    cq.text = q.text(2);
    cq.entry.ip = ip_named(q.text(3));
    cq.entry.timestamp = Timestamp{instant(q.integer(4)), static_cast<int>(q.integer(5))};
    cq.entry.status = static_cast<int>(q.integer(6));
    cq.entry.method = q.text(7);
    cq.entry.raw_request = q.text(8);
    cq.entry.user_agent = q.opt_text(9);
    cq.entry.source_log = q.text(10);
    cq.entry.line_number = static_cast<std::size_t>(q.integer(11));
    out.push_back(std::move(cq));
  }
  Stmt a(db_,
         "SELECT query_ord, operator, kind, value, applied_at FROM annotations WHERE run_id = ?1"
         " ORDER BY query_ord, seq");
  a.bind(1, run_id);
  while (a.step()) {
    const auto ord = static_cast<std::size_t>(a.integer(0));
    if (ord >= out.size()) throw Error(ErrorCode::StorageFailure, "annotation refers to a missing query");
    TrustAnnotation ann;
    ann.op = operator_named(a.text(1));
    const auto value = a.text(3);
    ann.degree = a.text(2) == "Boolean" ? TrustDegree::boolean(value == "1") : TrustDegree::categorical(value);
    ann.applied_at = instant(a.integer(4));
    out[ord].annotations.push_back(std::move(ann));
  }
  return out;
}

std::size_t Store::query_count(const std::string& run_id) {
  Stmt s(db_, "SELECT count(*) FROM queries WHERE run_id = ?1");
  s.bind(1, run_id);
  s.step();
  return static_cast<std::size_t>(s.integer(0));
}

void Store::save_inputs(const std::string& run_id, const std::vector<QueryLog>& logs) {
  Tx tx(*this);
  Stmt(db_, "DELETE FROM run_inputs WHERE run_id = ?1").bind(1, run_id).run();
  Stmt ins(db_,
           "INSERT INTO run_inputs(run_id, log_ord, log_id, source_dataset, ord, payload) VALUES(?1,?2,?3,?4,?5,?6)");
  for (std::size_t l = 0; l < logs.size(); ++l) {
    for (std::size_t i = 0; i < logs[l].entries.size(); ++i) {
      ins.bind(1, run_id).bind(2, static_cast<std::int64_t>(l)).bind(3, logs[l].id).bind(4, logs[l].source_dataset);
      ins.bind(5, static_cast<std::int64_t>(i)).bind(6, query_to_json(logs[l].entries[i]).dump());
      ins.run();
    }
    if (logs[l].entries.empty()) {
      ins.bind(1, run_id).bind(2, static_cast<std::int64_t>(l)).bind(3, logs[l].id).bind(4, logs[l].source_dataset);
      ins.bind(5, std::int64_t{-1}).bind(6, std::string("null"));
      ins.run();
    }
  }
  tx.commit();
}

std::vector<QueryLog> Store::read_inputs(const std::string& run_id) {
  std::vector<QueryLog> logs;
  Stmt s(db_, "SELECT log_ord, log_id, source_dataset, ord, payload FROM run_inputs WHERE run_id = ?1"
              " ORDER BY log_ord, ord");
  s.bind(1, run_id);
  while (s.step()) {
    const auto l = static_cast<std::size_t>(s.integer(0));
    if (logs.size() <= l) logs.resize(l + 1);
    logs[l].id = s.text(1);
    logs[l].source_dataset = s.text(2);
    if (s.integer(3) < 0) continue;
    try {
      logs[l].entries.push_back(query_from_json(json::parse(s.text(4))));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::StorageFailure, std::string("corrupt input record: ") + e.what());
    }
  }
  return logs;
}

void Store::write_checkpoint(const std::string& run_id, const std::string& stage, const Checkpoint& checkpoint) {
  const auto payload = checkpoint_to_json(checkpoint).dump();
  Tx tx(*this);
  Stmt(db_,
       "INSERT INTO checkpoints(run_id, stage, seq, payload) VALUES(?1, ?2,"
       " (SELECT coalesce(max(seq), -1) + 1 FROM checkpoints WHERE run_id = ?1), ?3)"
       " ON CONFLICT(run_id, stage) DO UPDATE SET payload = excluded.payload")
      .bind(1, run_id)
      .bind(2, stage)
      .bind(3, payload)
      .run();
  tx.commit();
}

Checkpoint Store::read_checkpoint(const std::string& run_id, const std::string& stage) {
  Stmt s(db_, "SELECT payload FROM checkpoints WHERE run_id = ?1 AND stage = ?2");
  s.bind(1, run_id).bind(2, stage);
  if (!s.step()) throw Error(ErrorCode::MissingCheckpoint, "no checkpoint for run '" + run_id + "' stage '" + stage + "'");
  try {
    return checkpoint_from_json(json::parse(s.text(0)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageFailure, std::string("corrupt checkpoint: ") + e.what());
  }
}

bool Store::has_checkpoint(const std::string& run_id, const std::string& stage) {
  Stmt s(db_, "SELECT 1 FROM checkpoints WHERE run_id = ?1 AND stage = ?2");
  s.bind(1, run_id).bind(2, stage);
  return s.step();
}

std::vector<std::string> Store::checkpoint_stages(const std::string& run_id) {
  std::vector<std::string> out;
  Stmt s(db_, "SELECT stage FROM checkpoints WHERE run_id = ?1 ORDER BY seq");
  s.bind(1, run_id);
  while (s.step()) out.push_back(s.text(0));
  return out;
}

void Store::clear_checkpoints(const std::string& run_id) {
  Tx tx(*this);
  Stmt(db_, "DELETE FROM checkpoints WHERE run_id = ?1").bind(1, run_id).run();
  tx.commit();
}

void Store::begin_run(const std::string& run_id, const std::string& spec_yaml, Instant started) {
  Tx tx(*this);
  Stmt(db_,
       "INSERT INTO runs(run_id, spec_yaml, started, finished) VALUES(?1, ?2, ?3, NULL)"
       " ON CONFLICT(run_id) DO UPDATE SET spec_yaml = excluded.spec_yaml, started = excluded.started, finished = NULL")
      .bind(1, run_id)
      .bind(2, spec_yaml)
      .bind(3, millis(started))
      .run();
  tx.commit();
}

void Store::finish_run(const std::string& run_id, Instant finished) {
  Tx tx(*this);
  Stmt(db_, "UPDATE runs SET finished = ?2 WHERE run_id = ?1").bind(1, run_id).bind(2, millis(finished)).run();
  tx.commit();
}

std::optional<RunRecord> Store::read_run(const std::string& run_id) {
  Stmt s(db_, "SELECT spec_yaml, started, finished FROM runs WHERE run_id = ?1");
  s.bind(1, run_id);
  if (!s.step()) return std::nullopt;
  RunRecord r{run_id, s.text(0), instant(s.integer(1)), std::nullopt};
  if (!s.is_null(2)) r.finished = instant(s.integer(2));
  return r;
}

std::size_t load_to_store(const std::vector<CuratedQuery>& queries, const std::filesystem::path& db_path,
                          const std::string& run_id) {
  Store store(db_path);
  return store.load_queries(queries, run_id);
}

std::size_t load_to_file(const std::vector<CuratedQuery>& queries, const std::filesystem::path& path,
                         FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::WriteFailure, path.string());
  for (const auto& q : queries) {
    if (format == FileFormat::NdjsonLike) {
      out << query_to_json(q).dump() << '\n';
    } else {
      std::string one_line = q.text;
      for (auto& c : one_line) {
        if (c == '\n' || c == '\r') c = ' ';
      }
      out << "# " << q.id.value << '\n' << one_line << '\n';
    }
  }
  out.flush();
  if (!out) throw Error(ErrorCode::WriteFailure, path.string());
  return queries.size();
}

std::vector<CuratedQuery> read_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  std::vector<CuratedQuery> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(query_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tcurator
