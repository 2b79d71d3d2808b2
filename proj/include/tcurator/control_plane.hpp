#pragma once

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "tcurator/pipeline.hpp"

namespace tcurator {

enum class RunStatus : std::uint8_t { Pending, Running, Done, Failed };
const char* to_string(RunStatus s) noexcept;

/// Immutable view of a run, replaced wholesale on every transition.
struct RunView {
  std::string run_id;
  RunStatus status = RunStatus::Pending;
  std::vector<OperatorKind> order;
  std::optional<OperatorKind> stage;  // active stage when Running, failing stage when Failed
  std::size_t completed = 0;
  std::string error;
  std::vector<OperatorOutcome> outcomes;
  std::shared_ptr<const CurationResult> result;
};

/// Owns pipeline runs started through the API; each run executes on its own
/// worker thread against the shared database file.
class RunManager {
 public:
  explicit RunManager(std::filesystem::path db_path);
  ~RunManager();
  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  /// Validates and registers a run. A missing run id is generated. Throws
  /// the validation error; InvalidArgument for a run id already taken.
  std::shared_ptr<const RunView> create(PipelineSpec spec);

  enum class StartResult { Started, NotFound, AlreadyStarted };
  StartResult start(const std::string& run_id);

  std::shared_ptr<const RunView> view(const std::string& run_id) const;
  /// Blocks until the run leaves Pending/Running.
  std::shared_ptr<const RunView> wait(const std::string& run_id);

  const std::filesystem::path& db_path() const noexcept { return db_path_; }

 private:
  struct Entry;
  void publish(Entry& e, RunView next);
  void work(std::shared_ptr<Entry> e);

  std::filesystem::path db_path_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::shared_ptr<Entry>> runs_;
  std::vector<std::thread> workers_;
  std::size_t next_id_ = 1;
};

inline constexpr std::size_t kMaxSample = 100;

/// Transport-independent request handling; the HTTP server forwards here.
struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

class Api {
 public:
  explicit Api(RunManager& runs) : runs_(runs) {}

  ApiResponse operators() const;
  ApiResponse create_pipeline(const std::string& body);
  ApiResponse start_run(const std::string& run_id);
  ApiResponse run_status(const std::string& run_id) const;
  ApiResponse run_stats(const std::string& run_id) const;
  ApiResponse sample(const std::string& run_id, const std::string& op, const std::optional<std::string>& n) const;
  ApiResponse result(const std::string& run_id, const std::optional<std::string>& limit,
                     const std::optional<std::string>& offset) const;

 private:
  RunManager& runs_;
};

nlohmann::json error_body(const std::string& code, const std::string& message);
nlohmann::json run_view_to_json(const RunView& v);

/// HTTP front end over Api.
class ApiServer {
 public:
  explicit ApiServer(RunManager& runs);
  ~ApiServer();

  /// Binds and serves until stop(); returns false when binding fails.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Serves on a socket bound by bind_any_port.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// `host:port`, `:port` or `port`. Throws InvalidArgument.
std::pair<std::string, int> parse_address(const std::string& addr);

}  // namespace tcurator
