#include "tcurator/control_plane.hpp"

#include <charconv>
#include <unordered_map>

#include "httplib.h"
#include "tcurator/error.hpp"

namespace tcurator {

using nlohmann::json;

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::Pending: return "Pending";
    case RunStatus::Running: return "Running";
    case RunStatus::Done: return "Done";
    case RunStatus::Failed: return "Failed";
  }
  return "Pending";
}

struct RunManager::Entry {
  PipelineSpec spec;
  std::shared_ptr<const RunView> view;
};

RunManager::RunManager(std::filesystem::path db_path) : db_path_(std::move(db_path)) {
  Store probe(db_path_);
}

RunManager::~RunManager() {
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
}

std::shared_ptr<const RunView> RunManager::create(PipelineSpec spec) {
  std::lock_guard lock(mu_);
  if (spec.run_id.empty()) {
    do {
      spec.run_id = "run-" + std::to_string(next_id_++);
    } while (runs_.contains(spec.run_id));
  }
  if (runs_.contains(spec.run_id)) throw Error(ErrorCode::InvalidArgument, "run '" + spec.run_id + "' already exists");
  spec = validate_pipeline(std::move(spec));
  auto e = std::make_shared<Entry>();
  RunView v;
  v.run_id = spec.run_id;
  for (const auto& c : spec.operators) v.order.push_back(c.kind);
  e->spec = std::move(spec);
  e->view = std::make_shared<const RunView>(std::move(v));
  runs_.emplace(e->spec.run_id, e);
  return e->view;
}

void RunManager::publish(Entry& e, RunView next) {
  {
    std::lock_guard lock(mu_);
    e.view = std::make_shared<const RunView>(std::move(next));
  }
  cv_.notify_all();
}

RunManager::StartResult RunManager::start(const std::string& run_id) {
  std::lock_guard lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return StartResult::NotFound;
  auto e = it->second;
  if (e->view->status != RunStatus::Pending) return StartResult::AlreadyStarted;
  RunView next = *e->view;
  next.status = RunStatus::Running;
  next.stage = next.order.empty() ? std::nullopt : std::optional(next.order.front());
  e->view = std::make_shared<const RunView>(std::move(next));
  workers_.emplace_back([this, e] { work(e); });
  return StartResult::Started;
}

void RunManager::work(std::shared_ptr<Entry> e) {
  auto current = [&] {
    std::lock_guard lock(mu_);
    return *e->view;
  };
  RunObserver obs;
  obs.stage_started = [&](std::size_t, OperatorKind op) {
    auto v = current();
    v.stage = op;
    publish(*e, std::move(v));
  };
  obs.stage_finished = [&](std::size_t i, const OperatorOutcome& o) {
    auto v = current();
    v.completed = i + 1;
    v.outcomes.push_back(o);
    publish(*e, std::move(v));
  };
  try {
    Store store(db_path_);
    auto result = run_pipeline(e->spec, store, obs);
    auto v = current();
    v.status = RunStatus::Done;
    v.stage.reset();
    v.result = std::make_shared<const CurationResult>(std::move(result));
    publish(*e, std::move(v));
  } catch (const std::exception& ex) {
    auto v = current();
    v.status = RunStatus::Failed;
    if (!v.stage && !v.order.empty()) v.stage = v.order.front();
    v.error = ex.what();
    publish(*e, std::move(v));
  }
}

std::shared_ptr<const RunView> RunManager::view(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return nullptr;
  return it->second->view;
}

std::shared_ptr<const RunView> RunManager::wait(const std::string& run_id) {
  std::unique_lock lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return nullptr;
  auto e = it->second;
  cv_.wait(lock, [&] { return e->view->status == RunStatus::Done || e->view->status == RunStatus::Failed; });
  return e->view;
}

json error_body(const std::string& code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

namespace {

json order_json(const std::vector<OperatorKind>& order) {
  json arr = json::array();
  for (auto op : order) arr.push_back(std::string(to_string(op)));
  return arr;
}

ApiResponse not_found(const std::string& what) { return {404, error_body("NotFound", what)}; }

std::optional<std::size_t> parse_count(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || p != s->data() + s->size() || s->empty()) throw Error(ErrorCode::InvalidArgument, *s);
  return v;
}

json sample_json(const std::vector<QuerySnapshot>& snaps, std::size_t k,
                 const std::unordered_map<std::string, std::string>& texts) {
  json arr = json::array();
  for (std::size_t i = 0; i < snaps.size() && i < k; ++i) {
    const auto& s = snaps[i];
    json anns = json::array();
    for (const auto& a : s.annotations) anns.push_back(json::parse(annotation_to_json(a).dump()));
    std::string text;
    if (s.text) {
      text = *s.text;
    } else if (auto it = texts.find(s.id.value); it != texts.end()) {
      text = it->second;
    }
    arr.push_back({{"id", s.id.value}, {"text", text}, {"source_log", s.source_log}, {"annotations", anns}});
  }
  return arr;
}

}  // namespace

json run_view_to_json(const RunView& v) {
  json j{{"run_id", v.run_id},
         {"status", to_string(v.status)},
         {"stage", v.stage ? json(std::string(to_string(*v.stage))) : json(nullptr)},
         {"completed_stages", v.completed},
         {"total_stages", v.order.size()},
         {"order", order_json(v.order)}};
  std::string display = to_string(v.status);
  if (v.stage && (v.status == RunStatus::Running || v.status == RunStatus::Failed)) {
    display += "(" + std::string(to_string(*v.stage)) + ")";
  }
  j["display"] = display;
  if (v.status == RunStatus::Failed) j["error"] = v.error;
  if (v.result) j["final_trusted"] = v.result->trusted.size();
  return j;
}

ApiResponse Api::operators() const { return {200, registry_to_json()}; }

ApiResponse Api::create_pipeline(const std::string& body) {
  try {
    auto view = runs_.create(parse_pipeline(body));
    return {201, {{"run_id", view->run_id}, {"order", order_json(view->order)}, {"status", to_string(view->status)}}};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument && e.detail().find("already exists") != std::string::npos) {
      return {409, error_body(std::string(to_string(e.code())), e.detail())};
    }
    return {400, error_body(std::string(to_string(e.code())), e.detail())};
  }
}

ApiResponse Api::start_run(const std::string& run_id) {
  switch (runs_.start(run_id)) {
    case RunManager::StartResult::NotFound: return not_found("unknown run '" + run_id + "'");
    case RunManager::StartResult::AlreadyStarted:
      return {409, error_body("AlreadyStarted", "run '" + run_id + "' was already started")};
    case RunManager::StartResult::Started: break;
  }
  return {202, run_view_to_json(*runs_.view(run_id))};
}

ApiResponse Api::run_status(const std::string& run_id) const {
  auto v = runs_.view(run_id);
  if (!v) return not_found("unknown run '" + run_id + "'");
  return {200, run_view_to_json(*v)};
}

ApiResponse Api::run_stats(const std::string& run_id) const {
  auto v = runs_.view(run_id);
  if (!v) return not_found("unknown run '" + run_id + "'");
  const auto stats = v->result ? v->result->stats : accumulate(run_id, v->outcomes);
  return {200, stats_to_json(stats)};
}

ApiResponse Api::sample(const std::string& run_id, const std::string& op, const std::optional<std::string>& n) const {
  auto v = runs_.view(run_id);
  if (!v) return not_found("unknown run '" + run_id + "'");
  auto kind = parse_operator(op);
  if (!kind || std::find(v->order.begin(), v->order.end(), *kind) == v->order.end()) {
    return not_found("run '" + run_id + "' has no operator '" + op + "'");
  }
  std::size_t k = 10;
  try {
    k = parse_count(n).value_or(10);
  } catch (const Error&) {
    return {400, error_body("InvalidArgument", "n must be a non-negative integer")};
  }
  k = std::min(k, kMaxSample);
  const auto idx = static_cast<std::size_t>(std::find(v->order.begin(), v->order.end(), *kind) - v->order.begin());
  if (idx >= v->completed) return {409, error_body("NotReady", op + " has not completed")};
  try {
    Store store(runs_.db_path());
    const auto cp = store.read_checkpoint(run_id, op);
    std::unordered_map<std::string, std::string> texts;
    for (const auto& log : store.read_inputs(run_id)) {
      for (const auto& q : log.entries) texts.emplace(q.id.value, q.text);
    }
    return {200,
            {{"run_id", run_id},
             {"operator", op},
             {"n", k},
             {"input", cp.outcome.input_count},
             {"trusted_count", cp.outcome.trusted.size()},
             {"untrusted_count", cp.outcome.untrusted.size()},
             {"trusted", sample_json(cp.trusted, k, texts)},
             {"untrusted", sample_json(cp.untrusted, k, texts)}}};
  } catch (const Error& e) {
    return {500, error_body(std::string(to_string(e.code())), e.detail())};
  }
}

ApiResponse Api::result(const std::string& run_id, const std::optional<std::string>& limit,
                        const std::optional<std::string>& offset) const {
  auto v = runs_.view(run_id);
  if (!v) return not_found("unknown run '" + run_id + "'");
  if (!v->result) return {409, error_body("NotReady", "run '" + run_id + "' is " + to_string(v->status))};
  std::size_t lim = 100, off = 0;
  try {
    lim = std::min<std::size_t>(parse_count(limit).value_or(100), 1000);
    off = parse_count(offset).value_or(0);
  } catch (const Error&) {
    return {400, error_body("InvalidArgument", "limit and offset must be non-negative integers")};
  }
  const auto& all = v->result->trusted;
  json page = json::array();
  for (std::size_t i = off; i < all.size() && i < off + lim; ++i) page.push_back(json::parse(query_to_json(all[i]).dump()));
  return {200, {{"run_id", run_id}, {"total", all.size()}, {"offset", off}, {"limit", lim}, {"queries", page}}};
}

struct ApiServer::Impl {
  explicit Impl(RunManager& runs) : api(runs) {}
  Api api;
  httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

}  // namespace

ApiServer::ApiServer(RunManager& runs) : impl_(std::make_unique<Impl>(runs)) {
  auto& s = impl_->server;
  auto& api = impl_->api;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.Get("/operators", [&api](const httplib::Request&, httplib::Response& res) { reply(res, api.operators()); });
  s.Post("/pipelines", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.create_pipeline(req.body));
  });
  s.Post(R"(/pipelines/([^/]+)/run)", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.start_run(req.matches[1]));
  });
  s.Get(R"(/runs/([^/]+))", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.run_status(req.matches[1]));
  });
  s.Get(R"(/runs/([^/]+)/stats)", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.run_stats(req.matches[1]));
  });
  s.Get(R"(/runs/([^/]+)/operators/([^/]+)/sample)", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.sample(req.matches[1], req.matches[2], param(req, "n")));
  });
  s.Get(R"(/runs/([^/]+)/result)", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.result(req.matches[1], param(req, "limit"), param(req, "offset")));
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(error_body(res.status == 404 ? "NotFound" : "HttpError", httplib::status_message(res.status)).dump(),
                      "application/json");
    }
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(error_body("Internal", msg).dump(), "application/json");
  });
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int ApiServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ApiServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::pair<std::string, int> parse_address(const std::string& addr) {
  std::string host = "127.0.0.1";
  std::string port = addr;
  if (auto colon = addr.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = addr.substr(0, colon);
    port = addr.substr(colon + 1);
  }
  if (host.size() > 1 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  int p = 0;
  auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
  if (port.empty() || ec != std::errc() || end != port.data() + port.size() || p < 0 || p > 65535) {
    throw Error(ErrorCode::InvalidArgument, "bad address '" + addr + "'");
  }
  return {host, p};
}

}  // namespace tcurator
